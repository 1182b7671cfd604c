"""Random problem ensembles: Gaussian measurement matrices and random
sparse or compressible signals, all addressed by explicit seeds."""

from __future__ import annotations

import numpy as np

from .ampdist import AmplitudeDistribution
from .recovery import SparseSignal
from .seeding import derive_seed, rng_for


def gaussian_matrix(m: int, n: int, seed: int) -> np.ndarray:
    """m x n matrix of i.i.d. standard normal entries."""
    if not 1 <= m <= n:
        raise ValueError(f"need 1 <= m <= n, got ({m}, {n})")
    return rng_for(seed).standard_normal((m, n))


def random_sparse_signal(n: int, k: int, dist: AmplitudeDistribution,
                         seed: int) -> SparseSignal:
    """k-sparse signal: uniform random support, fair random signs,
    magnitudes drawn from ``dist``."""
    if not 0 <= k <= n:
        raise ValueError(f"need 0 <= k <= n, got k={k}, n={n}")
    rng = rng_for(seed, 0x51)
    support = np.sort(rng.choice(n, size=k, replace=False))
    signs = rng.choice([-1.0, 1.0], size=k)
    mags = dist.sample(k, derive_seed(seed, 0xA2))
    return SparseSignal(n, support, signs * mags)


def compressible_signal(n: int, k: int, dist: AmplitudeDistribution,
                        tail_fraction: float, seed: int):
    """k dominant entries plus a dense tail on the remaining coordinates.

    The tail magnitudes are i.i.d. draws rescaled so the tail l1 norm is
    ``tail_fraction`` times the dominant l1 norm.  Returns the dense
    vector and the dominant support K.
    """
    if not 1 <= k <= n:
        raise ValueError(f"need 1 <= k <= n, got k={k}, n={n}")
    if tail_fraction < 0:
        raise ValueError("tail_fraction must be nonnegative")
    dominant = random_sparse_signal(n, k, dist, seed)
    x = dominant.to_dense()
    K = np.array(dominant.support, dtype=int)
    rest = np.setdiff1d(np.arange(n), K)
    if rest.size and tail_fraction > 0:
        rng = rng_for(seed, 0xC4)
        raw = dist.sample(rest.size, derive_seed(seed, 0xC5))
        raw = raw * rng.choice([-1.0, 1.0], size=rest.size)
        norm = np.sum(np.abs(raw))
        if norm > 0:
            x[rest] = raw * (tail_fraction * np.sum(np.abs(dominant.values)) / norm)
    return x, K


def recovery_success(x_true: np.ndarray, z: np.ndarray, rtol: float = 1e-6) -> bool:
    """Numeric proxy for perfect recovery: sup-norm error below
    rtol * (1 + sup-norm of the truth)."""
    return bool(np.max(np.abs(z - x_true), initial=0.0)
                <= rtol * (1.0 + np.max(np.abs(x_true), initial=0.0)))
