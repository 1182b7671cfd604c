"""Recovery algorithms: plain l1, weighted l1 on an estimated support,
and the two-step reweighted procedure, plus support-set utilities.

All functions are pure given their inputs and safe to call in parallel.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import L1LabError, RecoveryStageError
from .solver import RecoveryResult, WeightedL1Problem, solve_weighted_l1
from .validation import as_index_set, as_vector


@dataclass(frozen=True)
class SparseSignal:
    """Exactly sparse signal: dimension, sorted support, signed values."""

    n: int
    support: tuple[int, ...]
    values: np.ndarray

    def __init__(self, n, support, values):
        n = int(n)
        support = as_index_set(support, n, "support")
        values = as_vector(values, "values", length=len(support))
        if np.any(values == 0.0):
            raise ValueError("support values must be nonzero")
        values = values.copy()
        values.setflags(write=False)
        object.__setattr__(self, "n", n)
        object.__setattr__(self, "support", support)
        object.__setattr__(self, "values", values)

    @property
    def k(self) -> int:
        return len(self.support)

    def to_dense(self) -> np.ndarray:
        x = np.zeros(self.n)
        x[list(self.support)] = self.values
        return x

    @classmethod
    def from_dense(cls, x) -> "SparseSignal":
        x = as_vector(x)
        idx = np.flatnonzero(x)
        return cls(x.size, idx, x[idx])


@dataclass(frozen=True)
class SupportEstimate:
    """A sorted index set with its cardinality."""

    indices: tuple[int, ...]
    k: int

    def __init__(self, indices):
        indices = tuple(sorted(int(i) for i in indices))
        if len(set(indices)) != len(indices):
            raise ValueError("indices contain duplicates")
        object.__setattr__(self, "indices", indices)
        object.__setattr__(self, "k", len(indices))

    def __iter__(self):
        return iter(self.indices)

    def as_array(self) -> np.ndarray:
        return np.array(self.indices, dtype=int)


def l1_recover(A, y, tol: float = 1e-9, max_iters: int = 50_000) -> RecoveryResult:
    """Plain l1 minimization: min ||z||_1 s.t. Az = y."""
    return solve_weighted_l1(WeightedL1Problem(A, y), tol=tol, max_iters=max_iters)


def k_support(x, k: int) -> SupportEstimate:
    """Indices of the k largest-magnitude entries of x.

    Magnitude ties are broken in favor of the smaller index so repeated
    runs are reproducible.
    """
    x = as_vector(x)
    if not 0 <= k <= x.size:
        raise ValueError(f"k={k} outside [0, {x.size}]")
    order = np.argsort(-np.abs(x), kind="stable")
    return SupportEstimate(order[:k])


def support_overlap(K, L) -> float:
    """|K intersect L| / |K|; K must be nonempty."""
    K = set(int(i) for i in K)
    L = set(int(i) for i in L)
    if not K:
        raise ValueError("reference support K is empty")
    return len(K & L) / len(K)


def w_lambda(x: SparseSignal, lam: float) -> int:
    """Size of the largest subset of nonzeros of x with l1 norm <= lam.

    Greedy on ascending magnitudes, which is optimal for this objective.
    """
    if lam < 0:
        raise ValueError("lambda must be nonnegative")
    mags = np.sort(np.abs(x.values))
    csum = np.cumsum(mags)
    return int(np.searchsorted(csum, lam, side="right"))


@dataclass(frozen=True)
class ReweightedResult:
    """Output of the two-step algorithm.

    ``x_hat`` is the plain-l1 first pass, ``L`` the size-k support
    estimate taken from it, and ``x_star`` the weighted second pass.
    """

    x_star: np.ndarray
    L: SupportEstimate
    x_hat: np.ndarray
    first_pass: RecoveryResult
    second_pass: RecoveryResult

    def __iter__(self):
        return iter((self.x_star, self.L, self.x_hat))


def reweighted_recover(A, y, k: int, omega: float = 3.0,
                       tol: float = 1e-9, max_iters: int = 50_000) -> ReweightedResult:
    """Two-step recovery: plain l1, then weighted l1 with weight omega
    off the estimated support.

    ``k`` (the presumed sparsity, or an upper bound) must be supplied;
    ``omega`` > 1.  Solver failures carry a stage label.
    """
    if omega <= 1.0:
        raise ValueError("omega must exceed 1")
    return _reweighted(A, y, k, omega, tol, max_iters)


def _reweighted(A, y, k, omega, tol, max_iters) -> ReweightedResult:
    # internal variant without the omega > 1 guard (omega == 1 reduces the
    # second pass to plain l1, useful as a consistency check)
    try:
        first = l1_recover(A, y, tol=tol, max_iters=max_iters)
    except L1LabError as e:
        raise RecoveryStageError("step1-l1", str(e)) from e
    x_hat = first.z
    L = k_support(x_hat, min(k, x_hat.size))
    n = x_hat.size
    weights = np.full(n, omega)
    if L.k:
        weights[L.as_array()] = 1.0
    try:
        second = solve_weighted_l1(WeightedL1Problem(A, y, weights),
                                   tol=tol, max_iters=max_iters)
    except L1LabError as e:
        raise RecoveryStageError("step3-weighted-l1", str(e)) from e
    return ReweightedResult(second.z, L, x_hat, first, second)
