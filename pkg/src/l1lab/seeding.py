"""Deterministic seed derivation for Monte Carlo trials.

Per-trial seeds are derived from (master seed, cell index, trial index)
with a splitmix64-style mixer, so results do not depend on execution
order or worker count.
"""

from __future__ import annotations

import numpy as np

_MASK = (1 << 64) - 1
_GOLDEN = 0x9E3779B97F4A7C15


def _mix(z: int) -> int:
    z &= _MASK
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK
    return (z ^ (z >> 31)) & _MASK


def derive_seed(*parts: int) -> int:
    """Mix integer parts into a single 64-bit seed."""
    acc = _GOLDEN
    for p in parts:
        acc = _mix((acc + _GOLDEN + (int(p) & _MASK)) & _MASK)
    return acc


def rng_for(*parts: int) -> np.random.Generator:
    """Generator seeded from the mixed parts."""
    return np.random.default_rng(derive_seed(*parts))
