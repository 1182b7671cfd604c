"""Input validation helpers used by the solvers and estimators.

All helpers return float64 numpy arrays (copies when conversion or
sanitizing was needed) and raise ``ValueError`` on malformed input.
"""

from __future__ import annotations

import numpy as np


def as_matrix(A, name: str = "A") -> np.ndarray:
    A = np.asarray(A, dtype=float)
    if A.ndim != 2:
        raise ValueError(f"{name} must be a 2-D matrix, got ndim={A.ndim}")
    if A.size == 0:
        raise ValueError(f"{name} must be nonempty")
    if not np.all(np.isfinite(A)):
        raise ValueError(f"{name} contains non-finite entries")
    return A


def as_vector(x, name: str = "x", length: int | None = None) -> np.ndarray:
    x = np.asarray(x, dtype=float).reshape(-1)
    if not np.all(np.isfinite(x)):
        raise ValueError(f"{name} contains non-finite entries")
    if length is not None and x.size != length:
        raise ValueError(f"{name} must have length {length}, got {x.size}")
    return x


def as_weights(w, n: int, w_max: float) -> np.ndarray:
    w = as_vector(w, "weights", length=n)
    if np.any(w <= 0):
        raise ValueError("weights must be strictly positive")
    if np.any(w > w_max):
        raise ValueError(f"weights must not exceed {w_max:g}")
    return w


def as_index_set(indices, n: int, name: str = "indices") -> tuple[int, ...]:
    idx = tuple(int(i) for i in indices)
    if any(i < 0 or i >= n for i in idx):
        raise ValueError(f"{name} out of range for dimension {n}")
    if len(set(idx)) != len(idx):
        raise ValueError(f"{name} contains duplicates")
    return tuple(sorted(idx))


def check_range(value: float, lo: float, hi: float, name: str,
                lo_open: bool = False, hi_open: bool = False) -> float:
    value = float(value)
    ok_lo = value > lo if lo_open else value >= lo
    ok_hi = value < hi if hi_open else value <= hi
    if not (np.isfinite(value) and ok_lo and ok_hi):
        lo_b = "(" if lo_open else "["
        hi_b = ")" if hi_open else "]"
        raise ValueError(f"{name}={value!r} outside {lo_b}{lo}, {hi}{hi_b}")
    return value
