"""The stability chain of weighted l1 recovery.

Quantities implemented here:

* the scaling law between sparsity back-off and the robustness factor,
  C(backoff) = 1 / sqrt(1 - backoff), and the tail-error factor
  2C/(C - 1);
* the null-space condition margin whose sign decides whether the
  stability bound holds for a given (A, K, C);
* the worst-case null-space ratio kappa (exact by sign enumeration, or
  sampled as a lower bound);
* the error budget zeta(eps0), the amplitude level y* solving
  "partial first moment = zeta", and the resulting support-overlap
  prediction 1 - F(y*);
* a Monte Carlo estimator of the weak threshold of plain l1 recovery.

Everything is pure given its inputs (Monte Carlo takes explicit seeds),
so calls may run in parallel.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field

import numpy as np

from . import _simplex
from .ampdist import AmplitudeDistribution
from .errors import KappaInfiniteError
from .recovery import SparseSignal, l1_recover
from .seeding import derive_seed, rng_for
from .solver import null_space_basis
from .validation import as_index_set, as_matrix, as_vector, check_range

_KAPPA_ENUM_LIMIT = 14

#: condition margins above this value count as "condition holds"
MARGIN_TOLERANCE = -1e-7


# ----------------------------------------------------------------------
# closed-form scaling law


def scaling_constant(varpi: float) -> float:
    """Robustness parameter C = 1/sqrt(1 - varpi) for back-off varpi."""
    varpi = check_range(varpi, 0.0, 1.0, "varpi", hi_open=True)
    return 1.0 / math.sqrt(1.0 - varpi)


def stability_factor(C: float) -> float:
    """Tail-error factor 2C/(C - 1); requires C > 1 (pole at C = 1)."""
    C = float(C)
    if not (np.isfinite(C) and C > 1.0):
        raise ValueError(f"stability factor needs C > 1, got {C!r}")
    return 2.0 * C / (C - 1.0)


def error_bound_l1(x, K1, C: float, kappa: float) -> float:
    """Full-vector error bound 2C(1+kappa)/(C-1) * ||x restricted off K1||_1."""
    x = as_vector(x)
    K1 = as_index_set(K1, x.size, "K1")
    factor = stability_factor(C) * (1.0 + float(kappa))
    mask = np.ones(x.size, dtype=bool)
    mask[list(K1)] = False
    return factor * float(np.sum(np.abs(x[mask])))


# ----------------------------------------------------------------------
# parameter and report records


@dataclass(frozen=True)
class StabilityParams:
    """Bundle of the stability-chain parameters."""

    varpi: float
    C: float
    mu_w: float
    kappa_star: float
    epsilon0: float

    def __post_init__(self):
        check_range(self.varpi, 0.0, 1.0, "varpi", hi_open=True)
        if self.C <= 1.0:
            raise ValueError("C must exceed 1")
        check_range(self.mu_w, 0.0, 1.0, "mu_w", lo_open=True, hi_open=True)
        if self.kappa_star < 0:
            raise ValueError("kappa_star must be nonnegative")
        if self.epsilon0 <= 0:
            raise ValueError("epsilon0 must be positive")

    @classmethod
    def from_backoff(cls, varpi, mu_w, kappa_star, epsilon0):
        return cls(varpi, scaling_constant(varpi), mu_w, kappa_star, epsilon0)


@dataclass(frozen=True)
class StabilityRecord:
    """One stability-sweep trial."""

    varpi: float
    C: float
    k: int
    seed: int
    tail_norm: float
    error_tail: float
    bound: float
    satisfied: bool


@dataclass
class StabilityReport:
    """Per-trial stability checks plus the satisfied fraction."""

    records: list[StabilityRecord] = field(default_factory=list)

    def append(self, record: StabilityRecord):
        if record.bound < 0:
            raise ValueError("stability bound cannot be negative")
        self.records.append(record)

    @property
    def fraction_satisfied(self) -> float:
        if not self.records:
            return float("nan")
        return sum(r.satisfied for r in self.records) / len(self.records)

    def fraction_for(self, varpi: float) -> float:
        sub = [r for r in self.records if r.varpi == varpi]
        if not sub:
            return float("nan")
        return sum(r.satisfied for r in sub) / len(sub)


# ----------------------------------------------------------------------
# null-space condition margin


def condition_margin(A, x_K_signal: SparseSignal, C: float) -> float:
    """Worst-case slack of the null-space stability condition.

    Minimizes ||x_K + w_K||_1 + ||w_off||_1 / C - ||x_K||_1 over null
    vectors w of A.  The result is always <= 0 (w = 0 attains 0); the
    condition holds exactly when the minimum is 0, so compare against
    ``MARGIN_TOLERANCE`` to absorb solver noise.
    """
    C = float(C)
    if C < 1.0:
        raise ValueError("C must be at least 1")
    A = as_matrix(A)
    divisors = np.full(A.shape[1], C)
    return condition_margin_weighted(A, x_K_signal, divisors)


def condition_margin_weighted(A, x_K_signal: SparseSignal, divisors) -> float:
    """Condition margin with per-coordinate divisors off the support.

    Off-support coordinate j contributes |w_j| / divisors[j]; entries of
    ``divisors`` on the support are ignored.  This generalized form backs
    both the plain condition and the two-class (C, C_inf) polytope used
    in the angle machinery.
    """
    A = as_matrix(A)
    n = A.shape[1]
    if x_K_signal.n != n:
        raise ValueError("signal dimension does not match A")
    divisors = as_vector(divisors, "divisors", length=n)
    if np.any(divisors <= 0):
        raise ValueError("divisors must be positive")

    B = null_space_basis(A)
    d = B.shape[1]
    K = np.array(x_K_signal.support, dtype=int)
    if d == 0 or K.size == 0:
        return 0.0
    x_K = np.asarray(x_K_signal.values, dtype=float)
    off = np.setdiff1d(np.arange(n), K)
    B_K, B_off = B[K], B[off]
    k, r = K.size, off.size

    # variables: u (free, d) | s (k) | t (r); minimize 1.s + (1/div).t
    c = np.concatenate([np.zeros(d), np.ones(k), 1.0 / divisors[off]])
    Z_ks = np.zeros((k, r))
    Z_rs = np.zeros((r, k))
    A_ub = np.vstack([
        np.hstack([B_K, -np.eye(k), Z_ks]),
        np.hstack([-B_K, -np.eye(k), Z_ks]),
        np.hstack([B_off, Z_rs, -np.eye(r)]),
        np.hstack([-B_off, Z_rs, -np.eye(r)]),
    ])
    b_ub = np.concatenate([-x_K, x_K, np.zeros(2 * r)])
    res = _simplex.require_optimal(
        _simplex.solve_lp(c, A_ub, b_ub, n_free=d), "condition margin")
    return float(res.objective) - float(np.sum(np.abs(x_K)))


# ----------------------------------------------------------------------
# the null-space ratio kappa


def kappa_exact(A, S) -> float:
    """Exact max of ||w_S||_1 / ||w_off||_1 over nonzero null vectors.

    Enumerates the 2^|S| sign patterns sigma and solves
    max sigma.w_S subject to ||w_off||_1 <= 1, A w = 0 for each; the
    largest optimum is the ratio.  Returns 0 for a trivial null space.
    Raises ``KappaInfiniteError`` when some null vector vanishes off S
    (the program is unbounded), and refuses |S| > 14.
    """
    A = as_matrix(A)
    n = A.shape[1]
    S = np.array(as_index_set(S, n, "S"), dtype=int)
    if S.size > _KAPPA_ENUM_LIMIT:
        raise ValueError(f"kappa_exact refuses |S| > {_KAPPA_ENUM_LIMIT}; "
                         "use kappa_sample")
    B = null_space_basis(A)
    d = B.shape[1]
    if d == 0 or S.size == 0:
        return 0.0
    off = np.setdiff1d(np.arange(n), S)
    if off.size == 0:
        raise KappaInfiniteError("S covers every coordinate")
    B_S, B_off = B[S], B[off]
    r = off.size

    best = 0.0
    # variables: u (free, d) | t (r)
    A_rows = np.vstack([
        np.hstack([B_off, -np.eye(r)]),
        np.hstack([-B_off, -np.eye(r)]),
        np.hstack([np.zeros((1, d)), np.ones((1, r))]),
    ])
    b_ub = np.concatenate([np.zeros(2 * r), [1.0]])
    for signs in itertools.product((1.0, -1.0), repeat=S.size):
        sigma = np.array(signs)
        c = np.concatenate([-(sigma @ B_S), np.zeros(r)])
        res = _simplex.solve_lp(c, A_rows, b_ub, n_free=d)
        if res.status == "unbounded":
            raise KappaInfiniteError("null vector with zero mass off S")
        if res.status != "optimal":  # pragma: no cover - feasible at 0
            raise RuntimeError(f"unexpected LP status {res.status}")
        best = max(best, -res.objective)
    return float(best)


def kappa_sample(A, S, samples: int, seed: int) -> float:
    """Lower-bound estimate of kappa from random null-space directions."""
    if samples < 1:
        raise ValueError("samples must be >= 1")
    A = as_matrix(A)
    n = A.shape[1]
    S = np.array(as_index_set(S, n, "S"), dtype=int)
    B = null_space_basis(A)
    if B.shape[1] == 0 or S.size == 0:
        return 0.0
    rng = rng_for(seed, 0x6B)
    G = rng.standard_normal((samples, B.shape[1]))
    W = G @ B.T
    mask = np.zeros(n, dtype=bool)
    mask[S] = True
    num = np.sum(np.abs(W[:, mask]), axis=1)
    den = np.sum(np.abs(W[:, ~mask]), axis=1)
    if np.any((den == 0.0) & (num > 0.0)):
        return float("inf")
    ok = den > 0.0
    if not np.any(ok):
        return 0.0
    return float(np.max(num[ok] / den[ok]))


# ----------------------------------------------------------------------
# error budget zeta, y*, and the overlap prediction


@dataclass(frozen=True)
class ZetaResult:
    value: float
    epsilon1: float


def zeta(epsilon0: float, dist: AmplitudeDistribution, mu_w: float,
         kappa_star: float, *, eps1_lo: float = 1e-4, eps1_hi: float = 0.9,
         grid: int = 64) -> ZetaResult:
    """Error budget: inf over eps1 of
    2C(1+kappa*)/(C-1) * (partial first moment up to the
    (eps0+eps1)/(1+eps0) quantile), with C = 1/sqrt(1 - eps1).

    The infimum over the open interval is realized numerically on a
    geometric grid refined by golden-section.  ``mu_w`` is carried for
    context only: the weak-threshold fraction cancels from both the
    quantile argument and the scaling constant.
    """
    if epsilon0 <= 0:
        raise ValueError("epsilon0 must be positive")
    check_range(mu_w, 0.0, 1.0, "mu_w", lo_open=True, hi_open=True)
    if kappa_star < 0:
        raise ValueError("kappa_star must be nonnegative")
    if not (0 < eps1_lo < eps1_hi < 1):
        raise ValueError("empty search interval for epsilon1")

    def value(e1: float) -> float:
        C = scaling_constant(e1)
        q = (epsilon0 + e1) / (1.0 + epsilon0)
        level = dist.quantile(min(q, 1.0))
        return stability_factor(C) * (1.0 + kappa_star) * dist.partial_first_moment(level)

    pts = np.geomspace(eps1_lo, eps1_hi, grid)
    vals = np.array([value(p) for p in pts])
    i = int(np.argmin(vals))
    lo = pts[max(i - 1, 0)]
    hi = pts[min(i + 1, grid - 1)]

    # golden-section refinement inside the bracketing grid cell
    invphi = (math.sqrt(5.0) - 1.0) / 2.0
    a, b = lo, hi
    c1 = b - invphi * (b - a)
    c2 = a + invphi * (b - a)
    f1, f2 = value(c1), value(c2)
    for _ in range(80):
        if f1 <= f2:
            b, c2, f2 = c2, c1, f1
            c1 = b - invphi * (b - a)
            f1 = value(c1)
        else:
            a, c1, f1 = c1, c2, f2
            c2 = a + invphi * (b - a)
            f2 = value(c2)
        if b - a < 1e-12:
            break
    cand = [(vals[i], pts[i]), (f1, c1), (f2, c2)]
    best_val, best_e1 = min(cand, key=lambda t: t[0])
    return ZetaResult(float(best_val), float(best_e1))


def overlap_from_error_budget(budget: float, dist: AmplitudeDistribution):
    """Solve "partial first moment up to y = budget" for y* by bisection
    and return (1 - F(y*), y*).  Budgets >= 1 have no solution (vacuous)."""
    if budget < 0:
        raise ValueError("budget must be nonnegative")
    if budget == 0.0:
        return 1.0, 0.0
    if budget >= 1.0:
        raise ValueError("budget >= 1 is vacuous; no finite y* exists")
    lo = 0.0
    hi = dist.support_end
    if not np.isfinite(hi):
        hi = 1.0
        while dist.partial_first_moment(hi) < budget:
            hi *= 2.0
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if dist.partial_first_moment(mid) < budget:
            lo = mid
        else:
            hi = mid
        if hi - lo <= 1e-10:
            break
    y_star = 0.5 * (lo + hi)
    return float(1.0 - dist.cdf(y_star)), float(y_star)


@dataclass(frozen=True)
class OverlapPrediction:
    value: float
    y_star: float
    zeta_value: float
    epsilon1: float
    vacuous: bool


def support_overlap_prediction(epsilon0: float, dist: AmplitudeDistribution,
                               mu_w: float, kappa_star: float) -> OverlapPrediction:
    """Predicted support overlap 1 - F(y*), with y* solving
    "partial first moment = zeta(eps0)".

    A budget zeta >= 1 exceeds the whole mean, so the bound says nothing;
    the prediction is then 0 with the ``vacuous`` flag set.
    """
    zres = zeta(epsilon0, dist, mu_w, kappa_star)
    if zres.value >= 1.0:
        return OverlapPrediction(0.0, math.inf, zres.value, zres.epsilon1, True)
    value, y_star = overlap_from_error_budget(zres.value, dist)
    return OverlapPrediction(value, y_star, zres.value, zres.epsilon1, False)


# ----------------------------------------------------------------------
# weak threshold of plain l1, by Monte Carlo bisection


def estimate_weak_threshold(delta: float, n: int, trials: int, seed: int,
                            success_level: float = 0.5,
                            solver_tol: float = 1e-6,
                            solver_max_iters: int = 2500) -> float:
    """Empirical weak-threshold fraction k/n where plain l1 success
    probability crosses ``success_level``.

    Success of a trial is sup-norm recovery of a random unit-magnitude,
    random-sign k-sparse signal (the weak threshold does not depend on
    the amplitude law).  Deterministic given the seed: trial seeds derive
    from (seed, k, trial), so the bisection path does not matter.
    """
    check_range(delta, 0.0, 1.0, "delta", lo_open=True)
    if trials < 1:
        raise ValueError("trials must be >= 1")
    m = int(round(delta * n))
    if m < 1:
        raise ValueError("delta * n must be at least 1")
    m = min(m, n)
    if m == n:
        return 1.0

    from .ensembles import gaussian_matrix, recovery_success

    def rate(k: int) -> float:
        wins = 0
        for t in range(trials):
            s = derive_seed(seed, k, t)
            A = gaussian_matrix(m, n, s)
            rng = rng_for(s, 0x5C)
            supp = rng.choice(n, size=k, replace=False)
            x = np.zeros(n)
            x[supp] = rng.choice([-1.0, 1.0], size=k)
            res = l1_recover(A, A @ x, tol=solver_tol, max_iters=solver_max_iters)
            wins += recovery_success(x, res.z)
        return wins / trials

    k_lo, k_hi = 1, m
    r_lo = rate(k_lo)
    if r_lo < success_level:
        return k_lo / n
    r_hi = rate(k_hi)
    if r_hi >= success_level:
        return k_hi / n
    while k_hi - k_lo > 1:
        mid = (k_lo + k_hi) // 2
        r_mid = rate(mid)
        if r_mid >= success_level:
            k_lo, r_lo = mid, r_mid
        else:
            k_hi, r_hi = mid, r_mid
    frac = (r_lo - success_level) / max(r_lo - r_hi, 1e-12)
    return float((k_lo + frac * (k_hi - k_lo)) / n)
