"""Equality-constrained weighted l1 minimization.

The workhorse is ``solve_weighted_l1``: operator splitting (ADMM) on

    min  sum_i w_i |z_i|   subject to  A z = y,

with a soft-threshold proximal step, projection onto the affine set via a
cached factorization of A A^T, a support-polish step, and a dual
certificate that allows exact early termination.  ``lp_oracle_weighted_l1``
solves the same problem through an independent code path (the u - v split
linear program on a dense simplex) and exists to certify the splitting
solver at desk scale.

Every solve owns its workspace; there is no shared mutable state, so
solves may run freely in parallel.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.linalg import cho_factor, cho_solve

from . import _simplex
from .errors import InfeasibleProblemError, RankDeficiencyError
from .validation import as_matrix, as_vector, as_weights

#: Stand-in for an infinite weight: large enough to force a coordinate to
#: zero numerically, small enough to keep the arithmetic well scaled.
W_INF = 1e6

_ORACLE_MAX_N = 16


@dataclass(frozen=True)
class WeightedL1Problem:
    """Data of one weighted l1 program: matrix, measurements, weights.

    ``weights`` entries are 1 for unweighted coordinates and may go up to
    ``W_INF`` for coordinates that should be forced to zero.  Row rank of
    ``A`` is checked by the factorization inside the solvers, not here.
    """

    A: np.ndarray
    y: np.ndarray
    weights: np.ndarray

    def __init__(self, A, y, weights=None):
        A = as_matrix(A)
        m, n = A.shape
        if m > n:
            raise ValueError(f"need m <= n, got shape {A.shape}")
        y = as_vector(y, "y", length=m)
        if weights is None:
            weights = np.ones(n)
        weights = as_weights(weights, n, W_INF)
        for name, val in (("A", A), ("y", y), ("weights", weights)):
            val = val.copy()
            val.setflags(write=False)
            object.__setattr__(self, name, val)

    @property
    def m(self) -> int:
        return self.A.shape[0]

    @property
    def n(self) -> int:
        return self.A.shape[1]


@dataclass(frozen=True)
class RecoveryResult:
    """Outcome of a solve.

    ``feasibility_residual`` is ||A z - y||_inf / (1 + ||y||_inf); a
    ``converged`` status implies it is at most 1e-8.
    """

    z: np.ndarray
    objective: float
    feasibility_residual: float
    iterations: int
    status: str  # converged | max_iters | infeasible

    @property
    def converged(self) -> bool:
        return self.status == "converged"


def _check_row_rank(A: np.ndarray) -> None:
    if np.linalg.matrix_rank(A) < A.shape[0]:
        raise RankDeficiencyError("A does not have full row rank")


def _feas_residual(A, y, z) -> float:
    return float(np.max(np.abs(A @ z - y), initial=0.0) / (1.0 + np.max(np.abs(y), initial=0.0)))


def _dual_gap(A, y, w, nu, obj) -> float:
    """Rigorous suboptimality bound from any dual candidate nu.

    nu is rescaled into the dual-feasible box |A^T nu| <= w, so
    obj - y.nu is a true bound regardless of how nu was produced.
    """
    viol = float(np.max(np.abs(A.T @ nu) / w, initial=0.0)) - 1.0
    dual_val = float(y @ nu) / (1.0 + max(0.0, viol))
    return obj - dual_val


def _certificate_gap(A, y, w, z, support, obj) -> float:
    """Duality gap bound for a candidate supported on ``support``.

    Starts from the least-squares solution of A_S^T nu = w_S sign(z_S)
    and repairs box violations with a few active-set refinements (needed
    when |S| < m and the minimum-norm dual is not the feasible one).
    """
    if not support.size:
        return _dual_gap(A, y, w, np.zeros(A.shape[0]), obj)
    rhs_s = w[support] * np.sign(z[support])
    active = np.array([], dtype=int)
    signs = np.array([])
    best = np.inf
    for _ in range(6):
        cols = np.concatenate([support, active])
        target = np.concatenate([rhs_s, w[active] * signs])
        nu, *_ = np.linalg.lstsq(A[:, cols].T, target, rcond=None)
        if np.max(np.abs(A[:, support].T @ nu - rhs_s)) > 1e-7 * (1.0 + np.max(np.abs(rhs_s))):
            break
        best = min(best, _dual_gap(A, y, w, nu, obj))
        t = A.T @ nu
        viol = np.flatnonzero(np.abs(t) > w * (1.0 + 1e-12))
        viol = np.setdiff1d(viol, support, assume_unique=False)
        if viol.size == 0:
            break
        active = np.union1d(active, viol)
        signs = np.sign((A.T @ nu)[active])
    return best


def solve_weighted_l1(problem: WeightedL1Problem, tol: float = 1e-9,
                      max_iters: int = 50_000) -> RecoveryResult:
    """Solve min sum w|z| s.t. Az = y by over-relaxed ADMM.

    The iteration runs in the scaled variable w*z so a single threshold
    1/rho applies to every coordinate.  Every ``cert interval`` iterations
    the current support is polished (least-squares solve of the reduced
    system, ties in support selection broken by smallest index) and a dual
    certificate is attempted; a certified point returns immediately.

    Raises ``RankDeficiencyError`` when A is row-rank deficient.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    A, y, w = problem.A, problem.y, problem.weights
    m, n = A.shape
    _check_row_rank(A)

    if m == n:
        z = np.linalg.solve(A, y)
        return RecoveryResult(z, float(np.sum(w * np.abs(z))),
                              _feas_residual(A, y, z), 0, "converged")

    state = _SplitState(A, y, w)

    # weight-cap continuation: wildly spread weights (the W_INF regime)
    # make a single-threshold splitting crawl, so the iteration runs on
    # progressively larger caps while polish/certificate always use the
    # true weights.  Benign weight spreads take the single full stage.
    w_min = float(np.min(w))
    caps = []
    cap = w_min * 1e3
    while cap < np.max(w):
        caps.append(cap)
        cap *= 10.0
    caps.append(float(np.max(w)))

    total_iters = 0
    converged = False
    for stage, cap in enumerate(caps):
        last = stage == len(caps) - 1
        budget = max_iters - total_iters if last else min(2000, max(0, max_iters - total_iters))
        if budget <= 0:
            break
        used, certified = state.run(np.minimum(w, cap), tol, budget,
                                    final_stage=last)
        total_iters += used
        if certified:
            converged = True
            break

    best_z, best_obj = state.best()
    residual = _feas_residual(A, y, best_z)
    status = "converged" if (converged and residual <= 1e-8) else "max_iters"
    return RecoveryResult(best_z, best_obj, residual, total_iters, status)


class _SplitState:
    """Workspace of one weighted-l1 solve: ADMM stages over capped weights
    plus support polish and dual certificates at the true weights."""

    _GAP_TOL = 1e-9
    _CERT_EVERY = 25

    def __init__(self, A, y, w):
        self.A, self.y, self.w = A, y, w
        self.m, self.n = A.shape
        self.best_z = None
        self.best_obj = np.inf
        self.z_phys = None   # physical iterate carried across stages
        self.seen_supports = set()

    def best(self):
        if self.best_z is None:  # pragma: no cover - stages always polish
            return np.zeros(self.n), 0.0
        return self.best_z, self.best_obj

    # -- candidate machinery (true weights) ---------------------------------

    def _cap_support(self, idx, scores):
        """Largest-score m indices; ties keep the smaller index (stable)."""
        if idx.size <= self.m:
            return np.sort(idx)
        order = np.argsort(-scores[idx], kind="stable")
        return np.sort(idx[order[:self.m]])

    def _polish(self, idx):
        """Solve the reduced system on support idx; None if infeasible."""
        z_cand = np.zeros(self.n)
        if idx.size:
            sol, *_ = np.linalg.lstsq(self.A[:, idx], self.y, rcond=None)
            z_cand[idx] = sol
        if _feas_residual(self.A, self.y, z_cand) > 1e-10:
            return None
        return z_cand

    def _consider(self, phys_iterates):
        """Polish supports drawn from physical iterates; True on certificate."""
        supports = []
        for v, thresholded in phys_iterates:
            av = np.abs(v)
            if thresholded:  # the prox output already has exact zeros
                idx = np.flatnonzero(av)
            else:
                idx = np.flatnonzero(av > 1e-10 * (1.0 + np.max(av, initial=0.0)))
            supports.append(self._cap_support(idx, av))
        for idx in supports:
            key = idx.tobytes()
            if key in self.seen_supports and self.best_z is not None:
                continue
            self.seen_supports.add(key)
            z_cand = self._polish(idx)
            if z_cand is None:
                continue
            obj = float(np.sum(self.w * np.abs(z_cand)))
            if obj <= self.best_obj:
                self.best_obj, self.best_z = obj, z_cand
            support = np.flatnonzero(
                np.abs(z_cand) > 1e-12 * (1.0 + np.max(np.abs(z_cand), initial=0.0)))
            gap = _certificate_gap(self.A, self.y, self.w, z_cand, support, obj)
            if gap <= self._GAP_TOL * (1.0 + abs(obj)):
                return True
        return False

    # -- one ADMM stage ------------------------------------------------------

    def run(self, w_eff, tol, budget, final_stage):
        A, y = self.A, self.y
        n = self.n
        Aw = A / w_eff[None, :]
        try:
            chol = cho_factor(Aw @ Aw.T)
        except np.linalg.LinAlgError as e:  # pragma: no cover - rank checked
            raise RankDeficiencyError("Cholesky of A A^T failed") from e
        particular = Aw.T @ cho_solve(chol, y)

        def project(v):
            return v - Aw.T @ cho_solve(chol, Aw @ v)

        zt = particular.copy() if self.z_phys is None else self.z_phys * w_eff
        u = np.zeros(n)
        rho, alpha = 1.0, 1.7
        sqrt_n = np.sqrt(n)
        full_weights = bool(np.all(w_eff == self.w))

        it = 0
        certified = False
        x = zt
        for it in range(1, budget + 1):
            x = project(zt - u) + particular
            x_hat = alpha * x + (1.0 - alpha) * zt
            zt_old = zt
            v = x_hat + u
            zt = np.sign(v) * np.maximum(np.abs(v) - 1.0 / rho, 0.0)
            u = u + x_hat - zt

            r_norm = np.linalg.norm(x - zt)
            s_norm = rho * np.linalg.norm(zt - zt_old)
            eps_pri = sqrt_n * tol + tol * max(np.linalg.norm(x), np.linalg.norm(zt))
            eps_dual = sqrt_n * tol + tol * np.linalg.norm(rho * u)
            if final_stage and r_norm <= eps_pri and s_norm <= eps_dual:
                self._consider([(zt / w_eff, True), (x / w_eff, False)])
                certified = True
                break
            if it % self._CERT_EVERY == 0:
                if self._consider([(zt / w_eff, True), (x / w_eff, False)]):
                    certified = True
                    break
                # ADMM multiplier as a dual candidate: certifies the incumbent
                # without needing the exact support sign system
                if full_weights and self.best_z is not None:
                    nu = rho * cho_solve(chol, Aw @ u)
                    gap = min(_dual_gap(Aw, y, np.ones(n), nu, self.best_obj),
                              _dual_gap(Aw, y, np.ones(n), -nu, self.best_obj))
                    if gap <= self._GAP_TOL * (1.0 + abs(self.best_obj)):
                        certified = True
                        break
                if r_norm > 10.0 * s_norm:
                    rho *= 2.0
                    u /= 2.0
                elif s_norm > 10.0 * r_norm:
                    rho /= 2.0
                    u *= 2.0

        # feasible side of the splitting competes with the polished incumbent
        x_final = project(zt - u) + particular
        obj_final = float(np.sum(self.w * np.abs(x_final / w_eff)))
        if self.best_z is None or obj_final < self.best_obj:
            self.best_obj, self.best_z = obj_final, x_final / w_eff
        self._consider([(zt / w_eff, True), (x_final / w_eff, False)])
        self.z_phys = zt / w_eff
        return it, certified


def lp_oracle_weighted_l1(problem: WeightedL1Problem):
    """Exact optimum by the standard split z = u - v, u, v >= 0.

    Independent of the splitting solver: the LP is handed to the in-repo
    two-phase simplex.  Desk scale only (n <= 16).  Returns
    ``(objective, z)``; raises ``InfeasibleProblemError`` when the
    constraints are inconsistent (possible for rank-deficient rows).
    """
    if problem.n > _ORACLE_MAX_N:
        raise ValueError(f"lp oracle refuses n > {_ORACLE_MAX_N}")
    A, y, w = problem.A, problem.y, problem.weights
    G = np.hstack([A, -A])
    c = np.concatenate([w, w])
    res = _simplex.solve_standard_form(c, G, y)
    if res.status == "infeasible":
        raise InfeasibleProblemError("no z satisfies Az = y")
    if res.status != "optimal":  # pragma: no cover - objective bounded below by 0
        raise RuntimeError(f"unexpected LP status {res.status}")
    n = problem.n
    z = res.x[:n] - res.x[n:]
    return float(res.objective), z


def null_space_basis(A) -> np.ndarray:
    """Orthonormal columns spanning the null space of A.

    Shape (n, n - m); empty second dimension for square invertible A.
    Raises ``RankDeficiencyError`` when A is not full row rank.
    """
    A = as_matrix(A)
    m, n = A.shape
    _, s, Vt = np.linalg.svd(A, full_matrices=True)
    tol = max(m, n) * np.finfo(float).eps * (s[0] if s.size else 0.0)
    rank = int(np.sum(s > tol))
    if rank < m:
        raise RankDeficiencyError("A does not have full row rank")
    return Vt[rank:].T.copy()
