"""Dense two-phase simplex for desk-scale linear programs.

Deliberately self-contained so it can serve as an independent oracle for
the operator-splitting solver.  Dantzig pricing with a Bland fallback for
anti-cycling; artificial variables are driven out (or their rows dropped)
between phases.  Sizes here are tens of rows/columns, so a dense tableau
is the right tool.
"""

from __future__ import annotations

import numpy as np

from .errors import InfeasibleProblemError, UnboundedProblemError

_PIVOT_TOL = 1e-9
_COST_TOL = 1e-9
_FEAS_TOL = 1e-7


class SimplexResult:
    __slots__ = ("status", "x", "objective")

    def __init__(self, status, x, objective):
        self.status = status
        self.x = x
        self.objective = objective


def _pivot(T, basis, row, col):
    T[row] /= T[row, col]
    colvals = T[:, col].copy()
    colvals[row] = 0.0
    T -= np.outer(colvals, T[row])
    basis[row] = col


def _run_phase(T, basis, allowed, bland_after=None):
    """Pivot until optimal or unbounded.  Returns 'optimal'/'unbounded'."""
    m = len(basis)
    if bland_after is None:
        bland_after = 40 * (T.shape[1] + m) + 200
    it = 0
    while True:
        costs = T[m, :]
        cand = np.flatnonzero(allowed & (costs < -_COST_TOL))
        if cand.size == 0:
            return "optimal"
        if it < bland_after:
            col = cand[np.argmin(costs[cand])]
        else:  # Bland's rule: smallest index, guarantees termination
            col = cand[0]
        ratios = np.full(m, np.inf)
        pos = T[:m, col] > _PIVOT_TOL
        ratios[pos] = T[:m, -1][pos] / T[:m, col][pos]
        if not np.any(np.isfinite(ratios)):
            return "unbounded"
        best = np.min(ratios)
        ties = np.flatnonzero(ratios <= best + 1e-12 * (1.0 + abs(best)))
        row = ties[np.argmin(np.asarray(basis)[ties])]
        _pivot(T, basis, row, col)
        it += 1
        if it > 20000 + 2000 * m:
            raise RuntimeError("simplex failed to terminate")


def solve_standard_form(c, G, b) -> SimplexResult:
    """min c.x  s.t.  G x = b, x >= 0.

    Raises nothing; the caller inspects ``status`` in
    {'optimal', 'infeasible', 'unbounded'}.
    """
    G = np.array(G, dtype=float)
    b = np.array(b, dtype=float).reshape(-1)
    c = np.array(c, dtype=float).reshape(-1)
    m, n = G.shape

    # scale rows to O(1) pivots
    row_scale = np.maximum(np.max(np.abs(G), axis=1), 1e-30)
    G /= row_scale[:, None]
    b /= row_scale
    flip = b < 0
    G[flip] *= -1.0
    b[flip] *= -1.0

    # phase 1 tableau: [G | I | b] with artificial basis
    T = np.zeros((m + 1, n + m + 1))
    T[:m, :n] = G
    T[:m, n:n + m] = np.eye(m)
    T[:m, -1] = b
    T[m, :n] = -G.sum(axis=0)
    T[m, -1] = -b.sum()
    basis = list(range(n, n + m))

    allowed = np.zeros(n + m + 1, dtype=bool)
    allowed[:n] = True
    if _run_phase(T, basis, allowed) == "unbounded":  # cannot happen in phase 1
        raise RuntimeError("phase-1 unbounded")
    if -T[m, -1] > _FEAS_TOL * (1.0 + float(np.sum(b))):
        return SimplexResult("infeasible", None, np.inf)

    # drive artificials out of the basis; drop redundant rows
    keep_rows = []
    for i in range(m):
        if basis[i] >= n:
            piv = np.flatnonzero(np.abs(T[i, :n]) > _PIVOT_TOL)
            if piv.size:
                _pivot(T, basis, i, int(piv[0]))
                keep_rows.append(i)
            # else: dependent row, drop it
        else:
            keep_rows.append(i)
    if len(keep_rows) < m:
        T = np.vstack([T[keep_rows], T[m:]])
        basis = [basis[i] for i in keep_rows]
        m = len(basis)

    # phase 2: real costs over original columns only
    T2 = np.zeros((m + 1, n + 1))
    T2[:m, :n] = T[:m, :n]
    T2[:m, -1] = T[:m, -1]
    T2[m, :n] = c
    for i, bi in enumerate(basis):
        T2[m] -= c[bi] * T2[i]
    allowed2 = np.ones(n + 1, dtype=bool)
    allowed2[-1] = False
    status = _run_phase(T2, basis, allowed2)
    if status == "unbounded":
        return SimplexResult("unbounded", None, -np.inf)

    x = np.zeros(n)
    x[basis] = T2[:m, -1]
    return SimplexResult("optimal", x, float(c @ x))


def solve_lp(c, A_ub=None, b_ub=None, A_eq=None, b_eq=None, n_free=0) -> SimplexResult:
    """min c.x with A_ub x <= b_ub, A_eq x = b_eq.

    The first ``n_free`` variables are free, the rest are >= 0.  Frees are
    split into positive parts and inequality rows get slack variables
    before handing off to the standard-form solver.
    """
    c = np.asarray(c, dtype=float).reshape(-1)
    n = c.size
    rows = []
    rhs = []
    n_ub = 0
    if A_ub is not None and len(A_ub):
        A_ub = np.atleast_2d(np.asarray(A_ub, dtype=float))
        rows.append(A_ub)
        rhs.append(np.asarray(b_ub, dtype=float).reshape(-1))
        n_ub = A_ub.shape[0]
    if A_eq is not None and len(A_eq):
        A_eq = np.atleast_2d(np.asarray(A_eq, dtype=float))
        rows.append(A_eq)
        rhs.append(np.asarray(b_eq, dtype=float).reshape(-1))
    A = np.vstack(rows)
    b = np.concatenate(rhs)
    m = A.shape[0]

    # columns: [free+, free-, nonneg, slacks]
    F = A[:, :n_free]
    P = A[:, n_free:]
    S = np.zeros((m, n_ub))
    S[:n_ub, :n_ub] = np.eye(n_ub)
    G = np.hstack([F, -F, P, S])
    c_std = np.concatenate([c[:n_free], -c[:n_free], c[n_free:], np.zeros(n_ub)])

    res = solve_standard_form(c_std, G, b)
    if res.status != "optimal":
        return res
    xs = res.x
    x = np.empty(n)
    x[:n_free] = xs[:n_free] - xs[n_free:2 * n_free]
    x[n_free:] = xs[2 * n_free:2 * n_free + (n - n_free)]
    return SimplexResult("optimal", x, float(c @ x))


def require_optimal(res: SimplexResult, what: str) -> SimplexResult:
    if res.status == "infeasible":
        raise InfeasibleProblemError(f"{what}: constraints are infeasible")
    if res.status == "unbounded":
        raise UnboundedProblemError(f"{what}: objective unbounded below")
    return res
