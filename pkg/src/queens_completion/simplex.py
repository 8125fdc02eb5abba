"""Bounded-variable simplex on a condensed (dictionary) tableau.

Solves ``maximize c @ x  s.t.  A @ x <= b,  0 <= x <= upper`` in floating point.
A primal-feasible start runs the primal simplex; a dual-feasible start runs the
dual simplex; otherwise a zero-cost dual simplex pass finds a feasible basis
first. Pricing is Dantzig's rule, falling back to Bland's smallest-index rule
after a run of degenerate pivots so that the method always terminates.

The float answer is only a search result. :func:`reconstruct` turns the final
basis into exact rationals, and callers re-check feasibility and optimality in
exact arithmetic before trusting it.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

FEAS_TOL = 1e-9
_DEGENERATE_SWITCH = 50


class LPError(RuntimeError):
    """Numerical failure; never silently turned into an answer."""


class LPStatus(enum.Enum):
    OPTIMAL = "optimal"
    INFEASIBLE = "infeasible"
    UNBOUNDED = "unbounded"
    ITERATION_LIMIT = "iteration_limit"


@dataclass
class SimplexResult:
    status: LPStatus
    x: np.ndarray | None = None
    duals: np.ndarray | None = None
    value: float | None = None
    basis: list[int] = field(default_factory=list)
    at_upper: list[int] = field(default_factory=list)
    iterations: int = 0


class _Tableau:
    """x_B = beta - T @ x_N, objective = z0 + d @ x_N."""

    def __init__(self, c, A, b, upper):
        m, nv = A.shape
        self.m, self.nv = m, nv
        self.T = np.array(A, dtype=float)  # slack basis: s = b - A x
        self.beta = np.array(b, dtype=float)
        self.d = np.array(c, dtype=float)
        self.z0 = 0.0
        self.basis = list(range(nv, nv + m))
        self.nonbasic = list(range(nv))
        self.upper = np.concatenate([np.asarray(upper, float), np.full(m, np.inf)])
        self.xN = np.zeros(nv)

    def basic_values(self) -> np.ndarray:
        return self.beta - self.T @ self.xN

    def pivot(self, r: int, q: int) -> None:
        T = self.T
        piv = T[r, q]
        if abs(piv) < 1e-12:
            raise LPError(f"pivot element {piv:.3e} too small")
        row = T[r] / piv
        row[q] = 1.0 / piv
        col = T[:, q].copy()
        col[r] = 0.0
        beta_r = self.beta[r] / piv
        nz = np.flatnonzero(col)
        T[nz] -= np.outer(col[nz], row)
        T[:, q] = -col / piv
        T[r] = row
        self.beta[nz] -= col[nz] * beta_r
        self.beta[r] = beta_r
        dq = self.d[q]
        self.d -= dq * row
        self.d[q] = -dq / piv
        self.z0 += dq * beta_r
        self.basis[r], self.nonbasic[q] = self.nonbasic[q], self.basis[r]


def _primal(tab: _Tableau, tol: float, max_iter: int, it: int) -> tuple[LPStatus, int]:
    degenerate = 0
    while it < max_iter:
        at_up = tab.xN > 0
        d = tab.d
        eligible = np.where(at_up, d < -tol, d > tol)
        if not eligible.any():
            return LPStatus.OPTIMAL, it
        idx = np.flatnonzero(eligible)
        if degenerate >= _DEGENERATE_SWITCH:
            q = min(idx, key=lambda j: tab.nonbasic[j])
        else:
            q = idx[np.argmax(np.abs(d[idx]))]
        direction = -1.0 if at_up[q] else 1.0
        xb = tab.basic_values()
        a = tab.T[:, q] * direction
        ub = tab.upper[tab.basis]
        theta = np.full(tab.m, np.inf)
        dec = a > tol
        theta[dec] = np.maximum(xb[dec], 0.0) / a[dec]
        inc = (a < -tol) & np.isfinite(ub)
        theta[inc] = np.maximum(ub[inc] - xb[inc], 0.0) / -a[inc]
        flip = tab.upper[tab.nonbasic[q]]
        best = theta.min() if tab.m else np.inf
        if not np.isfinite(best) and not np.isfinite(flip):
            return LPStatus.UNBOUNDED, it
        it += 1
        if flip <= best:
            tab.xN[q] = 0.0 if at_up[q] else flip
            degenerate = 0
            continue
        ties = np.flatnonzero(theta <= best + tol)
        r = min(ties, key=lambda i: tab.basis[i])
        leaving_at_upper = a[r] < 0
        leave_var = tab.basis[r]
        tab.pivot(r, q)
        tab.xN[q] = tab.upper[leave_var] if leaving_at_upper else 0.0
        degenerate = degenerate + 1 if best <= tol else 0
    return LPStatus.ITERATION_LIMIT, it


def _dual(tab: _Tableau, tol: float, max_iter: int, it: int) -> tuple[LPStatus, int]:
    degenerate = 0
    while it < max_iter:
        xb = tab.basic_values()
        ub = tab.upper[tab.basis]
        low_viol = -xb
        up_viol = np.where(np.isfinite(ub), xb - ub, -np.inf)
        viol = np.maximum(low_viol, up_viol)
        bad = np.flatnonzero(viol > tol)
        if bad.size == 0:
            return LPStatus.OPTIMAL, it
        if degenerate >= _DEGENERATE_SWITCH:
            r = min(bad, key=lambda i: tab.basis[i])
        else:
            r = bad[np.argmax(viol[bad])]
        below = low_viol[r] >= up_viol[r]
        row = tab.T[r]
        at_up = tab.xN > 0
        # x_B[r] = beta - row @ x_N: to raise it, raise x_j with row_j < 0 or lower x_j with row_j > 0.
        if below:
            eligible = np.where(at_up, row > tol, row < -tol)
        else:
            eligible = np.where(at_up, row < -tol, row > tol)
        idx = np.flatnonzero(eligible)
        if idx.size == 0:
            return LPStatus.INFEASIBLE, it
        ratios = np.abs(tab.d[idx]) / np.abs(row[idx])
        best = ratios.min()
        ties = idx[ratios <= best + tol]
        q = min(ties, key=lambda j: tab.nonbasic[j])
        leave_var = tab.basis[r]
        tab.pivot(r, q)
        tab.xN[q] = 0.0 if below else tab.upper[leave_var]
        it += 1
        degenerate = degenerate + 1 if best <= tol else 0
    return LPStatus.ITERATION_LIMIT, it


def solve(c, A, b, upper=None, tol: float = FEAS_TOL, max_iter: int = 100_000) -> SimplexResult:
    """Maximize ``c @ x`` subject to ``A @ x <= b`` and ``0 <= x <= upper``.

    ``duals`` holds one multiplier per row of ``A``; with no finite upper bounds
    they form an optimal solution of the dual program ``min b @ y, A.T @ y >= c,
    y >= 0``.
    """
    A = np.atleast_2d(np.asarray(A, dtype=float))
    c = np.asarray(c, dtype=float)
    b = np.asarray(b, dtype=float)
    m, nv = A.shape
    upper = np.full(nv, np.inf) if upper is None else np.asarray(upper, float)
    if (upper < 0).any():
        return SimplexResult(LPStatus.INFEASIBLE)
    tab = _Tableau(c, A, b, upper)
    it = 0
    primal_ok = (b >= -tol).all()
    dual_ok = (c <= tol).all()
    if not primal_ok:
        if not dual_ok:
            tab.d[:] = 0.0
            status, it = _dual(tab, tol, max_iter, it)
            if status is not LPStatus.OPTIMAL:
                return SimplexResult(status, iterations=it)
            _reprice(tab, c)
        else:
            status, it = _dual(tab, tol, max_iter, it)
            if status is not LPStatus.OPTIMAL:
                return SimplexResult(status, iterations=it)
    status, it = _primal(tab, tol, max_iter, it)
    if status is not LPStatus.OPTIMAL:
        return SimplexResult(status, iterations=it)
    return _extract(tab, c, A, b, tol, it)


def _reprice(tab: _Tableau, c: np.ndarray) -> None:
    full_c = np.concatenate([c, np.zeros(tab.m)])
    cb = full_c[tab.basis]
    cn = full_c[tab.nonbasic]
    tab.d = cn - tab.T.T @ cb
    tab.z0 = float(cb @ tab.beta)


def _extract(tab: _Tableau, c, A, b, tol, it) -> SimplexResult:
    """Recompute the final vertex from the basis instead of trusting the tableau.

    Basic slacks carry zero dual, so only the square system linking basic
    structural variables to rows with nonbasic slack needs solving.
    """
    m, nv = tab.m, tab.nv
    x = np.zeros(nv)
    at_upper = [v for v, val in zip(tab.nonbasic, tab.xN) if val > 0]
    for v in at_upper:
        x[v] = tab.upper[v]
    structural = [v for v in tab.basis if v < nv]
    basic_slack = {v - nv for v in tab.basis if v >= nv}
    tight = [i for i in range(m) if i not in basic_slack]
    duals = np.zeros(m)
    if structural:
        sub = A[np.ix_(tight, structural)]
        rhs = b[tight] - A[tight] @ x
        try:
            x[structural] = np.linalg.solve(sub, rhs)
            duals[tight] = np.linalg.solve(sub.T, c[structural])
        except np.linalg.LinAlgError as exc:
            raise LPError(f"singular final basis: {exc}") from None
    if (x < -1e-7).any() or (A @ x > b + 1e-7).any():
        raise LPError("final basis is not primal feasible")
    return SimplexResult(
        LPStatus.OPTIMAL,
        x=x,
        duals=duals,
        value=float(c @ x),
        basis=list(tab.basis),
        at_upper=at_upper,
        iterations=it,
    )


# ---------------------------------------------------------------------------
# exact arithmetic helpers


def to_fraction(v: float, max_den: int) -> Fraction:
    return Fraction(float(v)).limit_denominator(max_den)


def reconstruct(values, max_den: int = 10**6) -> list[Fraction]:
    """Nearest rationals with bounded denominators; exactness is checked by callers."""
    return [to_fraction(v, max_den) for v in values]


def solve_exact(rows: list[dict[int, Fraction]], rhs: list[Fraction], size: int) -> list[Fraction]:
    """Gauss-Jordan over the rationals for a square sparse system.

    ``rows[i]`` maps column index to coefficient. Pivots on the sparsest
    available row to limit fill-in. Raises :class:`LPError` when singular.
    """
    rows = [dict(r) for r in rows]
    rhs = list(rhs)
    free_rows = set(range(len(rows)))
    pivot_of: dict[int, int] = {}
    for col in range(size):
        cands = [i for i in free_rows if rows[i].get(col)]
        if not cands:
            raise LPError("singular basis in exact solve")
        r = min(cands, key=lambda i: (len(rows[i]), i))
        free_rows.discard(r)
        pivot_of[col] = r
        p = rows[r][col]
        if p != 1:
            rows[r] = {k: v / p for k, v in rows[r].items()}
            rhs[r] /= p
        prow = rows[r]
        for i in range(len(rows)):
            if i == r:
                continue
            f = rows[i].get(col)
            if not f:
                continue
            ri = rows[i]
            for k, v in prow.items():
                nv = ri.get(k, 0) - f * v
                if nv:
                    ri[k] = nv
                else:
                    ri.pop(k, None)
            rhs[i] -= f * rhs[r]
    return [rhs[pivot_of[col]] for col in range(size)]
