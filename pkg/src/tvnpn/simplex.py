"""A small dense linear-programming solver.

Solves   min c'x   s.t.  A x (<= or =) b,  x >= 0
by the classical two-phase tableau simplex method.  Bland's smallest-index
rule picks both the entering column and the leaving row, which rules out
cycling; an iteration cap proportional to the tableau width is kept as a
numerical backstop.  Problem sizes in this package are tiny (a few dozen
variables), so a dense tableau with vectorized pivots is both simple and
fast.

References
----------
R. G. Bland, "New finite pivoting rules for the simplex method",
Mathematics of Operations Research 2 (1977) 103-107.
V. Chvatal, "Linear Programming", Freeman, 1983 (chapter 3).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = ["LPResult", "lp_solve"]

_PIVOT_TOL = 1e-9


@dataclass(frozen=True)
class LPResult:
    """Outcome of :func:`lp_solve`.

    ``status`` is one of ``"optimal"``, ``"infeasible"``, ``"unbounded"`` or
    ``"iteration_limit"``.  ``x`` and ``objective`` are None unless the
    status is ``"optimal"``; the objective is recomputed as ``c'x`` from the
    original data, not read off the tableau.
    """

    status: str
    x: np.ndarray | None
    objective: float | None
    iterations: int

    @property
    def optimal(self) -> bool:
        return self.status == "optimal"


def _pivot(tab: np.ndarray, basis: np.ndarray, row: int, col: int) -> None:
    tab[row] /= tab[row, col]
    colvals = tab[:, col].copy()
    colvals[row] = 0.0
    tab -= np.outer(colvals, tab[row])
    # Re-assert the exact unit column; subtraction noise otherwise lingers.
    tab[:, col] = 0.0
    tab[row, col] = 1.0
    basis[row] = col


def _bland_step(tab, basis, cost, ncols, tol):
    """One simplex step on the region rows of ``tab`` using reduced costs
    ``cost`` (a view of the last tableau row).  Returns "step", "optimal" or
    "unbounded"."""
    neg = np.flatnonzero(cost[:ncols] < -tol)
    if neg.size == 0:
        return "optimal"
    col = int(neg[0])  # Bland: smallest eligible column index
    colvals = tab[:-1, col]
    rows = np.flatnonzero(colvals > tol)
    if rows.size == 0:
        return "unbounded"
    ratios = tab[:-1, -1][rows] / colvals[rows]
    best = np.min(ratios)
    # Bland: among the minimizing rows, leave on the smallest basis index.
    tied = rows[np.flatnonzero(ratios <= best + tol * (1.0 + abs(best)))]
    row = int(tied[np.argmin(basis[tied])])
    _pivot(tab, basis, row, col)
    return "step"


def lp_solve(c, a_mat, b, senses, maxiter: int | None = None) -> LPResult:
    """Minimize ``c'x`` over ``{x >= 0 : A x (<=|=) b}``.

    Parameters
    ----------
    c : array of shape (n,)
    a_mat : array of shape (m, n)
    b : array of shape (m,)
    senses : sequence of m strings, each ``"<="`` or ``"="``
    maxiter : optional iteration cap; defaults to ``50 * (total columns)``.
    """
    c = np.asarray(c, dtype=float)
    a = np.array(a_mat, dtype=float)
    b = np.array(b, dtype=float)
    m, n = a.shape
    if c.shape != (n,) or b.shape != (m,) or len(senses) != m:
        raise ValueError("inconsistent LP dimensions")
    for s in senses:
        if s not in ("<=", "="):
            raise ValueError(f"unknown row sense {s!r}")

    le_rows = [i for i, s in enumerate(senses) if s == "<="]
    n_slack = len(le_rows)
    ncols = n + n_slack

    full = np.zeros((m, ncols))
    full[:, :n] = a
    for pos, i in enumerate(le_rows):
        full[i, n + pos] = 1.0
    rhs = b.copy()
    flip = rhs < 0.0
    full[flip] *= -1.0
    rhs[flip] *= -1.0

    # Initial basis: the slack of an unflipped <= row; artificials elsewhere.
    basis = np.full(m, -1, dtype=int)
    need_art = []
    for pos, i in enumerate(le_rows):
        if not flip[i]:
            basis[i] = n + pos
    for i in range(m):
        if basis[i] < 0:
            need_art.append(i)
    n_art = len(need_art)
    total = ncols + n_art
    tab = np.zeros((m + 1, total + 1))
    tab[:m, :ncols] = full
    tab[:m, -1] = rhs
    for pos, i in enumerate(need_art):
        tab[i, ncols + pos] = 1.0
        basis[i] = ncols + pos

    if maxiter is None:
        maxiter = 50 * total
    iterations = 0

    # ---- phase 1: drive the artificial variables to zero -----------------
    if n_art:
        art_rows = np.array(need_art, dtype=int)
        tab[-1, :] = -tab[art_rows].sum(axis=0)
        tab[-1, ncols:total] = 0.0
        # Once every artificial is nonbasic the basis is feasible and all
        # phase-1 reduced costs are exactly zero; stopping on that condition
        # instead of the cost row avoids chasing its accumulated pivot
        # round-off (which can even signal "unbounded" on a cost bounded
        # below by zero).
        while np.any(basis >= ncols):
            state = _bland_step(tab, basis, tab[-1], total, _PIVOT_TOL)
            if state == "step":
                iterations += 1
                if iterations > maxiter:
                    return LPResult("iteration_limit", None, None, iterations)
                continue
            break
        # Measure the artificial sum from the solution column, not the
        # drifted cost-row corner.
        art_basic = np.flatnonzero(basis >= ncols)
        phase1 = float(tab[art_basic, -1].sum()) if art_basic.size else 0.0
        if phase1 > 1e-8 * (1.0 + float(np.abs(rhs).max(initial=0.0))):
            return LPResult("infeasible", None, None, iterations)
        # Pivot any artificial still basic (at zero level) out of the basis,
        # or drop its row as redundant.
        keep = np.ones(m, dtype=bool)
        for i in range(m):
            if basis[i] >= ncols:
                cand = np.flatnonzero(np.abs(tab[i, :ncols]) > _PIVOT_TOL)
                if cand.size:
                    _pivot(tab, basis, i, int(cand[0]))
                else:
                    keep[i] = False
        if not np.all(keep):
            tab = np.vstack([tab[:m][keep], tab[-1:]])
            basis = basis[keep]
            m = int(keep.sum())
        tab = np.delete(tab, np.s_[ncols:total], axis=1)

    # ---- phase 2: optimize the real objective ----------------------------
    cost_full = np.zeros(ncols)
    cost_full[:n] = c
    cb = cost_full[basis]
    tab[-1, :ncols] = cost_full - cb @ tab[:m, :ncols]
    tab[-1, -1] = -float(cb @ tab[:m, -1])
    while True:
        state = _bland_step(tab, basis, tab[-1], ncols, _PIVOT_TOL)
        if state == "step":
            iterations += 1
            if iterations > maxiter:
                return LPResult("iteration_limit", None, None, iterations)
            continue
        if state == "unbounded":
            return LPResult("unbounded", None, None, iterations)
        break

    xfull = np.zeros(ncols)
    xfull[basis] = tab[:m, -1]
    x = np.maximum(xfull[:n], 0.0)  # clip pivot round-off at the bound
    return LPResult("optimal", x, float(c @ x), iterations)
