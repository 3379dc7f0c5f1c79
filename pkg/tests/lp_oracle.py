"""Brute-force LP oracle used by the solver and inverse-estimation tests.

Enumerates every basic solution of the slack-augmented standard form
(min c'x, A x (<=|=) b, x >= 0): choose m of the n+slack columns, solve the
square system, keep nonnegative solutions, and take the best objective.
Exponential, but exact up to round-off — only for tiny problems.  The
optimum must be attained at a vertex (bounded feasible problems).
"""

import itertools

import numpy as np

_SING_TOL = 1e-10
_RESID_TOL = 1e-7
_FEAS_TOL = 1e-9


def standard_form(a_mat, senses):
    """Append slack columns for the inequality rows."""
    a = np.asarray(a_mat, dtype=float)
    m, n = a.shape
    le_rows = [i for i, s in enumerate(senses) if s == "<="]
    aug = np.zeros((m, n + len(le_rows)))
    aug[:, :n] = a
    for pos, i in enumerate(le_rows):
        aug[i, n + pos] = 1.0
    return aug


def enumerate_optima(c, a_mat, b, senses):
    """Best vertex objective(s) for one coefficient matrix and one or more
    right-hand sides.

    ``b`` may be ``(m,)`` or ``(m, r)``; returns ``(objs, xs)`` with shapes
    ``(r,)`` and ``(r, n)`` (r = 1 for a single rhs).  Infeasible columns
    get ``np.inf`` objectives and NaN solutions.
    """
    c = np.asarray(c, dtype=float)
    b = np.asarray(b, dtype=float)
    single = b.ndim == 1
    if single:
        b = b[:, None]
    m, r = b.shape
    aug = standard_form(a_mat, senses)
    ncols = aug.shape[1]
    n = c.size
    cfull = np.concatenate([c, np.zeros(ncols - n)])

    combos = np.array(list(itertools.combinations(range(ncols), m)))
    mats = np.swapaxes(aug[:, combos], 0, 1)  # (ncomb, m, m)
    dets = np.linalg.det(mats)
    keep = np.abs(dets) > _SING_TOL
    mats = mats[keep]
    combos = combos[keep]
    k = mats.shape[0]
    if k == 0:
        # Rank-deficient rows (the enumeration needs full row rank).
        objs = np.full(r, np.inf)
        return objs, np.full((r, n), np.nan)

    rhs = np.broadcast_to(b, (k, m, r))
    xb = np.linalg.solve(mats, rhs)  # (k, m, r)
    resid = np.abs(np.einsum("kij,kjr->kir", mats, xb) - rhs).max(axis=1)
    scale = 1.0 + np.abs(b).max()
    ok = (resid <= _RESID_TOL * scale) & (xb.min(axis=1) >= -_FEAS_TOL)
    objs_all = np.einsum("km,kmr->kr", cfull[combos], xb)
    objs_all = np.where(ok, objs_all, np.inf)

    best = objs_all.argmin(axis=0)
    objs = objs_all[best, np.arange(r)]
    xs = np.full((r, n), np.nan)
    for col in range(r):
        if np.isfinite(objs[col]):
            x = np.zeros(ncols)
            x[combos[best[col]]] = np.maximum(xb[best[col], :, col], 0.0)
            xs[col] = x[:n]
    if single:
        return objs, xs
    return objs, xs


def enumerate_optimum(c, a_mat, b, senses):
    """Single-rhs convenience wrapper: returns (objective, x) or
    (None, None) when infeasible."""
    objs, xs = enumerate_optima(c, a_mat, b, senses)
    if not np.isfinite(objs[0]):
        return None, None
    return float(objs[0]), xs[0]
