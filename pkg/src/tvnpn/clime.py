"""Constrained L1 inversion of a correlation matrix, column by column.

Two variants are provided.  Plain CLIME solves, for each unit vector e_j,

    min ||beta||_1   s.t.  ||Sigma beta - e_j||_inf <= lam,

while the calibrated variant makes the residual budget scale-adaptive by
introducing an auxiliary variable kappa bounding ||beta||_1:

    min ||beta||_1 + gamma * kappa
    s.t. ||Sigma beta - e_j||_inf <= lam * kappa,   ||beta||_1 <= kappa,

with gamma in (0, 1).  Both are linear programs after the split
beta = beta_plus - beta_minus with nonnegative parts, and are solved with
the embedded dense simplex (:mod:`tvnpn.simplex`); no external LP solver is
involved.  Columns are estimated independently, so the raw matrix of
solutions need not be symmetric; the ``min_magnitude`` rule keeps, for each
unordered pair, the entry of smaller absolute value.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .datamodel import Graph, validate_symmetric
from .simplex import lp_solve

__all__ = [
    "ClimeInfeasibleError",
    "ClimeNumericalError",
    "ClimeConfig",
    "InverseEstimate",
    "clime_column",
    "calibrated_clime_column",
    "inverse_correlation",
    "min_magnitude_symmetrize",
]

METHODS = ("clime", "calibrated-clime")


class ClimeInfeasibleError(RuntimeError):
    """The column LP has no feasible point (possible for tiny lam when the
    input matrix is singular)."""


class ClimeNumericalError(RuntimeError):
    """The LP solver failed, or the returned solution violates its
    constraints beyond ``feasibility_tol``."""


@dataclass(frozen=True)
class ClimeConfig:
    """Solver settings shared by all columns.

    ``lam`` is the residual budget, ``gamma`` the calibration weight (only
    used by ``calibrated-clime``), ``feasibility_tol`` the post-solve
    constraint check, and ``symmetrize`` either ``"min_magnitude"`` or
    ``"none"``.
    """

    lam: float
    gamma: float = 0.5
    method: str = "calibrated-clime"
    feasibility_tol: float = 1e-8
    symmetrize: str = "min_magnitude"

    def __post_init__(self):
        if not (np.isfinite(self.lam) and self.lam >= 0.0):
            raise ValueError(f"lam must be >= 0, got {self.lam!r}")
        if not (0.0 < self.gamma < 1.0):
            raise ValueError(f"gamma must be in (0, 1), got {self.gamma!r}")
        if self.method not in METHODS:
            raise ValueError(f"method must be one of {METHODS}")
        if self.symmetrize not in ("min_magnitude", "none"):
            raise ValueError("symmetrize must be 'min_magnitude' or 'none'")


def clime_column(sigma: np.ndarray, j: int, lam: float):
    """Solve the plain CLIME program for column ``j``.

    Returns ``(beta, objective)`` where ``objective = ||beta||_1``.
    """
    sigma = np.asarray(sigma, dtype=float)
    d = sigma.shape[0]
    ej = np.zeros(d)
    ej[j] = 1.0
    # variables [beta+, beta-] >= 0; rows encode  +/- (Sigma beta - e_j) <= lam
    c = np.ones(2 * d)
    a = np.block([[sigma, -sigma], [-sigma, sigma]])
    b = np.concatenate([ej + lam, lam - ej])
    res = lp_solve(c, a, b, ["<="] * (2 * d))
    if res.status == "infeasible":
        raise ClimeInfeasibleError(
            f"column {j}: no beta with ||Sigma beta - e_j||_inf <= {lam}"
        )
    if not res.optimal:
        raise ClimeNumericalError(f"column {j}: LP ended with {res.status!r}")
    beta = res.x[:d] - res.x[d:]
    return beta, float(res.objective)


def calibrated_clime_column(sigma: np.ndarray, j: int, lam: float, gamma: float):
    """Solve the calibrated program for column ``j``.

    Returns ``(beta, kappa, objective)`` with
    ``objective = ||beta||_1 + gamma * kappa``.
    """
    sigma = np.asarray(sigma, dtype=float)
    d = sigma.shape[0]
    ej = np.zeros(d)
    ej[j] = 1.0
    # variables [beta+, beta-, kappa] >= 0
    c = np.concatenate([np.ones(2 * d), [gamma]])
    lam_col = np.full((d, 1), -lam)
    top = np.hstack([sigma, -sigma, lam_col])
    mid = np.hstack([-sigma, sigma, lam_col])
    bot = np.concatenate([np.ones(2 * d), [-1.0]])[None, :]
    a = np.vstack([top, mid, bot])
    b = np.concatenate([ej, -ej, [0.0]])
    res = lp_solve(c, a, b, ["<="] * (2 * d + 1))
    if res.status == "infeasible":
        raise ClimeInfeasibleError(f"column {j}: calibrated LP infeasible")
    if not res.optimal:
        raise ClimeNumericalError(f"column {j}: LP ended with {res.status!r}")
    beta = res.x[:d] - res.x[d:2 * d]
    kappa = float(res.x[2 * d])
    return beta, kappa, float(res.objective)


def min_magnitude_symmetrize(omega: np.ndarray) -> np.ndarray:
    """For each unordered pair keep the entry of smaller magnitude (upper
    triangle wins exact ties); the diagonal is left untouched."""
    omega = np.asarray(omega, dtype=float)
    out = omega.copy()
    iu, ju = np.triu_indices(omega.shape[0], 1)
    upper = omega[iu, ju]
    lower = omega[ju, iu]
    keep = np.where(np.abs(upper) <= np.abs(lower), upper, lower)
    out[iu, ju] = keep
    out[ju, iu] = keep
    return out


@dataclass(frozen=True)
class InverseEstimate:
    """Column-wise inverse-correlation estimate.

    ``omega`` holds the raw (possibly asymmetric) columns: ``omega[:, j]``
    is the solution of the j-th program.  ``kappa`` is the per-column
    calibration level (``||beta||_1`` for plain CLIME), ``objective`` the
    per-column LP objective, and ``max_violation`` the largest residual
    constraint violation across columns (always within
    ``config.feasibility_tol``).
    """

    omega: np.ndarray
    kappa: np.ndarray
    objective: np.ndarray
    config: ClimeConfig
    max_violation: float
    z0: float | None = None

    def symmetrized(self) -> np.ndarray:
        if self.config.symmetrize == "min_magnitude":
            return min_magnitude_symmetrize(self.omega)
        return self.omega.copy()

    def support(self, threshold: float = 1e-8) -> Graph:
        """Graph of off-diagonal entries of the symmetrized estimate with
        magnitude above ``threshold``."""
        sym = self.symmetrized()
        d = sym.shape[0]
        edges = [
            (j, k)
            for j in range(d)
            for k in range(j + 1, d)
            if abs(sym[j, k]) > threshold
        ]
        return Graph(d, frozenset(edges))


def inverse_correlation(
    sigma: np.ndarray, config: ClimeConfig, z0: float | None = None
) -> InverseEstimate:
    """Estimate all columns of the inverse of ``sigma`` under ``config``.

    ``sigma`` must be symmetric (the latent correlation path produces a
    unit diagonal, but any symmetric matrix -- e.g. a raw kernel-weighted
    second-moment matrix -- is accepted).  Each returned column is
    re-checked against its constraints; a violation beyond
    ``config.feasibility_tol`` raises :class:`ClimeNumericalError`.
    """
    sigma = validate_symmetric(sigma, name="sigma", tol=1e-8)
    d = sigma.shape[0]
    omega = np.empty((d, d))
    kappa = np.empty(d)
    objective = np.empty(d)
    worst = 0.0
    for j in range(d):
        if config.method == "clime":
            beta, obj = clime_column(sigma, j, config.lam)
            kap = float(np.abs(beta).sum())
            budget = config.lam
        else:
            beta, kap, obj = calibrated_clime_column(
                sigma, j, config.lam, config.gamma
            )
            budget = config.lam * kap
            l1_excess = float(np.abs(beta).sum()) - kap
            if l1_excess > config.feasibility_tol:
                raise ClimeNumericalError(
                    f"column {j}: ||beta||_1 exceeds kappa by {l1_excess:.3e}"
                )
        resid = sigma @ beta
        resid[j] -= 1.0
        viol = float(np.abs(resid).max()) - budget
        if viol > config.feasibility_tol:
            raise ClimeNumericalError(
                f"column {j}: residual violates the budget by {viol:.3e}"
            )
        worst = max(worst, viol)
        omega[:, j] = beta
        kappa[j] = kap
        objective[j] = obj
    return InverseEstimate(
        omega=omega,
        kappa=kappa,
        objective=objective,
        config=config,
        max_violation=worst,
        z0=z0,
    )
