"""Moment-based baselines: kernel-weighted Pearson matrix and kernel-local
neighborhood selection.

These deliberately operate on raw observations (second moments, squared
residuals), so unlike the rank-based path they are *not* invariant to
monotone marginal transforms and are sensitive to heavy-tailed
contamination -- which is exactly the comparison they exist to support.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .datamodel import Dataset, Graph, KernelSpec, kernel_eval, kernel_weights
from .kendall import DegenerateWindowError

__all__ = [
    "LassoConfig",
    "kernel_pearson",
    "kernel_neighborhood_column",
    "neighborhood_graph",
]


def kernel_pearson(data: Dataset, spec: KernelSpec, z0: float) -> np.ndarray:
    """Kernel-weighted second-moment matrix at ``z0``:

        sum_i K_h(z_i - z0) x_i x_i' / sum_i K_h(z_i - z0).

    No centering or standardization is applied; the raw moments go straight
    into downstream estimators.
    """
    if not (0.0 < z0 < 1.0):
        raise ValueError(f"z0={z0!r} must lie strictly inside (0, 1)")
    w = kernel_weights(spec, data.z - z0)
    total = float(w.sum())
    if total <= 0.0:
        raise DegenerateWindowError(
            f"zero total kernel weight at z0={z0} (h={spec.h})"
        )
    xw = data.x * w[:, None]
    out = xw.T @ data.x / total
    return 0.5 * (out + out.T)


@dataclass(frozen=True)
class LassoConfig:
    """Penalty and stopping rule for the weighted lasso column solver."""

    lam: float
    max_iter: int = 1000
    tol: float = 1e-8

    def __post_init__(self):
        if not (np.isfinite(self.lam) and self.lam >= 0.0):
            raise ValueError(f"lam must be >= 0, got {self.lam!r}")
        if self.max_iter < 1 or self.tol <= 0.0:
            raise ValueError("max_iter must be >= 1 and tol > 0")


def kernel_neighborhood_column(
    data: Dataset, spec: KernelSpec, z0: float, j: int, config: LassoConfig
) -> np.ndarray:
    """Locally weighted lasso regression of variable ``j`` on the rest.

    Minimizes

        (n h)^{-1} sum_i K((z_i - z0) / h) (x_ij - x_{i,-j} beta)^2
        + lam ||beta||_1

    by cyclic coordinate descent with soft-thresholding, keeping running
    residuals; convergence is declared when the largest coordinate change
    in a sweep drops below ``config.tol``.  Returns the (d-1,) coefficient
    vector over the remaining variables in ascending index order.
    """
    n, d = data.n, data.d
    if not (0 <= j < d):
        raise ValueError(f"j={j} out of range")
    w = kernel_eval(spec, (data.z - z0) / spec.h)
    if float(w.sum()) <= 0.0:
        raise DegenerateWindowError(
            f"zero total kernel weight at z0={z0} (h={spec.h})"
        )
    scale = 2.0 / (n * spec.h)
    others = [c for c in range(d) if c != j]
    xo = data.x[:, others]
    y = data.x[:, j]
    wx = w[:, None] * xo
    a_diag = scale * np.einsum("ic,ic->c", wx, xo)  # curvature per coordinate
    beta = np.zeros(d - 1)
    resid = y.copy()  # y - xo @ beta, maintained incrementally
    lam = config.lam
    for _ in range(config.max_iter):
        delta = 0.0
        for c in range(d - 1):
            if a_diag[c] <= 0.0:
                continue
            old = beta[c]
            rho = scale * float(wx[:, c] @ resid) + a_diag[c] * old
            new = np.sign(rho) * max(abs(rho) - lam, 0.0) / a_diag[c]
            if new != old:
                resid += xo[:, c] * (old - new)
                beta[c] = new
                delta = max(delta, abs(new - old))
        if delta < config.tol:
            break
    return beta


def neighborhood_graph(
    data: Dataset, spec: KernelSpec, z0: float, config: LassoConfig
) -> Graph:
    """Assemble a graph from all column regressions with the OR rule: an
    edge is present when either endpoint selects the other."""
    d = data.d
    edges = set()
    for j in range(d):
        beta = kernel_neighborhood_column(data, spec, z0, j, config)
        others = [c for c in range(d) if c != j]
        for pos, k in enumerate(others):
            if beta[pos] != 0.0:
                edges.add((min(j, k), max(j, k)))
    return Graph(d, frozenset(edges))
