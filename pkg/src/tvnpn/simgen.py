"""Synthetic time-varying graphical models with piecewise-constant graphs.

The generator builds a ground-truth path of sparse symmetric matrices
``Omega(z)`` on (0, 1) whose support evolves through five graph snapshots:

1. A scaffold graph connects each of d vertices (arranged on a ring) to its
   ``scaffold_k`` nearest neighbours.  The initial snapshot ``G(0)`` picks
   ``n_edges`` scaffold edges at random; each subsequent snapshot removes
   ``churn`` current edges and adds ``churn`` scaffold edges not present
   before, so consecutive snapshots differ in exactly ``2 * churn`` edges.
   Snapshot ``G(l)`` governs the interval [l/5, (l+1)/5).
2. Off-diagonal anchor values are drawn at z in {0, 0.1, ..., 1}: at an
   interval midpoint an edge of that interval's snapshot gets a fresh
   Uniform[mu_min, mu_max] draw; at a boundary between two intervals only
   edges present in *both* adjacent snapshots stay nonzero (z = 0 and z = 1
   use the first and last snapshot).  Between anchors, entries interpolate
   linearly, so the support within an interval never leaves its snapshot.
3. At each z the matrix is shifted to ``Omega(z) + (1 - lambda_min) I``
   (making the smallest eigenvalue exactly one), inverted, and the inverse
   is rescaled to unit diagonal.  Data are drawn as N(0, Sigma(z)) at
   Z ~ Uniform(0, 1), optionally pushed through the Gaussian CDF
   (``gaussian_copula``) or contaminated by replacing a fixed fraction of
   cells with sign-flipped N(contam_mean, contam_var) noise.

``force_edge`` pins one entry to a constant value along the whole path (the
single-edge testing protocol); the pair is excluded from the random
snapshot churn and, when the forced value is nonzero, added to every
snapshot.  ``identity=True`` short-circuits everything to Omega(z) = I.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.special import ndtr

from .datamodel import Dataset, Graph

__all__ = [
    "SCHEMES",
    "SimConfig",
    "TruthPath",
    "knn_graph",
    "anchor_graphs",
    "truth_path",
    "sample_dataset",
    "roc_point",
    "roc_points",
]

SCHEMES = ("gaussian", "gaussian_copula", "contaminated_2pct", "contaminated_5pct")
_CONTAM_FRAC = {"contaminated_2pct": 0.02, "contaminated_5pct": 0.05}

# Entries of the interpolated anchor matrices below this magnitude count as
# structural zeros (guards against round-off when z falls on a tenth).
_SUPPORT_EPS = 1e-12


def _as_generator(rng) -> np.random.Generator:
    if isinstance(rng, np.random.Generator):
        return rng
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(rng)))


def knn_graph(d: int, k: int) -> Graph:
    """Ring graph joining each vertex to its k nearest neighbours
    (k/2 on each side); k must be even and small enough that the
    neighbourhoods do not wrap into each other."""
    if k < 0 or k % 2 != 0:
        raise ValueError(f"k must be even and nonnegative, got {k}")
    half = k // 2
    if half > (d - 1) // 2:
        raise ValueError(f"k={k} too large for d={d}")
    edges = set()
    for i in range(d):
        for step in range(1, half + 1):
            edges.add(tuple(sorted((i, (i + step) % d))))
    return Graph(d, frozenset(edges))


@dataclass(frozen=True)
class SimConfig:
    """Knobs of the synthetic model; defaults match the reference scale
    (d = 50 with 25 edges churning by 10 per snapshot)."""

    d: int = 50
    n_edges: int = 25
    scaffold_k: int = 4
    churn: int = 10
    mu_min: float = 0.5
    mu_max: float = 0.9
    scheme: str = "gaussian"
    contam_mean: float = 3.0
    contam_var: float = 3.0
    identity: bool = False
    force_edge: tuple | None = None
    force_value: float = 0.0

    def __post_init__(self):
        if self.d < 2:
            raise ValueError("d must be at least 2")
        if self.scheme not in SCHEMES:
            raise ValueError(f"scheme must be one of {SCHEMES}")
        if not (0.0 < self.mu_min <= self.mu_max):
            raise ValueError("need 0 < mu_min <= mu_max")
        if self.contam_var <= 0.0:
            raise ValueError("contam_var must be positive")
        if self.force_edge is not None:
            j, k = self.force_edge
            j, k = int(j), int(k)
            if j == k or not (0 <= j < self.d and 0 <= k < self.d):
                raise ValueError(f"bad force_edge {self.force_edge!r}")
            object.__setattr__(self, "force_edge", (min(j, k), max(j, k)))
            if not np.isfinite(self.force_value):
                raise ValueError("force_value must be finite")
        if self.identity:
            return
        scaffold = knn_graph(self.d, self.scaffold_k).num_edges
        if self.force_edge is not None:
            scaffold -= 1  # the forced pair is handled outside the churn
        if not (0 <= self.churn <= self.n_edges):
            raise ValueError("need 0 <= churn <= n_edges")
        if self.n_edges + self.churn > scaffold:
            raise ValueError(
                f"scaffold has only {scaffold} usable edges; cannot pick "
                f"{self.n_edges} and still add {self.churn} fresh ones"
            )


def anchor_graphs(config: SimConfig, rng) -> list:
    """The five graph snapshots (deterministic given the generator state)."""
    rng = _as_generator(rng)
    d = config.d
    if config.identity:
        return [Graph.empty(d)] * 5
    scaffold = sorted(knn_graph(d, config.scaffold_k).edges)
    forced = config.force_edge
    if forced is not None:
        scaffold = [e for e in scaffold if e != forced]
    include = (
        frozenset([forced]) if forced is not None and config.force_value != 0.0
        else frozenset()
    )
    idx = rng.choice(len(scaffold), size=config.n_edges, replace=False)
    current = set(scaffold[i] for i in idx)
    graphs = [Graph(d, frozenset(current) | include)]
    for _ in range(4):
        cur_sorted = sorted(current)
        drop = rng.choice(len(cur_sorted), size=config.churn, replace=False)
        removed = set(cur_sorted[i] for i in drop)
        pool = [e for e in scaffold if e not in current]
        grow = rng.choice(len(pool), size=config.churn, replace=False)
        current = (current - removed) | set(pool[i] for i in grow)
        graphs.append(Graph(d, frozenset(current) | include))
    return graphs


def _governing_edges(graphs, t: int) -> frozenset:
    """Edge set steering anchor t (z = t/10): the interval's snapshot at
    midpoints and endpoints, the intersection of the two adjacent snapshots
    at interval boundaries."""
    if t == 0:
        return graphs[0].edges
    if t == 10:
        return graphs[4].edges
    if t % 2 == 1:
        return graphs[(t - 1) // 2].edges
    return graphs[t // 2 - 1].edges & graphs[t // 2].edges


@dataclass(frozen=True)
class TruthPath:
    """Ground-truth path: five snapshots plus eleven anchor matrices.

    ``anchor_omegas[t]`` holds the off-diagonal entries at z = t/10 with a
    zero diagonal; the positive-definite shift happens inside
    :meth:`omega_of`, so stored anchors expose the raw support.
    """

    config: SimConfig
    graphs: list
    anchor_omegas: np.ndarray

    @property
    def d(self) -> int:
        return self.config.d

    def graph_of(self, z: float) -> Graph:
        """Snapshot governing z (piecewise constant on fifths)."""
        if not (0.0 <= z <= 1.0):
            raise ValueError(f"z={z!r} outside [0, 1]")
        level = min(int(np.floor(z * 5.0 + 1e-12)), 4)
        return self.graphs[level]

    def _interp(self, zs: np.ndarray) -> np.ndarray:
        zs = np.asarray(zs, dtype=float)
        ti = np.minimum(np.floor(zs * 10.0 + 1e-12).astype(int), 9)
        w = np.clip(zs * 10.0 - ti, 0.0, 1.0)
        a = self.anchor_omegas
        return (1.0 - w)[:, None, None] * a[ti] + w[:, None, None] * a[ti + 1]

    def omegas_of(self, zs) -> np.ndarray:
        """Shifted matrices ``M(z) + (1 - lambda_min(M(z))) I`` for a batch
        of index values; each result has smallest eigenvalue exactly one."""
        m = self._interp(np.atleast_1d(np.asarray(zs, dtype=float)))
        lam_min = np.linalg.eigvalsh(m)[:, 0]
        shift = 1.0 - lam_min
        out = m.copy()
        idx = np.arange(self.d)
        out[:, idx, idx] += shift[:, None]
        return out

    def omega_of(self, z: float) -> np.ndarray:
        return self.omegas_of([z])[0]

    def sigmas_of(self, zs) -> np.ndarray:
        """Unit-diagonal inverses of :meth:`omegas_of` (the latent
        correlation path)."""
        sig = np.linalg.inv(self.omegas_of(zs))
        dg = np.sqrt(np.einsum("mii->mi", sig))
        sig = sig / dg[:, :, None] / dg[:, None, :]
        return 0.5 * (sig + sig.transpose(0, 2, 1))

    def sigma_of(self, z: float) -> np.ndarray:
        return self.sigmas_of([z])[0]

    def edges_of(self, z: float) -> Graph:
        """Support of the interpolated anchor matrix at z."""
        m = self._interp(np.array([float(z)]))[0]
        d = self.d
        edges = [
            (j, k)
            for j in range(d)
            for k in range(j + 1, d)
            if abs(m[j, k]) > _SUPPORT_EPS
        ]
        return Graph(d, frozenset(edges))

    def to_json(self) -> dict:
        cfg = self.config
        return {
            "d": cfg.d,
            "config": {
                "n_edges": cfg.n_edges,
                "scaffold_k": cfg.scaffold_k,
                "churn": cfg.churn,
                "mu_min": cfg.mu_min,
                "mu_max": cfg.mu_max,
                "scheme": cfg.scheme,
                "contam_mean": cfg.contam_mean,
                "contam_var": cfg.contam_var,
                "identity": cfg.identity,
                "force_edge": (
                    None
                    if cfg.force_edge is None
                    else [cfg.force_edge[0] + 1, cfg.force_edge[1] + 1]
                ),
                "force_value": cfg.force_value,
            },
            "graphs": [g.to_json()["edges"] for g in self.graphs],
            "anchor_omegas": self.anchor_omegas.tolist(),
        }


def truth_path(config: SimConfig, rng) -> TruthPath:
    """Draw a ground-truth path.

    Generator consumption order (fixed for reproducibility): snapshot
    sampling first (initial edges, then per-snapshot removals and
    additions), then anchor values for t = 0..10, each anchor's governed
    edges visited in sorted order.
    """
    rng = _as_generator(rng)
    d = config.d
    graphs = anchor_graphs(config, rng)
    anchors = np.zeros((11, d, d))
    if not config.identity:
        for t in range(11):
            edges = sorted(_governing_edges(graphs, t))
            if config.force_edge is not None:
                edges = [e for e in edges if e != config.force_edge]
            if edges:
                vals = rng.uniform(config.mu_min, config.mu_max, size=len(edges))
                for (j, k), v in zip(edges, vals):
                    anchors[t, j, k] = v
                    anchors[t, k, j] = v
        if config.force_edge is not None and config.force_value != 0.0:
            j, k = config.force_edge
            anchors[:, j, k] = config.force_value
            anchors[:, k, j] = config.force_value
    return TruthPath(config=config, graphs=graphs, anchor_omegas=anchors)


def sample_dataset(truth: TruthPath, n: int, rng) -> Dataset:
    """Draw ``n`` samples from the path under ``truth.config.scheme``.

    Generator consumption order: index values Z (re-drawing the measure-zero
    hits of {0, 1}), then the standard normal block, then -- for the
    contaminated schemes -- cell indices, replacement magnitudes, and signs.
    """
    if n < 2:
        raise ValueError("need at least two samples")
    rng = _as_generator(rng)
    d = truth.d
    z = rng.uniform(0.0, 1.0, size=n)
    bad = (z <= 0.0) | (z >= 1.0)
    while np.any(bad):
        z[bad] = rng.uniform(0.0, 1.0, size=int(bad.sum()))
        bad = (z <= 0.0) | (z >= 1.0)
    chol = np.linalg.cholesky(truth.sigmas_of(z))
    g = rng.standard_normal((n, d))
    x = np.einsum("nij,nj->ni", chol, g)
    scheme = truth.config.scheme
    if scheme == "gaussian_copula":
        x = ndtr(x)
    elif scheme in _CONTAM_FRAC:
        n_cells = int(round(_CONTAM_FRAC[scheme] * n * d))
        if n_cells:
            flat = rng.choice(n * d, size=n_cells, replace=False)
            mags = rng.normal(
                truth.config.contam_mean,
                np.sqrt(truth.config.contam_var),
                size=n_cells,
            )
            signs = 2.0 * rng.integers(0, 2, size=n_cells) - 1.0
            x.flat[flat] = signs * mags
    return Dataset(x, z)


# ---------------------------------------------------------------------------
# ROC bookkeeping
# ---------------------------------------------------------------------------


def roc_point(estimates, truth: TruthPath):
    """Average (FPR, TPR) of estimated graphs against the truth.

    ``estimates`` is an iterable of ``(z, Graph)`` pairs (one estimate per
    evaluation point, all at a common penalty level).
    """
    tprs, fprs = [], []
    for z, g in estimates:
        true_edges = truth.edges_of(z).edges
        total = truth.d * (truth.d - 1) // 2
        if not true_edges:
            raise ValueError(f"truth edge set is empty at z={z}: TPR undefined")
        if len(true_edges) == total:
            raise ValueError(f"truth graph is complete at z={z}: FPR undefined")
        hits = len(g.edges & true_edges)
        false = len(g.edges - true_edges)
        tprs.append(hits / len(true_edges))
        fprs.append(false / (total - len(true_edges)))
    if not tprs:
        raise ValueError("no estimates supplied")
    return float(np.mean(fprs)), float(np.mean(tprs))


def roc_points(per_lambda, truth: TruthPath):
    """One averaged (FPR, TPR) point per penalty level, sorted by FPR."""
    return sorted(roc_point(est, truth) for est in per_lambda)
