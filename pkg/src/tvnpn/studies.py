"""Monte-Carlo studies: size/power of the tests and ROC comparisons.

Every study is driven by one integer seed; replicate r consumes its own
counter-based stream keyed by (seed, r), so results are reproducible and
independent of evaluation order.  Bandwidth and penalty defaults follow the
usual plug-in rules: h = 0.35 n^{-1/5} for estimation, h = 0.9 n^{-1/5} for
testing, and lam = 0.2 (h^2 + sqrt(log(d / h) / (n h))).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .baselines import kernel_pearson
from .clime import ClimeConfig, inverse_correlation
from .datamodel import Dataset, EvalGrid, Graph, KernelSpec
from .inference import (
    build_score_context,
    edge_test,
    jackknife_variance,
    score,
    std_normal_cdf,
    std_normal_quantile,
    supergraph_test,
    uniform_test,
)
from .kendall import kendall_tau, latent_correlation, pair_summary
from .simgen import SimConfig, knn_graph, roc_points, sample_dataset, truth_path

__all__ = [
    "bandwidth_estimate",
    "bandwidth_test",
    "lambda_rule",
    "wilson_interval",
    "ks_distance_normal",
    "interior_grid",
    "EdgeStudyResult",
    "run_edge_study",
    "GraphStudyResult",
    "run_graph_study",
    "RocStudyResult",
    "run_roc_study",
    "tpr_at_fpr",
    "desk_sim_config",
]


def bandwidth_estimate(n: int, c: float = 0.35) -> float:
    """Plug-in estimation bandwidth c * n^(-1/5)."""
    return c * n ** (-0.2)


def bandwidth_test(n: int, c: float = 0.9) -> float:
    """Plug-in testing bandwidth c * n^(-1/5)."""
    return c * n ** (-0.2)


def lambda_rule(n: int, d: int, h: float, c: float = 0.2) -> float:
    """Penalty rule c * (h^2 + sqrt(log(d / h) / (n h)))."""
    return c * (h * h + math.sqrt(math.log(d / h) / (n * h)))


def wilson_interval(successes: int, trials: int, conf: float = 0.95):
    """Wilson score interval for a binomial proportion."""
    if trials <= 0:
        raise ValueError("trials must be positive")
    z = std_normal_quantile(0.5 + conf / 2.0)
    p = successes / trials
    z2n = z * z / trials
    center = (p + z2n / 2.0) / (1.0 + z2n)
    half = (
        z
        * math.sqrt(p * (1.0 - p) / trials + z2n / (4.0 * trials))
        / (1.0 + z2n)
    )
    return max(0.0, center - half), min(1.0, center + half)


def ks_distance_normal(values) -> float:
    """Kolmogorov-Smirnov distance between the empirical law of ``values``
    and the standard normal."""
    x = np.sort(np.asarray(values, dtype=float))
    n = x.size
    if n == 0:
        raise ValueError("need at least one value")
    cdf = np.array([std_normal_cdf(v) for v in x])
    upper = np.max(np.arange(1, n + 1) / n - cdf)
    lower = np.max(cdf - np.arange(0, n) / n)
    return float(max(upper, lower))


def interior_grid(count: int) -> EvalGrid:
    """``count`` evenly spaced points strictly inside (0, 1):
    k / (count + 1) for k = 1..count."""
    if count < 1:
        raise ValueError("count must be at least 1")
    return EvalGrid(np.arange(1, count + 1) / (count + 1.0))


def _rep_rng(seed: int, rep: int) -> np.random.Generator:
    ss = np.random.SeedSequence(entropy=seed, spawn_key=(rep,))
    return np.random.Generator(np.random.Philox(ss))


def desk_sim_config(d: int, **kwargs) -> SimConfig:
    """A :class:`SimConfig` scaled down proportionally from the reference
    d = 50 / 25 edges / churn 10 shape (edges = d // 2, churn = d // 5)."""
    kwargs.setdefault("n_edges", max(1, d // 2))
    kwargs.setdefault("churn", max(1, d // 5))
    return SimConfig(d=d, **kwargs)


# ---------------------------------------------------------------------------
# single-edge test studies
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class EdgeStudyResult:
    """Per-replicate decisions of the single-edge test plus the signed
    standardized statistics (useful for normality diagnostics)."""

    mu0: float
    n: int
    alpha: float
    rejections: np.ndarray
    signed_stats: np.ndarray
    seed: int

    @property
    def reps(self) -> int:
        return self.rejections.size

    @property
    def rejection_rate(self) -> float:
        return float(self.rejections.mean())

    def wilson(self, conf: float = 0.95):
        return wilson_interval(int(self.rejections.sum()), self.reps, conf)


def run_edge_study(
    n: int,
    d: int,
    mu0: float,
    reps: int,
    seed: int,
    alpha: float = 0.05,
    scheme: str = "gaussian",
    kernel: str = "epanechnikov",
    z0: float = 0.5,
    gamma: float = 0.5,
    method: str = "calibrated-clime",
) -> EdgeStudyResult:
    """Monte-Carlo rejection rate of the edge test for H0: the (1, 2) entry
    vanishes at ``z0``, with that entry forced to ``mu0`` along the entire
    path (mu0 = 0 gives the size, mu0 != 0 the power)."""
    h = bandwidth_test(n)
    kspec = KernelSpec(kernel, h)
    clime_cfg = ClimeConfig(
        lam=lambda_rule(n, d, h), gamma=gamma, method=method
    )
    config = desk_sim_config(
        d, scheme=scheme, force_edge=(0, 1), force_value=mu0
    )
    rejections = np.zeros(reps, dtype=bool)
    signed = np.zeros(reps)
    for r in range(reps):
        rng = _rep_rng(seed, r)
        truth = truth_path(config, rng)
        data = sample_dataset(truth, n, rng)
        ctx = build_score_context(data, kspec, z0, clime_cfg)
        report = edge_test(ctx, 0, 1, alpha=alpha)
        rejections[r] = report.reject
        signed[r] = (
            math.sqrt(n * h)
            * score(ctx, 0, 1)
            / math.sqrt(jackknife_variance(ctx, 0, 1))
        )
    return EdgeStudyResult(
        mu0=mu0,
        n=n,
        alpha=alpha,
        rejections=rejections,
        signed_stats=signed,
        seed=seed,
    )


# ---------------------------------------------------------------------------
# super-graph / uniform test studies
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class GraphStudyResult:
    """Per-replicate decisions of a bootstrap graph test."""

    test: str
    super_k: int
    mu: float
    n: int
    alpha: float
    rejections: np.ndarray
    seed: int
    null_true: bool

    @property
    def reps(self) -> int:
        return self.rejections.size

    @property
    def rejection_rate(self) -> float:
        return float(self.rejections.mean())

    def wilson(self, conf: float = 0.95):
        return wilson_interval(int(self.rejections.sum()), self.reps, conf)


def run_graph_study(
    test: str,
    n: int,
    d: int,
    super_k: int,
    mu: float,
    reps: int,
    seed: int,
    B: int = 500,
    alpha: float = 0.05,
    grid_count: int = 20,
    z0: float = 0.5,
    scheme: str = "gaussian",
    kernel: str = "epanechnikov",
    gamma: float = 0.5,
    method: str = "calibrated-clime",
    two_sided: bool = False,
) -> GraphStudyResult:
    """Monte-Carlo rejection rate of the super-graph test (at ``z0``) or the
    uniform test (over an interior grid of ``grid_count`` points) against
    the k-nearest-neighbour candidate graph.

    ``mu = 0`` draws from the identity model (every candidate is a true
    super-graph); otherwise anchors are Uniform[mu, max(mu + 0.2, 0.9)].
    The null holds when the candidate contains the scaffold (or the truth
    is empty).
    """
    if test not in ("supergraph", "uniform"):
        raise ValueError("test must be 'supergraph' or 'uniform'")
    graph = knn_graph(d, super_k)
    if mu == 0.0:
        config = SimConfig(d=d, identity=True, scheme=scheme)
        null_true = True
    else:
        config = desk_sim_config(
            d, mu_min=mu, mu_max=max(mu + 0.2, 0.9), scheme=scheme
        )
        null_true = super_k >= config.scaffold_k
    h = bandwidth_test(n)
    kspec = KernelSpec(kernel, h)
    clime_cfg = ClimeConfig(
        lam=lambda_rule(n, d, h), gamma=gamma, method=method
    )
    grid = interior_grid(grid_count)
    rejections = np.zeros(reps, dtype=bool)
    for r in range(reps):
        rng = _rep_rng(seed, r)
        truth = truth_path(config, rng)
        data = sample_dataset(truth, n, rng)
        rep_seed = int(rng.integers(0, 2**63 - 1))
        if test == "supergraph":
            summary = pair_summary(data, kspec, z0)
            sigma = latent_correlation(kendall_tau(summary))
            est = inverse_correlation(sigma, clime_cfg, z0=z0)
            report = supergraph_test(
                data, kspec, z0, est.omega, graph,
                alpha=alpha, B=B, seed=rep_seed, two_sided=two_sided,
            )
        else:
            omega_path = []
            for z in grid:
                sigma = latent_correlation(
                    kendall_tau(pair_summary(data, kspec, z))
                )
                omega_path.append(
                    inverse_correlation(sigma, clime_cfg, z0=z).omega
                )
            report = uniform_test(
                data, kspec, grid, omega_path, graph,
                alpha=alpha, B=B, seed=rep_seed, two_sided=two_sided,
            )
        rejections[r] = report.reject
    return GraphStudyResult(
        test=test,
        super_k=super_k,
        mu=mu,
        n=n,
        alpha=alpha,
        rejections=rejections,
        seed=seed,
        null_true=null_true,
    )


# ---------------------------------------------------------------------------
# ROC studies
# ---------------------------------------------------------------------------

ROC_METHODS = ("kendall-clime", "pearson-clime")


def tpr_at_fpr(points, target: float) -> float:
    """Linear interpolation of a sorted ROC curve at ``target`` FPR; the
    curve is anchored at (0, 0) and (1, 1), and ties in FPR keep the best
    TPR."""
    best = {}
    for fpr, tpr in points:
        best[fpr] = max(best.get(fpr, 0.0), tpr)
    xs = [0.0] + sorted(k for k in best if 0.0 < k < 1.0) + [1.0]
    ys = [best.get(0.0, 0.0)] + [best[k] for k in xs[1:-1]] + [best.get(1.0, 1.0)]
    return float(np.interp(target, xs, ys))


@dataclass(frozen=True)
class RocStudyResult:
    """ROC curves per method: ``curves[method][run]`` is a list of
    (FPR, TPR) points (one per penalty value, sorted by FPR)."""

    scheme: str
    n: int
    lambdas: np.ndarray
    curves: dict
    seed: int
    eval_count: int = 10

    def mean_tpr_at(self, method: str, target: float) -> float:
        return float(
            np.mean([tpr_at_fpr(c, target) for c in self.curves[method]])
        )

    def mean_curve(self, method: str):
        pts = np.array(self.curves[method])  # (runs, n_lambda, 2)
        return [(float(f), float(t)) for f, t in pts.mean(axis=0)]


def default_roc_lambdas(count: int = 14) -> np.ndarray:
    """A log-spaced penalty path wide enough to sweep supports from dense
    to empty on correlation-scale inputs."""
    return np.geomspace(0.01, 2.0, count)


def run_roc_study(
    scheme: str,
    n: int,
    d: int,
    runs: int,
    seed: int,
    lambdas=None,
    methods=ROC_METHODS,
    eval_count: int = 10,
    kernel: str = "epanechnikov",
    gamma: float = 0.5,
    support_threshold: float = 1e-8,
) -> RocStudyResult:
    """Support-recovery ROC sweep comparing the rank-based and moment-based
    correlation inputs under a shared calibrated-CLIME stage.

    Each run draws a fresh truth path and dataset, picks ``eval_count``
    evaluation points at random from the observed index values, estimates
    the input matrix once per point, and sweeps the penalty path; curves
    average the per-point true/false positive rates.
    """
    for m in methods:
        if m not in ROC_METHODS:
            raise ValueError(f"unknown method {m!r}")
    if lambdas is None:
        lambdas = default_roc_lambdas()
    lambdas = np.asarray(lambdas, dtype=float)
    h = bandwidth_estimate(n)
    kspec = KernelSpec(kernel, h)
    config = desk_sim_config(d, scheme=scheme)
    curves = {m: [] for m in methods}
    for r in range(runs):
        rng = _rep_rng(seed, r)
        truth = truth_path(config, rng)
        data = sample_dataset(truth, n, rng)
        pick = rng.choice(n, size=eval_count, replace=False)
        eval_z = data.z[pick]
        inputs = {m: [] for m in methods}
        for z in eval_z:
            if "kendall-clime" in methods:
                inputs["kendall-clime"].append(
                    latent_correlation(kendall_tau(pair_summary(data, kspec, z)))
                )
            if "pearson-clime" in methods:
                inputs["pearson-clime"].append(kernel_pearson(data, kspec, z))
        for m in methods:
            per_lambda = []
            for lam in lambdas:
                cfg = ClimeConfig(lam=float(lam), gamma=gamma)
                ests = []
                for z, sig in zip(eval_z, inputs[m]):
                    est = inverse_correlation(sig, cfg, z0=float(z))
                    ests.append((float(z), est.support(support_threshold)))
                per_lambda.append(ests)
            curves[m].append(roc_points(per_lambda, truth))
    return RocStudyResult(
        scheme=scheme,
        n=n,
        lambdas=lambdas,
        curves=curves,
        seed=seed,
        eval_count=eval_count,
    )
