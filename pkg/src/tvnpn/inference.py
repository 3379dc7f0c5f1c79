"""Post-regularization inference: edge test, super-graph test, uniform test.

All three tests are built from the same de-biased score.  Given the latent
correlation estimate ``sigma`` and a column-wise inverse estimate ``omega``
(consumed raw, *not* symmetrized), the score for an ordered pair (j, k) is

    score(j, k) = omega[:, j]' (sigma @ omega_kj - e_k),

where ``omega_kj`` is column k with its j-th entry set to zero.  Zeroing
makes the score insensitive to the tested entry itself: plugging in exact
population quantities gives score(j, k) = -Omega[j, k], so the score
vanishes exactly on the tested null.

* The edge test studentizes sqrt(n h) * score with a leave-one-out variance
  built from the pair-weight row sums and compares against a standard
  normal quantile (two-sided).
* The super-graph test takes the largest score over all non-edges of a
  candidate graph at one index point and calibrates it with a Gaussian
  multiplier bootstrap on the pair-weight row sums.
* The uniform test takes the supremum of the same quantity over a grid of
  index points, sharing one multiplier vector per replicate across the
  whole grid.

Bootstrap replicates perturb the pair-weight row sums with i.i.d. standard
normal multipliers and push the perturbed tau through the sine transform
expanded to first order around the observed tau; multiplied by the
perturbed mean pair weight, the perturbation's denominator cancels
exactly, leaving a centered multiplier sum on the same variance scale the
edge test's leave-one-out estimate measures (see :func:`bootstrap_draw`
for why the raw sine of the perturbed tau would not work).

Multiplier vectors are drawn from per-replicate counter-based streams
(Philox keyed by (seed, replicate)), so results are reproducible for a
fixed (seed, B) regardless of batching.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np

from .datamodel import Dataset, EvalGrid, Graph, KernelSpec
from .clime import ClimeConfig, inverse_correlation
from .kendall import (
    PairSummary,
    TauEstimate,
    kendall_tau,
    latent_correlation,
    pair_summary,
)

__all__ = [
    "ZeroVarianceError",
    "BootstrapDegenerateError",
    "TestReport",
    "ScoreContext",
    "BootstrapDraw",
    "std_normal_cdf",
    "std_normal_quantile",
    "build_score_context",
    "score",
    "score_matrix",
    "jackknife_variance",
    "edge_test",
    "bootstrap_draw",
    "bootstrap_quantile",
    "supergraph_statistic",
    "supergraph_test",
    "uniform_statistic",
    "uniform_test",
]

# Relative floor below which a bootstrap denominator counts as degenerate.
_DEGENERATE_REL = 1e-12
# Cache cap (in floats) for per-grid-point summaries inside uniform_test.
_CACHE_ELEMS = 40_000_000


class ZeroVarianceError(RuntimeError):
    """The leave-one-out variance estimate is exactly zero."""


class BootstrapDegenerateError(RuntimeError):
    """More than B/10 bootstrap replicates had a degenerate denominator."""


# ---------------------------------------------------------------------------
# standard normal helpers
# ---------------------------------------------------------------------------


def std_normal_cdf(x: float) -> float:
    """Phi(x) via the complementary error function."""
    return 0.5 * math.erfc(-x / math.sqrt(2.0))


_ACKLAM_A = (
    -3.969683028665376e01, 2.209460984245205e02, -2.759285104469687e02,
    1.383577518672690e02, -3.066479806614716e01, 2.506628277459239e00,
)
_ACKLAM_B = (
    -5.447609879822406e01, 1.615858368580409e02, -1.556989798598866e02,
    6.680131188771972e01, -1.328068155288572e01,
)
_ACKLAM_C = (
    -7.784894002430293e-03, -3.223964580411365e-01, -2.400758277161838e00,
    -2.549732539343734e00, 4.374664141464968e00, 2.938163982698783e00,
)
_ACKLAM_D = (
    7.784695709041462e-03, 3.224671290700398e-01, 2.445134137142996e00,
    3.754408661907416e00,
)


def std_normal_quantile(p: float) -> float:
    """Inverse standard normal CDF.

    Acklam's rational initializer refined by one Halley step against the
    erfc-based CDF; absolute error is far below 1e-8 across (0, 1).
    """
    if not (0.0 < p < 1.0):
        raise ValueError(f"p must be strictly inside (0, 1), got {p!r}")
    a, b, c, d = _ACKLAM_A, _ACKLAM_B, _ACKLAM_C, _ACKLAM_D
    plow = 0.02425
    if p < plow:
        q = math.sqrt(-2.0 * math.log(p))
        x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) / (
            (((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0
        )
    elif p <= 1.0 - plow:
        q = p - 0.5
        r = q * q
        x = (
            (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5])
            * q
            / (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0)
        )
    else:
        q = math.sqrt(-2.0 * math.log1p(-p))
        x = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) / (
            (((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0
        )
    # One Halley refinement.
    err = std_normal_cdf(x) - p
    u = err * math.sqrt(2.0 * math.pi) * math.exp(0.5 * x * x)
    return x - u / (1.0 + 0.5 * x * u)


# ---------------------------------------------------------------------------
# reports
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class TestReport:
    """Decision record shared by the three tests.

    ``reject`` always means ``statistic > threshold``.  ``replicates``
    (bootstrap statistics, when applicable) is kept for diagnostics but not
    serialized; the JSON form carries ``n_replicates`` instead.
    """

    kind: str
    statistic: float
    threshold: float
    alpha: float
    reject: bool
    p_value: float | None = None
    variance: float | None = None
    n_replicates: int | None = None
    degenerate_replicates: int | None = None
    seed: int | None = None
    replicates: np.ndarray | None = None

    def to_dict(self) -> dict:
        out = {
            "kind": self.kind,
            "statistic": float(self.statistic),
            "threshold": float(self.threshold),
            "alpha": float(self.alpha),
            "reject": bool(self.reject),
            "n_replicates": self.n_replicates,
            "degenerate_replicates": self.degenerate_replicates,
            "seed": self.seed,
        }
        if self.p_value is not None:
            out["p_value"] = float(self.p_value)
        if self.variance is not None:
            out["variance"] = float(self.variance)
        return out

    def to_json(self, **kwargs) -> str:
        return json.dumps(self.to_dict(), **kwargs)

    @classmethod
    def from_json(cls, text: str) -> "TestReport":
        obj = json.loads(text)
        return cls(
            kind=obj["kind"],
            statistic=obj["statistic"],
            threshold=obj["threshold"],
            alpha=obj["alpha"],
            reject=obj["reject"],
            p_value=obj.get("p_value"),
            variance=obj.get("variance"),
            n_replicates=obj.get("n_replicates"),
            degenerate_replicates=obj.get("degenerate_replicates"),
            seed=obj.get("seed"),
        )


# ---------------------------------------------------------------------------
# scores
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ScoreContext:
    """Everything the tests need at one evaluation point, all derived from
    the same dataset/kernel/z0: the pair summary, tau, the latent
    correlation, and the raw (unsymmetrized) inverse estimate."""

    z0: float
    summary: PairSummary
    tau: TauEstimate
    sigma: np.ndarray
    omega: np.ndarray


def build_score_context(
    data: Dataset, spec: KernelSpec, z0: float, config: ClimeConfig
) -> ScoreContext:
    summary = pair_summary(data, spec, z0)
    tau = kendall_tau(summary)
    sigma = latent_correlation(tau)
    est = inverse_correlation(sigma, config, z0=z0)
    return ScoreContext(z0=float(z0), summary=summary, tau=tau, sigma=sigma,
                        omega=est.omega)


def score(ctx: ScoreContext, j: int, k: int) -> float:
    """De-biased score for the ordered pair (j, k), j != k."""
    if j == k:
        raise ValueError("score requires j != k")
    omega = ctx.omega
    col_kj = omega[:, k].copy()
    col_kj[j] = 0.0
    resid = ctx.sigma @ col_kj
    resid[k] -= 1.0
    return float(omega[:, j] @ resid)


def score_matrix(sigma: np.ndarray, omega: np.ndarray) -> np.ndarray:
    """All ordered-pair scores at once.

    Writing A = omega' sigma, the zeroed-column score expands to

        score(j, k) = (A omega)[j, k] - A[j, j] omega[j, k] - omega[k, j],

    which is what this computes; entry (j, j) is meaningless.
    """
    a = omega.T @ sigma
    m = a @ omega
    return m - np.diag(a)[:, None] * omega - omega.T


def jackknife_variance(ctx: ScoreContext, j: int, k: int) -> float:
    """Leave-one-out variance of sqrt(n h) * score(j, k).

    Each sample's centered pair-weight row

        q_s = sqrt(h) / (n - 1) * (s_row[s] - tau * w_row[s])

    is mapped through the derivative of the sine transform,
    theta_s = pi * cos(pi/2 * tau) * q_s, and sandwiched between the raw
    inverse columns j and k (k not zeroed); the variance is the mean square
    scaled by the squared mean pair weight.
    """
    if j == k:
        raise ValueError("jackknife_variance requires j != k")
    s = ctx.summary
    tau = ctx.tau.tau
    n = s.n
    q = (math.sqrt(s.h) / (n - 1)) * (
        s.s_row - tau[None, :, :] * s.w_row[:, None, None]
    )
    theta = (np.pi * np.cos(0.5 * np.pi * tau))[None, :, :] * q
    v = np.einsum("sjk,j,k->s", theta, ctx.omega[:, j], ctx.omega[:, k])
    return float(np.mean(v * v) / ctx.tau.un_omega**2)


def edge_test(ctx: ScoreContext, j: int, k: int, alpha: float = 0.05) -> TestReport:
    """Two-sided test of a single inverse-correlation entry at ``ctx.z0``.

    The statistic is ``sqrt(n h) |score| / sigma_hat``; under the null it is
    asymptotically standard normal, so the threshold is the normal
    (1 - alpha/2) quantile.
    """
    if not (0.0 < alpha < 1.0):
        raise ValueError(f"alpha must be in (0, 1), got {alpha!r}")
    var = jackknife_variance(ctx, j, k)
    if var <= 0.0:
        raise ZeroVarianceError(
            f"leave-one-out variance is zero for pair ({j}, {k}) at "
            f"z0={ctx.z0}; no decision possible"
        )
    n, h = ctx.summary.n, ctx.summary.h
    stat = math.sqrt(n * h) * abs(score(ctx, j, k)) / math.sqrt(var)
    threshold = std_normal_quantile(1.0 - alpha / 2.0)
    return TestReport(
        kind="edge",
        statistic=stat,
        threshold=threshold,
        alpha=alpha,
        reject=stat > threshold,
        p_value=2.0 * (1.0 - std_normal_cdf(stat)),
        variance=var,
    )


# ---------------------------------------------------------------------------
# multiplier bootstrap
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class BootstrapDraw:
    """One multiplier-perturbed replicate of the smoothed tau."""

    tau_b: np.ndarray | None
    sigma_b: np.ndarray | None
    un_omega_b: float | None
    degenerate: bool


def bootstrap_draw(
    summary: PairSummary, ctx: ScoreContext, xi: np.ndarray
) -> BootstrapDraw:
    """Perturb the pair-weight row sums with multipliers ``xi``.

    numerator[j, k] = 2 sum_i xi[i] s_row[i, j, k]
    denominator     = 2 sum_i xi[i] w_row[i]
    tau_b  = numerator / denominator
    sigma_b = sigma + (pi/2) cos(pi/2 tau) * (tau_b - tau)
    un_omega_b = denominator / (n (n-1)).

    ``ctx`` supplies the expansion point (``ctx.tau``, ``ctx.sigma``) and
    must be built from the same dataset, kernel and index point as
    ``summary``.

    ``sigma_b`` is the sine transform linearized at the observed tau, not
    ``sin(pi/2 tau_b)``.  The multipliers are mean-zero, so the denominator
    is mean-zero too and ``tau_b - tau`` is a heavy-tailed ratio whose
    excursions routinely leave [-1, 1]; the raw sine would fold them back
    into the unit band and cut the variance of the product
    ``un_omega_b * sigma_b`` roughly in half, collapsing the bootstrap
    thresholds (a nominal 5% graph test then rejects about half of all
    true nulls).  On the tangent line the ratio's denominator cancels
    exactly in that product,

        un_omega_b * (sigma_b - sigma)
            = (pi/2) cos(pi/2 tau) * (numerator - tau * denominator)
              / (n (n-1)),

    a centered multiplier sum whose variance agrees with the leave-one-out
    estimate used by the edge test.  Only this product is statistically
    meaningful: ``sigma_b`` alone is not a correlation matrix under
    multiplier noise (its entries are unbounded when the denominator is
    small).

    With all multipliers equal to one the draw reproduces the plain
    estimate bit-for-bit: the constant cancels in the ratio (round-off
    drift of at most 1e-12 above |tau| = 1 is clamped exactly as in
    :func:`tvnpn.kendall.kendall_tau`), the correction term vanishes
    identically so ``sigma_b`` equals ``ctx.sigma``, and only the factor 2
    from the pair double count survives in ``un_omega_b``.  The draw is
    degenerate when |denominator| falls below
    1e-12 * sum_i |xi[i]| w_row[i]; callers should redraw.
    """
    xi = np.asarray(xi, dtype=float)
    if xi.shape != (summary.n,):
        raise ValueError(f"xi must have shape ({summary.n},), got {xi.shape}")
    w = summary.window
    xiw = xi[w]
    wr = summary.w_row[w]
    den = 2.0 * float((xiw * wr).sum())
    floor = _DEGENERATE_REL * float((np.abs(xiw) * wr).sum())
    if abs(den) < floor:
        return BootstrapDraw(None, None, None, True)
    num = 2.0 * (xiw[:, None, None] * summary.s_row[w]).sum(axis=0)
    tau_b = num / den
    excess = float(np.max(np.abs(tau_b))) - 1.0
    if 0.0 < excess <= 1e-12:  # same drift hygiene as the plain estimate
        tau_b = np.clip(tau_b, -1.0, 1.0)
    tau = ctx.tau.tau
    slope = 0.5 * np.pi * np.cos(0.5 * np.pi * tau)
    sigma_b = ctx.sigma + slope * (tau_b - tau)
    np.fill_diagonal(sigma_b, 1.0)
    n = summary.n
    return BootstrapDraw(
        tau_b=tau_b,
        sigma_b=sigma_b,
        un_omega_b=den / (n * (n - 1)),
        degenerate=False,
    )


def bootstrap_quantile(replicates: np.ndarray, alpha: float) -> float:
    """The ceil((1 - alpha) B)-th order statistic of the replicates."""
    if not (0.0 < alpha < 1.0):
        raise ValueError(f"alpha must be in (0, 1), got {alpha!r}")
    reps = np.sort(np.asarray(replicates, dtype=float))
    b = reps.size
    idx = min(b, max(1, math.ceil((1.0 - alpha) * b)))
    return float(reps[idx - 1])


def _replicate_gen(seed: int, b: int) -> np.random.Generator:
    ss = np.random.SeedSequence(entropy=seed, spawn_key=(b,))
    return np.random.Generator(np.random.Philox(ss))


def _normalize_seed(seed) -> int:
    if seed is None:
        return int(np.random.SeedSequence().entropy)
    return int(seed)


def _pair_index_arrays(pairs):
    js = np.array([p[0] for p in pairs], dtype=int)
    ks = np.array([p[1] for p in pairs], dtype=int)
    return js, ks


def _score_max(sigma: np.ndarray, omega: np.ndarray, js, ks, two_sided: bool):
    vals = score_matrix(sigma, omega)[js, ks]
    if two_sided:
        vals = np.abs(vals)
    return float(vals.max())


def supergraph_statistic(
    ctx: ScoreContext, graph: Graph, two_sided: bool = False
) -> float:
    """sqrt(n h) * un_omega * max score over the non-edges of ``graph``.

    The max is taken over each non-edge in its canonical (j < k)
    orientation; ``two_sided=True`` maximizes |score| instead (the signed
    form is one-sided against negative entries).
    """
    pairs = graph.complement_edges()
    if not pairs:
        raise ValueError("graph is complete: no non-edges to test")
    js, ks = _pair_index_arrays(pairs)
    n, h = ctx.summary.n, ctx.summary.h
    mx = _score_max(ctx.sigma, ctx.omega, js, ks, two_sided)
    return math.sqrt(n * h) * ctx.tau.un_omega * mx


def _draw_rows(gens, xi, rows, n):
    for b in rows:
        xi[b] = gens[b].standard_normal(n)


def _bootstrap_rows(ctx, js, ks, xi_rows, two_sided):
    """Replicate statistics and degeneracy flags for the given full-length
    multiplier rows.

    Each row goes through exactly the operations of a single
    :func:`bootstrap_draw` followed by the same :func:`score_matrix` used
    for the observed statistic, so a constant multiplier vector reproduces
    the observed quantity bit-for-bit (up to the exact scale factor).
    """
    summary = ctx.summary
    nrows = xi_rows.shape[0]
    stats = np.zeros(nrows)
    bad = np.zeros(nrows, dtype=bool)
    scale = math.sqrt(summary.n * summary.h)
    for r in range(nrows):
        draw = bootstrap_draw(summary, ctx, xi_rows[r])
        if draw.degenerate:
            bad[r] = True
            continue
        vals = score_matrix(draw.sigma_b, ctx.omega)[js, ks]
        if two_sided:
            vals = np.abs(vals)
        stats[r] = scale * draw.un_omega_b * float(vals.max())
    return stats, bad


def supergraph_test(
    data: Dataset,
    spec: KernelSpec,
    z0: float,
    omega: np.ndarray,
    graph: Graph,
    alpha: float = 0.05,
    B: int = 1000,
    seed: int | None = None,
    two_sided: bool = False,
    xi_matrix: np.ndarray | None = None,
) -> TestReport:
    """Multiplier-bootstrap test of ``H0: all non-edges of graph are zero``
    at a single index point.

    ``omega`` is the raw inverse estimate at ``z0`` (columns as returned by
    the CLIME stage, not symmetrized).  ``xi_matrix`` overrides the
    multiplier draws (testing hook); degenerate replicates are otherwise
    redrawn from their own streams, and more than B/10 redraws raise
    :class:`BootstrapDegenerateError`.
    """
    if B < 100:
        raise ValueError(f"B must be at least 100, got {B}")
    if not (0.0 < alpha < 1.0):
        raise ValueError(f"alpha must be in (0, 1), got {alpha!r}")
    pairs = graph.complement_edges()
    if not pairs:
        raise ValueError("graph is complete: no non-edges to test")
    js, ks = _pair_index_arrays(pairs)
    seed = _normalize_seed(seed)

    summary = pair_summary(data, spec, z0)
    tau = kendall_tau(summary)
    sigma = latent_correlation(tau)
    ctx = ScoreContext(z0=float(z0), summary=summary, tau=tau, sigma=sigma,
                       omega=np.asarray(omega, dtype=float))
    stat = supergraph_statistic(ctx, graph, two_sided=two_sided)

    n = summary.n
    if xi_matrix is not None:
        xi = np.array(xi_matrix, dtype=float)
        if xi.shape != (B, n):
            raise ValueError(f"xi_matrix must have shape ({B}, {n})")
        gens = None
    else:
        gens = [_replicate_gen(seed, b) for b in range(B)]
        xi = np.empty((B, n))
        _draw_rows(gens, xi, range(B), n)

    reps = np.empty(B)
    pending = np.arange(B)
    degenerate = 0
    while pending.size:
        stats, bad = _bootstrap_rows(ctx, js, ks, xi[pending], two_sided)
        good = pending[~bad]
        reps[good] = stats[~bad]
        pending = pending[bad]
        if pending.size:
            degenerate += int(pending.size)
            if degenerate > B / 10:
                raise BootstrapDegenerateError(
                    f"{degenerate} degenerate bootstrap replicates out of {B}"
                )
            if gens is None:
                raise BootstrapDegenerateError(
                    "degenerate replicate with a fixed xi_matrix"
                )
            _draw_rows(gens, xi, pending, n)

    threshold = bootstrap_quantile(reps, alpha)
    p_value = (1.0 + float((reps >= stat).sum())) / (B + 1.0)
    return TestReport(
        kind="supergraph",
        statistic=stat,
        threshold=threshold,
        alpha=alpha,
        reject=stat > threshold,
        p_value=p_value,
        n_replicates=B,
        degenerate_replicates=degenerate,
        seed=seed,
        replicates=reps,
    )


def uniform_statistic(
    data: Dataset,
    spec: KernelSpec,
    grid: EvalGrid,
    omega_path,
    graph: Graph,
    two_sided: bool = False,
) -> float:
    """Supremum over the grid of the per-point super-graph quantity."""
    pairs = graph.complement_edges()
    if not pairs:
        raise ValueError("graph is complete: no non-edges to test")
    js, ks = _pair_index_arrays(pairs)
    omega_path = [np.asarray(om, dtype=float) for om in omega_path]
    if len(omega_path) != len(grid):
        raise ValueError("omega_path must align with the grid")
    best = -math.inf
    for z, om in zip(grid, omega_path):
        summary = pair_summary(data, spec, z)
        tau = kendall_tau(summary)
        sigma = latent_correlation(tau)
        mx = _score_max(sigma, om, js, ks, two_sided)
        val = math.sqrt(summary.n * summary.h) * tau.un_omega * mx
        best = max(best, val)
    return best


def uniform_test(
    data: Dataset,
    spec: KernelSpec,
    grid: EvalGrid,
    omega_path,
    graph: Graph,
    alpha: float = 0.05,
    B: int = 1000,
    seed: int | None = None,
    two_sided: bool = False,
    xi_matrix: np.ndarray | None = None,
) -> TestReport:
    """Uniform-over-the-grid version of the super-graph test.

    One multiplier vector is shared across all grid points within each
    replicate, so the bootstrap mimics the supremum of the whole path.  A
    replicate is degenerate if its denominator collapses at *any* grid
    point; such replicates are redrawn entirely.
    """
    if B < 100:
        raise ValueError(f"B must be at least 100, got {B}")
    if not (0.0 < alpha < 1.0):
        raise ValueError(f"alpha must be in (0, 1), got {alpha!r}")
    pairs = graph.complement_edges()
    if not pairs:
        raise ValueError("graph is complete: no non-edges to test")
    js, ks = _pair_index_arrays(pairs)
    omega_path = [np.asarray(om, dtype=float) for om in omega_path]
    if len(omega_path) != len(grid):
        raise ValueError("omega_path must align with the grid")
    seed = _normalize_seed(seed)

    n, d = data.n, data.d
    npoints = len(grid)
    cache_ok = n * d * d * npoints <= _CACHE_ELEMS
    cache: list = [None] * npoints

    def context_at(gi: int) -> ScoreContext:
        if cache[gi] is not None:
            return cache[gi]
        z = float(grid.points[gi])
        s = pair_summary(data, spec, z)
        tau = kendall_tau(s)
        c = ScoreContext(z0=z, summary=s, tau=tau,
                         sigma=latent_correlation(tau), omega=omega_path[gi])
        if cache_ok:
            cache[gi] = c
        return c

    if xi_matrix is not None:
        xi = np.array(xi_matrix, dtype=float)
        if xi.shape != (B, n):
            raise ValueError(f"xi_matrix must have shape ({B}, {n})")
        gens = None
    else:
        gens = [_replicate_gen(seed, b) for b in range(B)]
        xi = np.empty((B, n))
        _draw_rows(gens, xi, range(B), n)

    stat = -math.inf
    reps = np.full(B, -math.inf)
    pending = np.arange(B)
    degenerate = 0
    first_pass = True
    while pending.size:
        path_max = np.full(pending.size, -math.inf)
        bad_any = np.zeros(pending.size, dtype=bool)
        for gi in range(npoints):
            pt = context_at(gi)
            if first_pass:
                mx = _score_max(pt.sigma, pt.omega, js, ks, two_sided)
                val = (
                    math.sqrt(pt.summary.n * pt.summary.h)
                    * pt.tau.un_omega * mx
                )
                stat = max(stat, val)
            stats, bad = _bootstrap_rows(pt, js, ks, xi[pending], two_sided)
            bad_any |= bad
            path_max = np.maximum(path_max, stats)
        first_pass = False
        reps[pending] = path_max
        pending = pending[bad_any]
        if pending.size:
            degenerate += int(pending.size)
            if degenerate > B / 10:
                raise BootstrapDegenerateError(
                    f"{degenerate} degenerate bootstrap replicates out of {B}"
                )
            if gens is None:
                raise BootstrapDegenerateError(
                    "degenerate replicate with a fixed xi_matrix"
                )
            _draw_rows(gens, xi, pending, n)

    threshold = bootstrap_quantile(reps, alpha)
    p_value = (1.0 + float((reps >= stat).sum())) / (B + 1.0)
    return TestReport(
        kind="uniform",
        statistic=stat,
        threshold=threshold,
        alpha=alpha,
        reject=stat > threshold,
        p_value=p_value,
        n_replicates=B,
        degenerate_replicates=degenerate,
        seed=seed,
        replicates=reps,
    )
