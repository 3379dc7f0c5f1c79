"""De-biased scores, leave-one-out variance, and the multiplier bootstrap,
each checked against literal-definition oracles and exact algebraic
identities."""

import math

import numpy as np
import pytest

from tvnpn.clime import ClimeConfig
from tvnpn.datamodel import Dataset, EvalGrid, Graph, KernelSpec, KERNEL_NAMES
from tvnpn.inference import (
    BootstrapDegenerateError,
    ScoreContext,
    TestReport,
    ZeroVarianceError,
    bootstrap_draw,
    bootstrap_quantile,
    build_score_context,
    edge_test,
    jackknife_variance,
    score,
    score_matrix,
    std_normal_cdf,
    std_normal_quantile,
    supergraph_statistic,
    supergraph_test,
    uniform_statistic,
    uniform_test,
)
from tvnpn.kendall import kendall_tau, latent_correlation, pair_summary

TestReport.__test__ = False  # a report dataclass, not a test case


def random_dataset(rng, n, d):
    return Dataset(x=rng.standard_normal((n, d)), z=rng.uniform(0.02, 0.98, n))


def make_context(rng, n=60, d=4, h=0.35, z0=0.5, lam=0.3):
    data = random_dataset(rng, n, d)
    spec = KernelSpec("epanechnikov", h)
    ctx = build_score_context(data, spec, z0, ClimeConfig(lam=lam))
    return data, spec, ctx


# ---------------------------------------------------------------------------
# standard normal helpers

# Inverse-CDF references computed once with scipy.stats.norm.ppf (scipy
# 1.15.3) and frozen; the implementation is accurate to ~3e-10 across (0, 1).
QUANTILE_TABLE = {
    1e-08: -5.612001244174789,
    1e-06: -4.753424308822899,
    1e-04: -3.7190164854556804,
    0.01: -2.3263478740408408,
    0.025: -1.9599639845400545,
    0.05: -1.6448536269514729,
    0.3: -0.5244005127080409,
    0.5: 0.0,
    0.7: 0.5244005127080407,
    0.95: 1.6448536269514722,
    0.975: 1.959963984540054,
    0.99: 2.3263478740408408,
    0.9999: 3.719016485455709,
    0.999999: 4.753424308817087,
}


def test_quantile_matches_frozen_table():
    for p, expected in QUANTILE_TABLE.items():
        assert std_normal_quantile(p) == pytest.approx(expected, abs=1e-9)


def test_quantile_cdf_round_trip():
    for p in np.linspace(0.0005, 0.9995, 999):
        assert std_normal_cdf(std_normal_quantile(float(p))) == pytest.approx(
            p, abs=1e-12
        )


@pytest.mark.parametrize("p", [0.0, 1.0, -0.1, 1.1])
def test_quantile_rejects_boundary(p):
    with pytest.raises(ValueError):
        std_normal_quantile(p)


def test_cdf_basic_values():
    assert std_normal_cdf(0.0) == 0.5
    assert std_normal_cdf(1.0) == pytest.approx(0.8413447460685429, abs=1e-15)
    assert std_normal_cdf(2.5) == pytest.approx(0.9937903346742238, abs=1e-15)
    for x in (-3.0, -0.7, 0.2, 1.9):
        assert std_normal_cdf(-x) == pytest.approx(
            1.0 - std_normal_cdf(x), abs=1e-15
        )


# ---------------------------------------------------------------------------
# scores


def test_score_matrix_at_exact_plugin_truth():
    # with sigma the exact inverse of a symmetric omega, zeroing the tested
    # entry leaves score(j, k) = -omega[j, k] for every off-diagonal pair
    rng = np.random.default_rng(31)
    for d in (3, 5, 8):
        a = rng.normal(size=(d, d))
        omega = a @ a.T + d * np.eye(d)
        sigma = np.linalg.inv(omega)
        m = score_matrix(sigma, omega)
        mask = ~np.eye(d, dtype=bool)
        assert np.allclose(m[mask], -omega[mask], atol=1e-8)


def test_score_agrees_with_score_matrix():
    rng = np.random.default_rng(7)
    _, _, ctx = make_context(rng)
    m = score_matrix(ctx.sigma, ctx.omega)
    d = ctx.sigma.shape[0]
    for j in range(d):
        for k in range(d):
            if j == k:
                continue
            assert score(ctx, j, k) == pytest.approx(m[j, k], abs=1e-10)


def test_score_requires_distinct_indices():
    rng = np.random.default_rng(8)
    _, _, ctx = make_context(rng, n=40, d=3)
    with pytest.raises(ValueError):
        score(ctx, 1, 1)
    with pytest.raises(ValueError):
        jackknife_variance(ctx, 2, 2)


# ---------------------------------------------------------------------------
# leave-one-out variance


def literal_jackknife(summary, tau_est, omega, j, k):
    """The defining sum: per-sample centered rows through the sine-map
    derivative, sandwiched between raw inverse columns."""
    n, h = summary.n, summary.h
    d = summary.s_row.shape[1]
    tau = tau_est.tau
    total = 0.0
    for s in range(n):
        q = (math.sqrt(h) / (n - 1)) * (
            summary.s_row[s] - tau * summary.w_row[s]
        )
        theta = np.pi * np.cos(0.5 * np.pi * tau) * q
        v = 0.0
        for a in range(d):
            for b in range(d):
                v += theta[a, b] * omega[a, j] * omega[b, k]
        total += v * v
    return (total / n) / tau_est.un_omega**2


def test_jackknife_matches_literal_loops():
    rng = np.random.default_rng(99)
    done = 0
    while done < 25:
        n = int(rng.integers(8, 21))
        d = int(rng.integers(2, 5))
        data = random_dataset(rng, n, d)
        name = KERNEL_NAMES[rng.integers(0, len(KERNEL_NAMES))]
        spec = KernelSpec(name, float(rng.uniform(0.2, 0.6)))
        z0 = float(rng.uniform(0.2, 0.8))
        try:
            ctx = build_score_context(data, spec, z0, ClimeConfig(lam=0.3))
        except Exception:
            continue
        j, k = 0, d - 1
        got = jackknife_variance(ctx, j, k)
        want = literal_jackknife(ctx.summary, ctx.tau, ctx.omega, j, k)
        assert got == pytest.approx(want, rel=1e-12, abs=1e-300)
        done += 1


def test_centered_rows_sum_to_zero():
    rng = np.random.default_rng(12)
    data = random_dataset(rng, 50, 3)
    summary = pair_summary(data, KernelSpec("triangular", 0.4), 0.5)
    tau = kendall_tau(summary).tau
    resid = (summary.s_row - tau[None] * summary.w_row[:, None, None]).sum(axis=0)
    assert np.max(np.abs(resid)) <= 1e-10 * summary.w_total


# ---------------------------------------------------------------------------
# edge test


def test_edge_test_report_fields():
    rng = np.random.default_rng(21)
    _, _, ctx = make_context(rng, n=80, d=4)
    rep = edge_test(ctx, 0, 1, alpha=0.05)
    assert rep.kind == "edge"
    assert rep.statistic >= 0.0
    assert rep.threshold == pytest.approx(1.959963984540054, abs=1e-12)
    assert rep.variance > 0.0
    assert 0.0 <= rep.p_value <= 1.0
    assert rep.reject == (rep.statistic > rep.threshold)
    assert rep.p_value == pytest.approx(
        2.0 * (1.0 - std_normal_cdf(rep.statistic)), abs=1e-15
    )
    with pytest.raises(ValueError):
        edge_test(ctx, 0, 1, alpha=1.5)


def test_edge_test_zero_variance_on_fully_shrunk_estimate():
    # lam >= 1 makes beta = 0 feasible (and optimal) for every column, so
    # the sandwiched variance is exactly zero and no decision is possible
    rng = np.random.default_rng(3)
    data = random_dataset(rng, 40, 3)
    spec = KernelSpec("epanechnikov", 0.45)
    ctx = build_score_context(data, spec, 0.5, ClimeConfig(lam=1.0, method="clime"))
    assert np.array_equal(ctx.omega, np.zeros((3, 3)))
    with pytest.raises(ZeroVarianceError):
        edge_test(ctx, 0, 1)


# ---------------------------------------------------------------------------
# bootstrap draws


def plain_context(summary, z0=0.5):
    """A ScoreContext carrying the expansion point for draws; omega is
    irrelevant to the draw itself, so the identity stands in."""
    tau = kendall_tau(summary)
    d = summary.s_row.shape[1]
    return ScoreContext(z0=z0, summary=summary, tau=tau,
                        sigma=latent_correlation(tau), omega=np.eye(d))


def literal_bootstrap_draw(summary, ctx, xi):
    n = summary.n
    num = np.zeros_like(summary.s_row[0])
    den = 0.0
    for i in range(n):
        num = num + 2.0 * xi[i] * summary.s_row[i]
        den = den + 2.0 * xi[i] * summary.w_row[i]
    tau_b = num / den
    # sine transform linearized at the observed tau; the raw sine of the
    # ratio would fold its heavy-tailed excursions back into [-1, 1]
    slope = 0.5 * np.pi * np.cos(0.5 * np.pi * ctx.tau.tau)
    sigma_b = ctx.sigma + slope * (tau_b - ctx.tau.tau)
    np.fill_diagonal(sigma_b, 1.0)
    return tau_b, sigma_b, den / (n * (n - 1))


def test_bootstrap_draw_matches_literal_loops():
    rng = np.random.default_rng(17)
    for _ in range(25):
        n = int(rng.integers(10, 25))
        d = int(rng.integers(2, 5))
        data = random_dataset(rng, n, d)
        spec = KernelSpec("uniform", float(rng.uniform(0.25, 0.6)))
        summary = pair_summary(data, spec, 0.5)
        ctx = plain_context(summary)
        xi = rng.standard_normal(n)
        draw = bootstrap_draw(summary, ctx, xi)
        if draw.degenerate:
            continue
        tau_b, sigma_b, un_b = literal_bootstrap_draw(summary, ctx, xi)
        assert np.allclose(draw.tau_b, tau_b, rtol=1e-12, atol=1e-12)
        assert np.allclose(draw.sigma_b, sigma_b, rtol=1e-12, atol=1e-12)
        assert draw.un_omega_b == pytest.approx(un_b, rel=1e-12)


def test_bootstrap_product_cancels_the_denominator():
    # un_omega_b * (sigma_b - sigma) must equal the centered multiplier
    # sum divided by n(n-1) — no trace of the random denominator
    rng = np.random.default_rng(18)
    for _ in range(10):
        n = int(rng.integers(12, 30))
        data = random_dataset(rng, n, 3)
        summary = pair_summary(data, KernelSpec("epanechnikov", 0.4), 0.5)
        ctx = plain_context(summary)
        xi = rng.standard_normal(n)
        draw = bootstrap_draw(summary, ctx, xi)
        if draw.degenerate:
            continue
        num = 2.0 * np.einsum("i,ijk->jk", xi, summary.s_row)
        den = 2.0 * float(xi @ summary.w_row)
        slope = 0.5 * np.pi * np.cos(0.5 * np.pi * ctx.tau.tau)
        want = slope * (num - ctx.tau.tau * den) / (n * (n - 1))
        np.fill_diagonal(want, 0.0)
        got = draw.un_omega_b * (draw.sigma_b - ctx.sigma)
        scale = np.abs(want).max() + 1e-12
        assert np.allclose(got, want, atol=1e-12 * scale, rtol=1e-9)


def test_bootstrap_draw_shape_check():
    rng = np.random.default_rng(2)
    data = random_dataset(rng, 30, 2)
    summary = pair_summary(data, KernelSpec("epanechnikov", 0.4), 0.5)
    with pytest.raises(ValueError, match="shape"):
        bootstrap_draw(summary, plain_context(summary), np.ones(29))


def test_constant_multipliers_reproduce_the_estimate():
    rng = np.random.default_rng(23)
    data = random_dataset(rng, 50, 3)
    summary = pair_summary(data, KernelSpec("epanechnikov", 0.35), 0.5)
    ctx = plain_context(summary)
    tau, sigma = ctx.tau, ctx.sigma
    for c in (0.5, 1.0, 2.0, 4.0):  # powers of two scale without rounding
        draw = bootstrap_draw(summary, ctx, np.full(summary.n, c))
        assert not draw.degenerate
        assert np.array_equal(draw.tau_b, tau.tau)
        assert np.array_equal(draw.sigma_b, sigma)
        assert draw.un_omega_b == 2.0 * c * tau.un_omega
    draw = bootstrap_draw(summary, ctx, np.full(summary.n, 3.0))
    assert np.allclose(draw.tau_b, tau.tau, rtol=1e-13, atol=0.0)
    assert draw.un_omega_b == pytest.approx(6.0 * tau.un_omega, rel=1e-14)


def degenerate_xi(summary):
    """A multiplier vector whose weighted denominator cancels exactly."""
    xi = np.zeros(summary.n)
    i1, i2 = summary.window[0], summary.window[1]
    xi[i1] = 1.0 / summary.w_row[i1]
    xi[i2] = -1.0 / summary.w_row[i2]
    return xi


def test_cancelling_multipliers_are_degenerate():
    rng = np.random.default_rng(4)
    data = random_dataset(rng, 40, 3)
    summary = pair_summary(data, KernelSpec("epanechnikov", 0.4), 0.5)
    draw = bootstrap_draw(summary, plain_context(summary), degenerate_xi(summary))
    assert draw.degenerate
    assert draw.tau_b is None and draw.sigma_b is None
    assert draw.un_omega_b is None


# ---------------------------------------------------------------------------
# bootstrap quantile


def test_bootstrap_quantile_is_order_statistic():
    reps = np.arange(1.0, 11.0)  # 1..10
    assert bootstrap_quantile(reps, 0.05) == 10.0   # ceil(9.5) = 10
    assert bootstrap_quantile(reps, 0.5) == 5.0     # ceil(5.0) = 5
    assert bootstrap_quantile(reps, 0.09) == 10.0   # ceil(9.1) = 10
    assert bootstrap_quantile(reps, 0.11) == 9.0    # ceil(8.9) = 9
    assert bootstrap_quantile(reps, 0.999) == 1.0
    shuffled = np.array([3.0, 1.0, 2.0])
    assert bootstrap_quantile(shuffled, 0.3) == 3.0  # ceil(2.1) = 3
    with pytest.raises(ValueError):
        bootstrap_quantile(reps, 0.0)


def test_bootstrap_quantile_monotone_in_alpha():
    rng = np.random.default_rng(44)
    reps = rng.standard_normal(333)
    alphas = np.linspace(0.01, 0.99, 25)
    qs = [bootstrap_quantile(reps, float(a)) for a in alphas]
    assert all(q1 >= q2 for q1, q2 in zip(qs, qs[1:]))


# ---------------------------------------------------------------------------
# super-graph test


def graph_setup(rng, n=50, d=4):
    data, spec, ctx = make_context(rng, n=n, d=d)
    graph = Graph(d, frozenset({(0, 1), (2, 3)}))
    return data, spec, ctx, graph


def test_supergraph_constant_multiplier_identity():
    # a constant multiplier row must reproduce exactly twice the observed
    # statistic (ordered-pair double counting), scaled by the constant
    rng = np.random.default_rng(61)
    data, spec, ctx, graph = graph_setup(rng)
    B = 100
    for c in (0.5, 1.0, 2.0):
        rep = supergraph_test(
            data, spec, 0.5, ctx.omega, graph, B=B,
            xi_matrix=np.full((B, data.n), c),
        )
        assert np.array_equal(rep.replicates, np.full(B, 2.0 * c * rep.statistic))
        assert rep.threshold == 2.0 * c * rep.statistic
        assert rep.reject == (rep.statistic > rep.threshold)
        assert rep.degenerate_replicates == 0


def test_supergraph_statistic_formula():
    rng = np.random.default_rng(62)
    data, spec, ctx, graph = graph_setup(rng)
    pairs = graph.complement_edges()
    m = score_matrix(ctx.sigma, ctx.omega)
    signed = max(m[j, k] for j, k in pairs)
    absval = max(abs(m[j, k]) for j, k in pairs)
    n, h = ctx.summary.n, ctx.summary.h
    assert supergraph_statistic(ctx, graph) == pytest.approx(
        math.sqrt(n * h) * ctx.tau.un_omega * signed, rel=1e-14
    )
    assert supergraph_statistic(ctx, graph, two_sided=True) == pytest.approx(
        math.sqrt(n * h) * ctx.tau.un_omega * absval, rel=1e-14
    )


def test_supergraph_determinism():
    rng = np.random.default_rng(63)
    data, spec, ctx, graph = graph_setup(rng)
    rep1 = supergraph_test(data, spec, 0.5, ctx.omega, graph, B=120, seed=404)
    rep2 = supergraph_test(data, spec, 0.5, ctx.omega, graph, B=120, seed=404)
    assert rep1.statistic == rep2.statistic
    assert rep1.threshold == rep2.threshold
    assert np.array_equal(rep1.replicates, rep2.replicates)
    assert rep1.seed == 404
    rep3 = supergraph_test(data, spec, 0.5, ctx.omega, graph, B=120, seed=405)
    assert not np.array_equal(rep1.replicates, rep3.replicates)


def test_degenerate_xi_matrix_raises():
    rng = np.random.default_rng(64)
    data, spec, ctx, graph = graph_setup(rng)
    summary = ctx.summary
    B = 100
    xi = np.ones((B, data.n))
    xi[7] = degenerate_xi(summary)
    with pytest.raises(BootstrapDegenerateError, match="fixed xi_matrix"):
        supergraph_test(data, spec, 0.5, ctx.omega, graph, B=B, xi_matrix=xi)
    xi = np.ones((B, data.n))
    xi[:15] = degenerate_xi(summary)
    with pytest.raises(BootstrapDegenerateError, match="15 degenerate"):
        supergraph_test(data, spec, 0.5, ctx.omega, graph, B=B, xi_matrix=xi)


def test_supergraph_validation():
    rng = np.random.default_rng(65)
    data, spec, ctx, graph = graph_setup(rng)
    with pytest.raises(ValueError, match="B"):
        supergraph_test(data, spec, 0.5, ctx.omega, graph, B=99)
    with pytest.raises(ValueError, match="alpha"):
        supergraph_test(data, spec, 0.5, ctx.omega, graph, B=100, alpha=0.0)
    complete = Graph(4, frozenset((j, k) for j in range(4) for k in range(j + 1, 4)))
    with pytest.raises(ValueError, match="complete"):
        supergraph_statistic(ctx, complete)
    with pytest.raises(ValueError, match="complete"):
        supergraph_test(data, spec, 0.5, ctx.omega, complete, B=100)
    with pytest.raises(ValueError, match="shape"):
        supergraph_test(data, spec, 0.5, ctx.omega, graph, B=100,
                        xi_matrix=np.ones((50, data.n)))


# ---------------------------------------------------------------------------
# uniform test


def test_uniform_statistic_is_max_over_grid():
    rng = np.random.default_rng(71)
    data = random_dataset(rng, 60, 4)
    spec = KernelSpec("epanechnikov", 0.3)
    grid = EvalGrid(np.array([0.3, 0.5, 0.7]))
    graph = Graph(4, frozenset({(0, 1)}))
    config = ClimeConfig(lam=0.3)
    ctxs = [build_score_context(data, spec, z, config) for z in grid.points]
    omega_path = [c.omega for c in ctxs]
    per_point = [supergraph_statistic(c, graph) for c in ctxs]
    got = uniform_statistic(data, spec, grid, omega_path, graph)
    assert got == max(per_point)


def test_uniform_singleton_grid_matches_supergraph():
    rng = np.random.default_rng(72)
    data, spec, ctx, graph = graph_setup(rng, n=60)
    grid = EvalGrid(np.array([0.5]))
    uni = uniform_test(data, spec, grid, [ctx.omega], graph, B=110, seed=9)
    sup = supergraph_test(data, spec, 0.5, ctx.omega, graph, B=110, seed=9)
    assert uni.kind == "uniform" and sup.kind == "supergraph"
    assert uni.statistic == sup.statistic
    assert uni.threshold == sup.threshold
    assert np.array_equal(uni.replicates, sup.replicates)


def test_uniform_constant_multiplier_identity():
    rng = np.random.default_rng(73)
    data = random_dataset(rng, 50, 3)
    spec = KernelSpec("epanechnikov", 0.35)
    grid = EvalGrid(np.array([0.4, 0.6]))
    graph = Graph(3, frozenset({(0, 1)}))
    config = ClimeConfig(lam=0.3)
    omega_path = [
        build_score_context(data, spec, z, config).omega for z in grid.points
    ]
    B = 100
    rep = uniform_test(data, spec, grid, omega_path, graph, B=B,
                       xi_matrix=np.ones((B, data.n)))
    assert np.array_equal(rep.replicates, np.full(B, 2.0 * rep.statistic))


def test_uniform_path_alignment_checked():
    rng = np.random.default_rng(74)
    data, spec, ctx, graph = graph_setup(rng)
    grid = EvalGrid(np.array([0.4, 0.6]))
    with pytest.raises(ValueError, match="align"):
        uniform_statistic(data, spec, grid, [ctx.omega], graph)
    with pytest.raises(ValueError, match="align"):
        uniform_test(data, spec, grid, [ctx.omega], graph, B=100)


# ---------------------------------------------------------------------------
# rank invariance of the whole pipeline


def test_monotone_transforms_leave_decisions_unchanged():
    rng = np.random.default_rng(81)
    data = random_dataset(rng, 70, 4)
    x2 = data.x.copy()
    x2[:, 0] = np.exp(x2[:, 0])
    x2[:, 1] = np.arctan(x2[:, 1])
    x2[:, 2] = x2[:, 2] ** 3
    x2[:, 3] = x2[:, 3] + x2[:, 3] ** 3
    data2 = Dataset(x=x2, z=data.z)
    spec = KernelSpec("epanechnikov", 0.35)
    config = ClimeConfig(lam=0.3)
    ctx1 = build_score_context(data, spec, 0.5, config)
    ctx2 = build_score_context(data2, spec, 0.5, config)
    assert np.array_equal(ctx1.sigma, ctx2.sigma)
    assert np.array_equal(ctx1.omega, ctx2.omega)
    e1 = edge_test(ctx1, 0, 2)
    e2 = edge_test(ctx2, 0, 2)
    assert e1.statistic == e2.statistic and e1.variance == e2.variance
    graph = Graph(4, frozenset({(0, 1)}))
    s1 = supergraph_test(data, spec, 0.5, ctx1.omega, graph, B=120, seed=5)
    s2 = supergraph_test(data2, spec, 0.5, ctx2.omega, graph, B=120, seed=5)
    assert s1.statistic == s2.statistic
    assert s1.threshold == s2.threshold
    assert np.array_equal(s1.replicates, s2.replicates)
    assert s1.reject == s2.reject


# ---------------------------------------------------------------------------
# reports


def test_report_json_round_trip():
    rep = TestReport(
        kind="supergraph",
        statistic=1.25,
        threshold=2.5,
        alpha=0.05,
        reject=False,
        p_value=0.31,
        variance=None,
        n_replicates=500,
        degenerate_replicates=2,
        seed=99,
        replicates=np.arange(5.0),
    )
    back = TestReport.from_json(rep.to_json())
    assert back.kind == rep.kind
    assert back.statistic == rep.statistic
    assert back.threshold == rep.threshold
    assert back.alpha == rep.alpha
    assert back.reject == rep.reject
    assert back.p_value == rep.p_value
    assert back.variance is None
    assert back.n_replicates == 500
    assert back.degenerate_replicates == 2
    assert back.seed == 99
    assert back.replicates is None  # diagnostics are not serialized
    assert "replicates" not in rep.to_dict()
