"""Command-line front-end.

Commands
--------
estimate      correlation / inverse-correlation path over a grid (CSV)
test-edge     single-entry test at one index point (JSON report)
test-graph    super-graph bootstrap test at one index point (JSON report)
test-uniform  uniform-over-the-grid bootstrap test (JSON report)
simulate      draw a synthetic dataset + ground-truth sidecar
roc-study     support-recovery ROC sweep, rank vs. moment correlations
power-study   Monte-Carlo rejection-rate table for any of the three tests

Every output embeds the fully resolved configuration (including the seed,
generated on the spot when not supplied) so any file can be reproduced
from its own header.  CSV files carry the manifest as a leading ``#``
comment line followed by a normal header row.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys

import numpy as np

from .clime import ClimeConfig, ClimeInfeasibleError, ClimeNumericalError, METHODS, inverse_correlation
from .datamodel import (
    Dataset,
    DatasetFormatError,
    DimensionError,
    DomainError,
    EvalGrid,
    Graph,
    KERNEL_NAMES,
    KernelSpec,
    load_dataset,
    save_dataset,
)
from .inference import (
    BootstrapDegenerateError,
    ZeroVarianceError,
    build_score_context,
    edge_test,
    supergraph_test,
    uniform_test,
)
from .kendall import DegenerateWindowError, kendall_tau, latent_correlation, pair_summary
from .simgen import SCHEMES, SimConfig, sample_dataset, truth_path
from .studies import (
    bandwidth_estimate,
    bandwidth_test,
    default_roc_lambdas,
    desk_sim_config,
    interior_grid,
    lambda_rule,
    run_edge_study,
    run_graph_study,
    run_roc_study,
)

__all__ = ["main", "build_parser"]

_USER_ERRORS = (
    DatasetFormatError,
    DimensionError,
    DomainError,
    DegenerateWindowError,
    ClimeInfeasibleError,
    ClimeNumericalError,
    BootstrapDegenerateError,
    ZeroVarianceError,
    ValueError,
    OSError,
    json.JSONDecodeError,
)


# ---------------------------------------------------------------------------
# flag parsing helpers
# ---------------------------------------------------------------------------


def parse_grid(text: str) -> EvalGrid:
    """``a:b:n`` (n evenly spaced points; the closed unit interval
    ``0:1:n`` maps to the interior points k/(n+1)) or a single value."""
    if ":" in text:
        parts = text.split(":")
        if len(parts) != 3:
            raise ValueError(f"grid must be 'a:b:n' or a single value, got {text!r}")
        lo, hi, count = float(parts[0]), float(parts[1]), int(parts[2])
        if count < 1:
            raise ValueError("grid count must be at least 1")
        if lo == 0.0 and hi == 1.0:
            return interior_grid(count)
        if count == 1:
            if lo != hi:
                raise ValueError("a 1-point grid needs a == b")
            return EvalGrid.singleton(lo)
        return EvalGrid.linspace(lo, hi, count)
    return EvalGrid.singleton(float(text))


def resolve_bandwidth(rule: str, n: int) -> float:
    """``estimate`` / ``test`` plug-in rules, ``fixed:H``, or ``rule:C``
    for C * n^(-1/5)."""
    if rule == "estimate":
        return bandwidth_estimate(n)
    if rule == "test":
        return bandwidth_test(n)
    if rule.startswith("fixed:"):
        h = float(rule[len("fixed:"):])
        if not (0.0 < h):
            raise ValueError(f"fixed bandwidth must be positive, got {h}")
        return h
    if rule.startswith("rule:"):
        return float(rule[len("rule:"):]) * n ** (-0.2)
    raise ValueError(f"bad --h-rule {rule!r} (estimate | test | fixed:H | rule:C)")


def resolve_lambda(rule: str, n: int, d: int, h: float) -> float:
    """``default`` scaled rule, ``fixed:L``, or ``rule:C`` for a rescaled
    version of the default."""
    if rule in ("default", "paper"):
        return lambda_rule(n, d, h)
    if rule.startswith("fixed:"):
        lam = float(rule[len("fixed:"):])
        if lam < 0.0:
            raise ValueError(f"fixed lambda must be >= 0, got {lam}")
        return lam
    if rule.startswith("rule:"):
        return lambda_rule(n, d, h, c=float(rule[len("rule:"):]))
    raise ValueError(f"bad --lambda-rule {rule!r} (default | fixed:L | rule:C)")


def parse_edge(text: str, d: int) -> tuple:
    """1-based ``j,k`` pair -> 0-based (j, k)."""
    parts = text.split(",")
    if len(parts) != 2:
        raise ValueError(f"--edge must be 'j,k', got {text!r}")
    j, k = int(parts[0]), int(parts[1])
    if not (1 <= j <= d and 1 <= k <= d) or j == k:
        raise ValueError(f"edge ({j},{k}) out of range for d={d} (1-based, j != k)")
    return j - 1, k - 1


def parse_mu_list(text: str) -> list:
    vals = [float(v) for v in text.split(",") if v.strip() != ""]
    if not vals:
        raise ValueError("--mu0 needs at least one value")
    return vals


def load_graph(path: str) -> Graph:
    with open(path, "r", encoding="utf-8") as fh:
        return Graph.from_json(json.load(fh))


def _resolve_seed(seed) -> int:
    if seed is None:
        return int(np.random.SeedSequence().entropy % (2**63))
    return int(seed)


def _write_json(path: str, obj) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(obj, fh, indent=2, sort_keys=True)
        fh.write("\n")


def _write_csv(path: str, manifest: dict, header: list, rows) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("# " + json.dumps(manifest, sort_keys=True) + "\n")
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(_fmt(v) for v in row) + "\n")


def _fmt(v) -> str:
    if isinstance(v, float):
        return repr(v)
    return str(v)


def _outdir(args) -> str:
    os.makedirs(args.output, exist_ok=True)
    return args.output


# ---------------------------------------------------------------------------
# commands
# ---------------------------------------------------------------------------


def cmd_estimate(args) -> int:
    out = _outdir(args)
    data = load_dataset(args.input)
    grid = parse_grid(args.grid)
    h = resolve_bandwidth(args.h_rule, data.n)
    lam = resolve_lambda(args.lambda_rule, data.n, data.d, h)
    spec = KernelSpec(args.kernel, h)
    cfg = ClimeConfig(lam=lam, gamma=args.gamma, method=args.method)
    manifest = {
        "command": "estimate",
        "input": args.input,
        "kernel": args.kernel,
        "h": h,
        "lambda": lam,
        "gamma": args.gamma,
        "method": args.method,
        "grid": list(grid),
        "n": data.n,
        "d": data.d,
        "support_threshold": args.support_threshold,
    }
    rows = []
    degenerate = []
    for z in grid:
        try:
            sigma = latent_correlation(kendall_tau(pair_summary(data, spec, z)))
        except DegenerateWindowError:
            degenerate.append(z)
            for j in range(data.d):
                for k in range(j, data.d):
                    rows.append((z, j + 1, k + 1, float("nan"), float("nan"), 0))
            continue
        est = inverse_correlation(sigma, cfg, z0=z)
        omega = est.symmetrized()
        support = est.support(args.support_threshold)
        for j in range(data.d):
            for k in range(j, data.d):
                rows.append((
                    z, j + 1, k + 1,
                    float(sigma[j, k]), float(omega[j, k]),
                    int(j != k and support.has_edge(j, k)),
                ))
    manifest["degenerate_points"] = degenerate
    _write_csv(
        os.path.join(out, "estimate.csv"),
        manifest,
        ["z", "j", "k", "sigma", "omega", "edge"],
        rows,
    )
    _write_json(os.path.join(out, "manifest.json"), manifest)
    if degenerate:
        print(f"warning: empty smoothing window at {len(degenerate)} grid point(s)", file=sys.stderr)
    print(os.path.join(out, "estimate.csv"))
    return 0


def _test_manifest(args, data, h, lam, extra) -> dict:
    manifest = {
        "command": args.command,
        "input": args.input,
        "kernel": args.kernel,
        "h": h,
        "lambda": lam,
        "gamma": args.gamma,
        "method": args.method,
        "alpha": args.alpha,
        "n": data.n,
        "d": data.d,
    }
    manifest.update(extra)
    return manifest


def cmd_test_edge(args) -> int:
    out = _outdir(args)
    data = load_dataset(args.input)
    grid = parse_grid(args.grid)
    if len(grid) != 1:
        raise ValueError("test-edge evaluates at a single point; pass --grid Z0")
    z0 = grid.lo
    j, k = parse_edge(args.edge, data.d)
    h = resolve_bandwidth(args.h_rule, data.n)
    lam = resolve_lambda(args.lambda_rule, data.n, data.d, h)
    spec = KernelSpec(args.kernel, h)
    cfg = ClimeConfig(lam=lam, gamma=args.gamma, method=args.method)
    ctx = build_score_context(data, spec, z0, cfg)
    report = edge_test(ctx, j, k, alpha=args.alpha)
    manifest = _test_manifest(args, data, h, lam, {"z0": z0, "edge": [j + 1, k + 1]})
    _write_json(os.path.join(out, "report.json"),
                {"config": manifest, "report": report.to_dict()})
    print(os.path.join(out, "report.json"))
    return 0


def cmd_test_graph(args) -> int:
    out = _outdir(args)
    data = load_dataset(args.input)
    grid = parse_grid(args.grid)
    if len(grid) != 1:
        raise ValueError("test-graph evaluates at a single point; pass --grid Z0")
    z0 = grid.lo
    graph = load_graph(args.graph)
    if graph.d != data.d:
        raise ValueError(f"graph is on d={graph.d} vertices but data has d={data.d}")
    seed = _resolve_seed(args.seed)
    h = resolve_bandwidth(args.h_rule, data.n)
    lam = resolve_lambda(args.lambda_rule, data.n, data.d, h)
    spec = KernelSpec(args.kernel, h)
    cfg = ClimeConfig(lam=lam, gamma=args.gamma, method=args.method)
    sigma = latent_correlation(kendall_tau(pair_summary(data, spec, z0)))
    est = inverse_correlation(sigma, cfg, z0=z0)
    report = supergraph_test(
        data, spec, z0, est.omega, graph,
        alpha=args.alpha, B=args.B, seed=seed, two_sided=args.two_sided,
    )
    manifest = _test_manifest(args, data, h, lam, {
        "z0": z0, "graph": args.graph, "B": args.B,
        "seed": seed, "two_sided": args.two_sided,
    })
    _write_json(os.path.join(out, "report.json"),
                {"config": manifest, "report": report.to_dict()})
    print(os.path.join(out, "report.json"))
    return 0


def cmd_test_uniform(args) -> int:
    out = _outdir(args)
    data = load_dataset(args.input)
    grid = parse_grid(args.grid)
    graph = load_graph(args.graph)
    if graph.d != data.d:
        raise ValueError(f"graph is on d={graph.d} vertices but data has d={data.d}")
    seed = _resolve_seed(args.seed)
    h = resolve_bandwidth(args.h_rule, data.n)
    lam = resolve_lambda(args.lambda_rule, data.n, data.d, h)
    spec = KernelSpec(args.kernel, h)
    cfg = ClimeConfig(lam=lam, gamma=args.gamma, method=args.method)
    omega_path = []
    for z in grid:
        sigma = latent_correlation(kendall_tau(pair_summary(data, spec, z)))
        omega_path.append(inverse_correlation(sigma, cfg, z0=z).omega)
    report = uniform_test(
        data, spec, grid, omega_path, graph,
        alpha=args.alpha, B=args.B, seed=seed, two_sided=args.two_sided,
    )
    manifest = _test_manifest(args, data, h, lam, {
        "grid": list(grid), "graph": args.graph, "B": args.B,
        "seed": seed, "two_sided": args.two_sided,
    })
    _write_json(os.path.join(out, "report.json"),
                {"config": manifest, "report": report.to_dict()})
    print(os.path.join(out, "report.json"))
    return 0


def cmd_simulate(args) -> int:
    out = _outdir(args)
    seed = _resolve_seed(args.seed)
    kwargs = {"scheme": args.sim_scheme}
    if args.force_edge is not None:
        j, k = parse_edge(args.force_edge, args.d)
        kwargs["force_edge"] = (j, k)
        kwargs["force_value"] = args.force_value
    config = desk_sim_config(args.d, **kwargs)
    rng = np.random.Generator(np.random.Philox(np.random.SeedSequence(seed)))
    truth = truth_path(config, rng)
    data = sample_dataset(truth, args.n, rng)
    manifest = {
        "command": "simulate",
        "scheme": args.sim_scheme,
        "n": args.n,
        "d": args.d,
        "n_edges": config.n_edges,
        "churn": config.churn,
        "mu_min": config.mu_min,
        "mu_max": config.mu_max,
        "force_edge": None if args.force_edge is None
        else [kwargs["force_edge"][0] + 1, kwargs["force_edge"][1] + 1],
        "force_value": args.force_value,
        "seed": seed,
    }
    save_dataset(data, os.path.join(out, "dataset.csv"),
                 comment=json.dumps(manifest, sort_keys=True))
    _write_json(os.path.join(out, "truth.json"),
                {"config": manifest, "truth": truth.to_json()})
    _write_json(os.path.join(out, "manifest.json"), manifest)
    print(os.path.join(out, "dataset.csv"))
    return 0


def cmd_roc_study(args) -> int:
    out = _outdir(args)
    seed = _resolve_seed(args.seed)
    if args.lambda_path is None:
        lams = default_roc_lambdas()
    else:
        parts = args.lambda_path.split(":")
        if len(parts) != 3:
            raise ValueError("--lambda-path must be 'lo:hi:count' (log-spaced)")
        lams = np.geomspace(float(parts[0]), float(parts[1]), int(parts[2]))
    result = run_roc_study(
        scheme=args.sim_scheme,
        n=args.n,
        d=args.d,
        runs=args.reps,
        seed=seed,
        lambdas=lams,
        kernel=args.kernel,
        gamma=args.gamma,
    )
    manifest = {
        "command": "roc-study",
        "scheme": args.sim_scheme,
        "n": args.n,
        "d": args.d,
        "runs": args.reps,
        "kernel": args.kernel,
        "gamma": args.gamma,
        "lambdas": [float(v) for v in lams],
        "fpr_target": args.fpr_target,
        "seed": seed,
    }
    rows = []
    for method, runs in result.curves.items():
        for r, curve in enumerate(runs):
            for fpr, tpr in curve:
                rows.append((method, r, fpr, tpr))
    _write_csv(os.path.join(out, "roc_curves.csv"), manifest,
               ["method", "run", "fpr", "tpr"], rows)
    summary = [
        (method, result.mean_tpr_at(method, args.fpr_target))
        for method in result.curves
    ]
    _write_csv(os.path.join(out, "roc_summary.csv"), manifest,
               ["method", "mean_tpr_at_target_fpr"], summary)
    _write_json(os.path.join(out, "manifest.json"), manifest)
    for method, tpr in summary:
        print(f"{method}: mean TPR at FPR={args.fpr_target} = {tpr:.3f}")
    return 0


def cmd_power_study(args) -> int:
    out = _outdir(args)
    seed = _resolve_seed(args.seed)
    mus = parse_mu_list(args.mu0)
    grid_text = args.grid
    if grid_text is None:
        grid_text = "0:1:20" if args.test == "uniform" else "0.5"
    grid = parse_grid(grid_text)
    manifest = {
        "command": "power-study",
        "test": args.test,
        "scheme": args.sim_scheme,
        "n": args.n,
        "d": args.d,
        "mu0": mus,
        "reps": args.reps,
        "alpha": args.alpha,
        "kernel": args.kernel,
        "gamma": args.gamma,
        "method": args.method,
        "seed": seed,
    }
    rows = []
    if args.test == "edge":
        if len(grid) != 1:
            raise ValueError("edge power study evaluates at a single point; pass --grid Z0")
        manifest["z0"] = grid.lo
        for mu in mus:
            res = run_edge_study(
                n=args.n, d=args.d, mu0=mu, reps=args.reps, seed=seed,
                alpha=args.alpha, scheme=args.sim_scheme, kernel=args.kernel,
                z0=grid.lo, gamma=args.gamma, method=args.method,
            )
            lo, hi = res.wilson()
            rows.append((args.test, mu, args.n, args.d, res.reps,
                         int(res.rejections.sum()), res.rejection_rate, lo, hi))
    else:
        manifest["B"] = args.B
        manifest["super_k"] = args.super_k
        manifest["two_sided"] = args.two_sided
        if args.test == "supergraph":
            if len(grid) != 1:
                raise ValueError("supergraph power study needs a single-point --grid Z0")
            manifest["z0"] = grid.lo
            z0, grid_count = grid.lo, 1
        else:
            if not grid_text.startswith("0:1:"):
                raise ValueError("uniform power study needs --grid 0:1:N (interior grid)")
            manifest["grid"] = list(grid)
            z0, grid_count = 0.5, len(grid)
        for mu in mus:
            res = run_graph_study(
                test=args.test, n=args.n, d=args.d, super_k=args.super_k,
                mu=mu, reps=args.reps, seed=seed, B=args.B, alpha=args.alpha,
                grid_count=grid_count, z0=z0, scheme=args.sim_scheme,
                kernel=args.kernel, gamma=args.gamma, method=args.method,
                two_sided=args.two_sided,
            )
            lo, hi = res.wilson()
            rows.append((args.test, mu, args.n, args.d, res.reps,
                         int(res.rejections.sum()), res.rejection_rate, lo, hi))
    _write_csv(
        os.path.join(out, "power.csv"),
        manifest,
        ["test", "mu0", "n", "d", "reps", "rejections",
         "rejection_rate", "wilson_lo", "wilson_hi"],
        rows,
    )
    _write_json(os.path.join(out, "manifest.json"), manifest)
    for row in rows:
        print(f"{row[0]} mu0={row[1]}: rate={row[6]:.3f} [{row[7]:.3f}, {row[8]:.3f}]")
    return 0


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------


def _add_common(p, default_h: str, default_grid: str) -> None:
    p.add_argument("--output", required=True, help="output directory")
    p.add_argument("--kernel", default="epanechnikov", choices=sorted(KERNEL_NAMES))
    p.add_argument("--h-rule", default=default_h,
                   help="estimate | test | fixed:H | rule:C (C * n^-1/5)")
    p.add_argument("--lambda-rule", default="default",
                   help="default | fixed:L | rule:C")
    p.add_argument("--gamma", type=float, default=0.5)
    p.add_argument("--method", default="calibrated-clime", choices=list(METHODS))
    p.add_argument("--grid", default=default_grid,
                   help="a:b:n or a single point; 0:1:n means the n interior points k/(n+1)")
    p.add_argument("--seed", type=int, default=None)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="tvnpn",
        description="Time-varying nonparanormal graphical models: "
                    "estimation, tests, and simulation studies.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("estimate", help="correlation/inverse path over a grid")
    _add_common(p, "estimate", "0:1:100")
    p.add_argument("--input", required=True, help="dataset CSV (z,x1..xd)")
    p.add_argument("--support-threshold", type=float, default=1e-8)
    p.set_defaults(func=cmd_estimate)

    p = sub.add_parser("test-edge", help="single-entry test at one point")
    _add_common(p, "test", "0.5")
    p.add_argument("--input", required=True)
    p.add_argument("--edge", required=True, help="1-based 'j,k'")
    p.add_argument("--alpha", type=float, default=0.05)
    p.set_defaults(func=cmd_test_edge)

    p = sub.add_parser("test-graph", help="super-graph bootstrap test at one point")
    _add_common(p, "test", "0.5")
    p.add_argument("--input", required=True)
    p.add_argument("--graph", required=True, help='graph JSON {"d":..,"edges":[[j,k],..]} (1-based)')
    p.add_argument("--alpha", type=float, default=0.05)
    p.add_argument("--B", type=int, default=1000)
    p.add_argument("--two-sided", action="store_true")
    p.set_defaults(func=cmd_test_graph)

    p = sub.add_parser("test-uniform", help="uniform-over-grid bootstrap test")
    _add_common(p, "test", "0:1:100")
    p.add_argument("--input", required=True)
    p.add_argument("--graph", required=True, help='graph JSON {"d":..,"edges":[[j,k],..]} (1-based)')
    p.add_argument("--alpha", type=float, default=0.05)
    p.add_argument("--B", type=int, default=1000)
    p.add_argument("--two-sided", action="store_true")
    p.set_defaults(func=cmd_test_uniform)

    p = sub.add_parser("simulate", help="draw a synthetic dataset + truth sidecar")
    p.add_argument("--output", required=True)
    p.add_argument("--sim-scheme", default="gaussian", choices=list(SCHEMES))
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--force-edge", default=None, help="1-based 'j,k' pinned along the path")
    p.add_argument("--force-value", type=float, default=0.0)
    p.add_argument("--seed", type=int, default=None)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("roc-study", help="support-recovery ROC sweep")
    p.add_argument("--output", required=True)
    p.add_argument("--sim-scheme", default="gaussian", choices=list(SCHEMES))
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--reps", type=int, default=20, help="simulation runs")
    p.add_argument("--kernel", default="epanechnikov", choices=sorted(KERNEL_NAMES))
    p.add_argument("--gamma", type=float, default=0.5)
    p.add_argument("--lambda-path", default=None, help="'lo:hi:count', log-spaced")
    p.add_argument("--fpr-target", type=float, default=0.2)
    p.add_argument("--seed", type=int, default=None)
    p.set_defaults(func=cmd_roc_study)

    p = sub.add_parser("power-study", help="Monte-Carlo rejection-rate table")
    _add_common(p, "test", "0.5")
    p.add_argument("--test", required=True, choices=["edge", "supergraph", "uniform"])
    p.add_argument("--sim-scheme", default="gaussian", choices=list(SCHEMES))
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--mu0", default="0.0",
                   help="comma-separated forced values (0 = null); one table row each")
    p.add_argument("--reps", type=int, default=200)
    p.add_argument("--alpha", type=float, default=0.05)
    p.add_argument("--B", type=int, default=500, help="bootstrap replicates (graph tests)")
    p.add_argument("--super-k", type=int, default=4,
                   help="candidate ring-graph degree (graph tests)")
    p.add_argument("--two-sided", action="store_true")
    p.set_defaults(func=cmd_power_study, grid=None)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except _USER_ERRORS as exc:
        print(f"tvnpn: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
