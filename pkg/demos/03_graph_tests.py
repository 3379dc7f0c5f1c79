"""
Bootstrap tests against a candidate graph
=========================================

The super-graph test asks whether a candidate graph contains the true
conditional dependence structure at one index point; the uniform test asks
the same simultaneously over a grid.  Both calibrate their thresholds with
a Gaussian multiplier bootstrap of the score statistic.

Two scenarios, mirroring a size/power study:

* truth with no edges at all — every candidate contains it, so the tests
  should keep H0 (rejections here are pure type-I error);
* truth with strong edges inside a ring scaffold — the empty k = 0
  candidate misses them all, so the tests should reject.
"""

import numpy as np

from tvnpn.clime import ClimeConfig, inverse_correlation
from tvnpn.datamodel import KernelSpec
from tvnpn.inference import supergraph_test, uniform_test
from tvnpn.kendall import kendall_tau, latent_correlation, pair_summary
from tvnpn.simgen import SimConfig, knn_graph, sample_dataset, truth_path
from tvnpn.studies import (
    bandwidth_test,
    desk_sim_config,
    interior_grid,
    lambda_rule,
)

d, n, z0 = 10, 600, 0.5
h = bandwidth_test(n)
spec = KernelSpec("epanechnikov", h)
cfg = ClimeConfig(lam=lambda_rule(n, d, h))
grid = interior_grid(10)


def inverse_at(data, z):
    sigma = latent_correlation(kendall_tau(pair_summary(data, spec, z)))
    return inverse_correlation(sigma, cfg, z0=z).omega


def run_both(data, candidate, label):
    omega0 = inverse_at(data, z0)
    point = supergraph_test(
        data, spec, z0, omega0, candidate, B=500, seed=11, two_sided=True
    )
    omega_path = [inverse_at(data, z) for z in grid]
    path = uniform_test(
        data, spec, grid, omega_path, candidate, B=500, seed=11,
        two_sided=True,
    )
    print(label)
    for name, rep in (("super-graph at z0", point),
                      (f"uniform over {len(grid.points)} points", path)):
        verdict = "reject" if rep.reject else "keep"
        print(f"  {name:<24} statistic {rep.statistic:6.3f}"
              f"  threshold {rep.threshold:6.3f}  -> {verdict} H0")
    print()


# --- true null: the model has no edges, so the k = 4 ring contains it -------
rng = np.random.default_rng(0)
truth = truth_path(SimConfig(d=d, identity=True), rng)
data = sample_dataset(truth, n, rng)
run_both(data, knn_graph(d, 4), "no-edge truth, k = 4 candidate (true null):")

# --- false null: strong edges, and the empty candidate misses them ----------
rng = np.random.default_rng(3)
truth = truth_path(desk_sim_config(d, mu_min=0.6, mu_max=0.9), rng)
data = sample_dataset(truth, n, rng)
run_both(data, knn_graph(d, 0),
         "strong-edge truth, k = 0 candidate (violated null):")
