"""
Rank-based vs moment-based inputs under contamination
=====================================================

Support-recovery ROC comparison of two inputs to the same calibrated
constrained-L1 inversion: the kernel-smoothed Kendall correlation (rank
based, outlier tolerant) and the kernel-weighted Pearson correlation
(moment based).  Under contaminated marginals the rank-based input keeps
its recovery power; the moment-based one degrades.
"""

from tvnpn.studies import run_roc_study

SCHEMES = ("gaussian", "contaminated_5pct")

for scheme in SCHEMES:
    res = run_roc_study(scheme, n=300, d=8, runs=3, seed=5)
    print(f"scheme = {scheme}")
    for method in ("kendall-clime", "pearson-clime"):
        tpr = res.mean_tpr_at(method, 0.2)
        print(f"  {method:14s} mean TPR at FPR = 0.2: {tpr:.3f}")
    # a coarse look at the whole averaged curve
    for method in ("kendall-clime", "pearson-clime"):
        pts = [
            f"({f:.2f}, {t:.2f})" for f, t in res.mean_curve(method)[::3]
        ]
        print(f"  {method:14s} mean curve: {' '.join(pts)}")
    print()
