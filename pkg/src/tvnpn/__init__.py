"""Time-varying nonparanormal graphical models.

Estimation of index-dependent latent correlation and inverse-correlation
paths from rank statistics, post-regularization tests for single entries,
super-graphs, and uniform-over-the-index hypotheses, plus the synthetic
model and baselines used to validate them.
"""

from .datamodel import (
    Dataset,
    DatasetFormatError,
    DimensionError,
    DomainError,
    EvalGrid,
    Graph,
    KERNEL_NAMES,
    KernelSpec,
    kernel_eval,
    kernel_weights,
    load_dataset,
    save_dataset,
    validate_correlation,
    validate_symmetric,
)
from .kendall import (
    DegenerateWindowError,
    PairSummary,
    PathPoint,
    TauEstimate,
    correlation_path,
    kendall_tau,
    latent_correlation,
    pair_summary,
)
from .simplex import LPResult, lp_solve
from .clime import (
    METHODS,
    ClimeConfig,
    ClimeInfeasibleError,
    ClimeNumericalError,
    InverseEstimate,
    calibrated_clime_column,
    clime_column,
    inverse_correlation,
    min_magnitude_symmetrize,
)
from .inference import (
    BootstrapDegenerateError,
    BootstrapDraw,
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
from .simgen import (
    SCHEMES,
    SimConfig,
    TruthPath,
    anchor_graphs,
    knn_graph,
    roc_point,
    roc_points,
    sample_dataset,
    truth_path,
)
from .baselines import (
    LassoConfig,
    kernel_neighborhood_column,
    kernel_pearson,
    neighborhood_graph,
)
from .studies import (
    EdgeStudyResult,
    GraphStudyResult,
    RocStudyResult,
    bandwidth_estimate,
    bandwidth_test,
    interior_grid,
    ks_distance_normal,
    lambda_rule,
    run_edge_study,
    run_graph_study,
    run_roc_study,
    tpr_at_fpr,
    wilson_interval,
)

__version__ = "0.1.0"

__all__ = [
    "__version__",
    # datamodel
    "Dataset", "DatasetFormatError", "DimensionError", "DomainError",
    "EvalGrid", "Graph", "KERNEL_NAMES", "KernelSpec",
    "kernel_eval", "kernel_weights", "load_dataset", "save_dataset",
    "validate_correlation", "validate_symmetric",
    # kendall
    "DegenerateWindowError", "PairSummary", "PathPoint", "TauEstimate",
    "correlation_path", "kendall_tau", "latent_correlation", "pair_summary",
    # simplex
    "LPResult", "lp_solve",
    # clime
    "METHODS", "ClimeConfig", "ClimeInfeasibleError", "ClimeNumericalError",
    "InverseEstimate", "calibrated_clime_column", "clime_column",
    "inverse_correlation", "min_magnitude_symmetrize",
    # inference
    "BootstrapDegenerateError", "BootstrapDraw", "ScoreContext", "TestReport",
    "ZeroVarianceError", "bootstrap_draw", "bootstrap_quantile",
    "build_score_context", "edge_test", "jackknife_variance", "score",
    "score_matrix", "std_normal_cdf", "std_normal_quantile",
    "supergraph_statistic", "supergraph_test", "uniform_statistic",
    "uniform_test",
    # simgen
    "SCHEMES", "SimConfig", "TruthPath", "anchor_graphs", "knn_graph",
    "roc_point", "roc_points", "sample_dataset", "truth_path",
    # baselines
    "LassoConfig", "kernel_neighborhood_column", "kernel_pearson",
    "neighborhood_graph",
    # studies
    "EdgeStudyResult", "GraphStudyResult", "RocStudyResult",
    "bandwidth_estimate", "bandwidth_test", "interior_grid",
    "ks_distance_normal", "lambda_rule", "run_edge_study",
    "run_graph_study", "run_roc_study", "tpr_at_fpr", "wilson_interval",
]
