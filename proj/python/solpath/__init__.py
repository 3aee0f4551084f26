"""Learned solution paths for parametric convex problems."""

from ._core import (
    AuditReport,
    AuditRow,
    BaselineRun,
    Basis,
    ClassificationData,
    DecayFit,
    DiscretizationSchedule,
    GroundTruthGrid,
    LambdaDistribution,
    MarketModel,
    ParametricProblem,
    PiecewisePath,
    QuadratureRule,
    RunTrace,
    SpectralReport,
    StageResult,
    TraceRow,
    analytic_ground_truth_12d,
    analytic_path_12d,
    chebyshev_coeffs,
    chebyshev_eval,
    compute_C,
    compute_c,
    compute_ground_truth,
    decay_fit,
    decomposition_audit,
    fhat_value,
    make_schedule,
    path_error_sup,
    portfolio_2d,
    portfolio_12d,
    quadratic_toy_path,
    run_alsp,
    run_discretization,
    run_lsp,
    rwgc_audit,
    spectral_report,
    synth_classification,
    synth_market,
    toy_path_value,
    truncation_path_error_bound,
    uniform_grid_nodes,
    weighted_logistic,
)

__all__ = [name for name in dir() if not name.startswith("_")]
__version__ = "0.1.0"
