"""Nonparametric scalar-on-function regression and functional gradients.

Curves sampled on a shared grid are decomposed into principal
components; a kernel regression estimates the response surface and a
pair-based kernel estimator recovers the gradient field of the response
with respect to the predictor curve, component by component along the
eigenfunctions. A simulation toolkit with analytic ground truth and
small-ball probability checks round out the package.
"""

from .derivative import (
    DerivBandwidths,
    DerivativeEstimate,
    FunctionalGradientEstimator,
    derivative_generating_function,
    directional_derivative,
    gradient_at,
    gradient_component,
    misalignment,
    pair_weight,
    steepest_direction,
)
from .errors import (
    AsymmetricMatrix,
    DegenerateSpectrum,
    EmptyNeighborhood,
    EmptyPairNeighborhood,
    EmptySample,
    FormatError,
    FuncgradError,
    GridMismatch,
    InsufficientSample,
    InsufficientTimepoints,
    InvalidDirection,
    MissingComponent,
    ZeroDifference,
    ZeroGradient,
)
from .fpca import (
    EigenSystem,
    FunctionalPCA,
    Sample,
    eigendecompose,
    empirical_covariance,
    fit_eigensystem,
    mean_function,
    scores,
    select_components,
)
from .grid import Curve, Grid, axpy, inner_product, l2_norm
from .ingest import (
    LongitudinalTable,
    ReportBundle,
    export_report,
    growth_rates,
    load_curves_csv,
    load_responses_csv,
    save_curves_csv,
)
from .regression import (
    FunctionalKernelRegression,
    KernelSpec,
    RegressionFit,
    cv_bandwidth,
    default_bandwidth_candidates,
    kernel_eval,
    nw_estimate,
)
from .simulate import (
    FunctionalSpec,
    ProcessSpec,
    evaluate_functional,
    fourier_basis,
    gen_response,
    preset_eigenvalues,
    sample_process,
    true_gradient_component,
)
from .smallball import SmallBallParams, mc_small_ball, rate_bound, small_ball_asymptote

__version__ = "0.1.0"

__all__ = [
    "AsymmetricMatrix",
    "Curve",
    "DegenerateSpectrum",
    "DerivBandwidths",
    "DerivativeEstimate",
    "EigenSystem",
    "EmptyNeighborhood",
    "EmptyPairNeighborhood",
    "EmptySample",
    "FormatError",
    "FuncgradError",
    "FunctionalGradientEstimator",
    "FunctionalKernelRegression",
    "FunctionalPCA",
    "FunctionalSpec",
    "Grid",
    "GridMismatch",
    "InsufficientSample",
    "InsufficientTimepoints",
    "InvalidDirection",
    "KernelSpec",
    "LongitudinalTable",
    "MissingComponent",
    "ProcessSpec",
    "RegressionFit",
    "ReportBundle",
    "Sample",
    "SmallBallParams",
    "ZeroDifference",
    "ZeroGradient",
    "axpy",
    "cv_bandwidth",
    "default_bandwidth_candidates",
    "derivative_generating_function",
    "directional_derivative",
    "eigendecompose",
    "empirical_covariance",
    "evaluate_functional",
    "export_report",
    "fit_eigensystem",
    "fourier_basis",
    "gen_response",
    "gradient_at",
    "gradient_component",
    "growth_rates",
    "inner_product",
    "kernel_eval",
    "l2_norm",
    "load_curves_csv",
    "load_responses_csv",
    "mc_small_ball",
    "mean_function",
    "misalignment",
    "nw_estimate",
    "pair_weight",
    "preset_eigenvalues",
    "rate_bound",
    "sample_process",
    "save_curves_csv",
    "scores",
    "select_components",
    "small_ball_asymptote",
    "steepest_direction",
    "true_gradient_component",
]
