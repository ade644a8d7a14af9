"""Information-driven shrinkage estimation for generalized linear models.

Fit a target data set while borrowing a tunable amount of information from an
already-analyzed source data set: the source's fitted model enters the target
likelihood through a Kullback-Leibler penalty whose weight (the dial, lambda)
is chosen by minimizing a plug-in estimate of the mean squared error.
"""

from .baselines import (
    chen_owen_shi,
    chen_owen_shi_lambda_hat,
    pooled_mle,
    zheng_weight_estimator,
)
from .data import Dataset, FullDesign, GaussianGram, SourceSummary
from .dial import (
    MseCurve,
    analytic_mse_gaussian,
    delta_sq_hat,
    estimated_amse_glm,
    estimated_mse_gaussian,
    lambda_bound_gaussian,
    lambda_bound_glm,
    select_lambda,
    select_lambda_gaussian,
    select_lambda_glm,
)
from .errors import (
    DimensionMismatchError,
    NonConvergenceError,
    ParseError,
    PayloadMismatchError,
    RankDeficientError,
    SeparationError,
    ShrinkageError,
    TooManySourcesError,
    ValidationError,
    ZeroDeltaError,
)
from .estimators import ShrinkageClassifier, ShrinkageRegressor
from .families import BERNOULLI, GAUSSIAN, get_family
from .glm import MleFit, fit_mle, gram_matrix, summarize_source, weighted_info
from .harness import (
    SETTINGS,
    SimConfig,
    SummaryTable,
    generate_source,
    lambda_sweep,
    run_setting,
    validate_config,
)
from .inference import (
    IntervalSet,
    confidence_intervals,
    debias_identity_residual,
    sandwich_variance,
    wald_intervals,
)
from .multisource import (
    SourceConfig,
    concat_sources,
    enumerate_configs,
    select_source_config,
)
from .shrink import (
    DialEstimate,
    estimating_function,
    kl_divergence,
    kl_penalty,
    objective,
    penalized_hessian,
    solve_dial_estimate,
)

__version__ = "0.1.0"

__all__ = [
    "BERNOULLI",
    "GAUSSIAN",
    "Dataset",
    "DialEstimate",
    "DimensionMismatchError",
    "FullDesign",
    "GaussianGram",
    "IntervalSet",
    "MleFit",
    "MseCurve",
    "NonConvergenceError",
    "ParseError",
    "PayloadMismatchError",
    "RankDeficientError",
    "SETTINGS",
    "SeparationError",
    "ShrinkageClassifier",
    "ShrinkageError",
    "ShrinkageRegressor",
    "SimConfig",
    "SourceConfig",
    "SourceSummary",
    "SummaryTable",
    "TooManySourcesError",
    "ValidationError",
    "ZeroDeltaError",
    "analytic_mse_gaussian",
    "chen_owen_shi",
    "chen_owen_shi_lambda_hat",
    "concat_sources",
    "confidence_intervals",
    "debias_identity_residual",
    "delta_sq_hat",
    "enumerate_configs",
    "estimated_amse_glm",
    "estimated_mse_gaussian",
    "estimating_function",
    "fit_mle",
    "generate_source",
    "get_family",
    "gram_matrix",
    "kl_divergence",
    "kl_penalty",
    "lambda_bound_gaussian",
    "lambda_bound_glm",
    "lambda_sweep",
    "objective",
    "penalized_hessian",
    "pooled_mle",
    "run_setting",
    "sandwich_variance",
    "select_lambda",
    "select_lambda_gaussian",
    "select_lambda_glm",
    "select_source_config",
    "solve_dial_estimate",
    "summarize_source",
    "validate_config",
    "wald_intervals",
    "weighted_info",
    "zheng_weight_estimator",
]
