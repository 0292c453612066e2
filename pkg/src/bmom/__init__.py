"""Bayesian method-of-moments inference for mean and regression models.

Posterior and predictive moments are derived from the data and two weak
assumptions about the realized error terms; the reported densities are the
maximum-entropy ones for those moments (normal given ``sigma^2``,
exponential for ``sigma^2``, Laplace after mixing over ``sigma^2``).
"""

__version__ = "0.1.0"

from .baseline import StudentPosterior, compare_report, t_interval, t_moments, t_sigma2_mean
from .densities import (
    IntervalEstimate,
    LaplaceDist,
    NormalDist,
    ScaledExponentialDist,
    central_interval,
    exp_scale_eval,
    laplace_eval,
    laplace_even_moment,
    laplace_from_mean_var,
    laplace_quantile,
    mixture_check,
    normal_eval,
)
from .errors import BMOMError
from .mean_model import MeanPosterior, Sample, fit_mean, mean_maxent, positive_mean_density, theta_interval
from .prior import ConceptualSample, fit_with_prior, stack
from .regression import (
    LeastSquaresFit,
    PredictivePoint,
    RegressionProblem,
    build_ar_design,
    build_design,
    coefficient_marginal,
    fit_regression,
    linear_combination_marginal,
    positive_combination_density,
    predictive_point,
    projection_diagnostics,
    realized_error_marginal,
)
from .sampler import DrawConfig, draw_joint, draw_predictive, summarize_draws

__all__ = [
    "StudentPosterior",
    "compare_report",
    "t_interval",
    "t_moments",
    "t_sigma2_mean",
    "IntervalEstimate",
    "LaplaceDist",
    "NormalDist",
    "ScaledExponentialDist",
    "central_interval",
    "exp_scale_eval",
    "laplace_eval",
    "laplace_even_moment",
    "laplace_from_mean_var",
    "laplace_quantile",
    "mixture_check",
    "normal_eval",
    "BMOMError",
    "MeanPosterior",
    "Sample",
    "fit_mean",
    "mean_maxent",
    "positive_mean_density",
    "theta_interval",
    "ConceptualSample",
    "fit_with_prior",
    "stack",
    "LeastSquaresFit",
    "PredictivePoint",
    "RegressionProblem",
    "build_ar_design",
    "build_design",
    "coefficient_marginal",
    "fit_regression",
    "linear_combination_marginal",
    "positive_combination_density",
    "predictive_point",
    "projection_diagnostics",
    "realized_error_marginal",
    "DrawConfig",
    "draw_joint",
    "draw_predictive",
    "summarize_draws",
]
