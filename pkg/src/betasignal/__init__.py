"""Continuous-signal evaluation of binary classifiers.

Scores of each class are modelled by a moment-matched Beta distribution;
separation, stability and risk are read off the fitted pair instead of a
single thresholded confusion matrix.
"""

__version__ = "0.1.0"

from .beta import (
    BetaParams,
    Moments,
    beta_cdf,
    beta_moments,
    beta_pdf,
    fit_beta_moments,
    fit_signal_pair,
    is_epsilon_beta,
    make_epsilon_beta,
    params_from_moments,
)
from .divergence import (
    DivergenceReport,
    divergence_report,
    js_divergence,
    kl_beta,
    lp_distance,
    overlap_area,
)
from .regularizer import (
    DemoTrainConfig,
    demo_train,
    export_objective,
    kl_separation,
    kl_separation_grad,
)
from .signals import (
    ConfusionMatrix,
    ScoredSample,
    confusion_at,
    empirical_curves,
    metrics_at,
    sweep,
)
from .stability import (
    SmoothModel,
    check_separation_bounds,
    credible_interval,
    metric_derivatives,
    perturbation_delta,
    smooth_metric,
)

__all__ = [
    "BetaParams", "Moments", "beta_cdf", "beta_moments", "beta_pdf", "fit_beta_moments",
    "fit_signal_pair", "is_epsilon_beta", "make_epsilon_beta", "params_from_moments",
    "DivergenceReport", "divergence_report", "js_divergence", "kl_beta", "lp_distance",
    "overlap_area", "DemoTrainConfig", "demo_train", "export_objective", "kl_separation",
    "kl_separation_grad", "ConfusionMatrix", "ScoredSample", "confusion_at",
    "empirical_curves", "metrics_at", "sweep", "SmoothModel", "check_separation_bounds",
    "credible_interval", "metric_derivatives", "perturbation_delta", "smooth_metric",
]
