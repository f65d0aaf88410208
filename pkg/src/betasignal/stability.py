"""Threshold stability and risk under the fitted Beta model.

With TR ~ tr and FR ~ fr and a prevalence ``pi`` of label 1, the expected
confusion fractions at threshold t are

    tp = pi (1 - F_tr(t))        fn = pi F_tr(t)
    fp = (1 - pi) (1 - F_fr(t))  tn = (1 - pi) F_fr(t)

which turns every confusion-matrix metric into a smooth function of t that
can be differentiated and perturbed.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass
from typing import Optional

import numpy as np

from . import special
from .beta import BetaParams, make_epsilon_beta
from .divergence import Metric, distance
from .errors import DomainError
from .signals import METRICS, metrics_from_counts

#: |d metric / dt| above this flags a steep region.
STEEPNESS_TOLERANCE = 2.0
DEFAULT_STEP = 1e-4


@dataclass(frozen=True)
class SmoothModel:
    tr: BetaParams
    fr: BetaParams
    prevalence: float

    def __post_init__(self):
        if not (0.0 < self.prevalence < 1.0):
            raise DomainError(f"prevalence must lie in (0, 1), got {self.prevalence!r}")

    @classmethod
    def from_labels(cls, tr, fr, labels) -> "SmoothModel":
        y = np.asarray(labels)
        return cls(tr, fr, float(np.mean(y == 1)))


def _check_metric(metric):
    if metric not in METRICS:
        raise DomainError(f"unknown metric {metric!r}; expected one of {METRICS}")


def smooth_metric(model: SmoothModel, metric: str, threshold: float) -> Optional[float]:
    """Model-implied value of ``metric`` at ``threshold``; ``None`` where undefined."""
    _check_metric(metric)
    if not (0.0 < threshold < 1.0):
        raise DomainError(f"threshold must lie in (0, 1), got {threshold!r}")
    pi = model.prevalence
    f_tr = special.reg_inc_beta(threshold, model.tr.alpha, model.tr.beta)
    f_fr = special.reg_inc_beta(threshold, model.fr.alpha, model.fr.beta)
    m = metrics_from_counts(pi * (1.0 - f_tr), (1.0 - pi) * (1.0 - f_fr),
                            pi * f_tr, (1.0 - pi) * f_fr)
    return getattr(m, metric)


@dataclass(frozen=True)
class StabilityReport:
    threshold: float
    metric: str
    value: Optional[float]
    first_derivative: Optional[float]
    second_derivative: Optional[float]
    step_change: Optional[float]
    flagged_steep: Optional[bool]

    def as_dict(self) -> dict:
        return asdict(self)


def metric_derivatives(model: SmoothModel, metric: str, threshold: float,
                       step: float = DEFAULT_STEP,
                       steepness_tolerance: float = STEEPNESS_TOLERANCE) -> StabilityReport:
    """Central-difference first and second derivatives of a smooth metric.

    ``step_change`` is |f'(h) - f'(h/2)|, the change in the first derivative
    when the step is halved. If the metric is undefined anywhere on the
    stencil, the derivative fields are ``None``.
    """
    _check_metric(metric)
    if not step > 0.0:
        raise DomainError(f"step must be > 0, got {step!r}")
    if not (0.0 < threshold - 2.0 * step and threshold + 2.0 * step < 1.0):
        raise DomainError(f"threshold {threshold!r} +/- 2*step leaves (0, 1)")
    h = step
    pts = [threshold - h, threshold - h / 2, threshold, threshold + h / 2, threshold + h]
    vals = [smooth_metric(model, metric, t) for t in pts]
    if any(v is None for v in vals):
        return StabilityReport(threshold, metric, vals[2], None, None, None, None)
    fm, fmh, f0, fph, fp = vals
    d1 = (fp - fm) / (2.0 * h)
    d1_half = (fph - fmh) / h
    d2 = (fp - 2.0 * f0 + fm) / (h * h)
    return StabilityReport(threshold, metric, f0, d1, d2, abs(d1 - d1_half),
                           abs(d1) > steepness_tolerance)


@dataclass(frozen=True)
class Perturbation:
    before: Optional[float]
    after: Optional[float]
    delta: Optional[float]


def perturbation_delta(model: SmoothModel, metric: str, threshold: float,
                       shift: float) -> Perturbation:
    before = smooth_metric(model, metric, threshold)
    after = smooth_metric(model, metric, threshold + shift)
    if before is None or after is None:
        return Perturbation(before, after, None)
    return Perturbation(before, after, after - before)


def credible_interval(p: BetaParams, mass: float = 0.95) -> tuple[float, float]:
    """Equal-tailed interval holding ``mass`` of the Beta distribution."""
    if not (0.0 < mass < 1.0):
        raise DomainError(f"mass must lie in (0, 1), got {mass!r}")
    tail = 0.5 * (1.0 - mass)
    return (special.beta_quantile(tail, p.alpha, p.beta),
            special.beta_quantile(1.0 - tail, p.alpha, p.beta))


@dataclass(frozen=True)
class BoundsReport:
    """Observed distances for the epsilon-Beta separation inequalities.

    ``lower_holds`` reports d(R, L) >= d(P, Q); ``upper_holds`` reports
    d(R, L) <= d(L, P) + d(P, Q) + d(Q, R). ``d_LP_plus_QR`` is
    d(L, P) + d(Q, R) alone, the slack term of the relaxed upper bound.
    """

    metric: str
    epsilon: float
    concentration: float
    d_RL: float
    d_PQ: float
    d_LP_plus_QR: float
    upper_bound_rhs: float
    lower_holds: bool
    upper_holds: bool

    def as_dict(self) -> dict:
        return asdict(self)


def check_separation_bounds(p: BetaParams, q: BetaParams, epsilon: float = 0.01,
                            concentration: float = 20.0, metric: Metric = "js_distance",
                            slack: float = 1e-8, d_rl: Optional[float] = None) -> BoundsReport:
    """Evaluate the separation inequalities for one (P, Q) pair; never asserts.

    L and R are the left and right epsilon-Betas with the given concentration.
    ``slack`` absorbs quadrature error in both comparisons. ``d_rl`` may be
    passed to reuse a precomputed d(R, L).
    """
    left = make_epsilon_beta(epsilon, "left", concentration)
    right = make_epsilon_beta(epsilon, "right", concentration)
    if d_rl is None:
        d_rl = distance(right, left, metric)
    d_pq = distance(p, q, metric)
    side = distance(left, p, metric) + distance(q, right, metric)
    rhs = side + d_pq
    return BoundsReport(
        metric=metric,
        epsilon=float(epsilon),
        concentration=float(concentration),
        d_RL=d_rl,
        d_PQ=d_pq,
        d_LP_plus_QR=side,
        upper_bound_rhs=rhs,
        lower_holds=d_rl >= d_pq - slack,
        upper_holds=d_rl <= rhs + slack,
    )


@dataclass(frozen=True)
class BoundsSummary:
    trials: int
    seed: int
    shape_range: tuple[float, float]
    lower_violations: int
    upper_violations: int
    reports: tuple[BoundsReport, ...]

    @property
    def lower_violation_rate(self) -> float:
        return self.lower_violations / self.trials if self.trials else 0.0

    @property
    def upper_violation_rate(self) -> float:
        return self.upper_violations / self.trials if self.trials else 0.0


def monte_carlo_bounds(trials: int = 200, seed: int = 0, epsilon: float = 0.01,
                       concentration: float = 20.0, metric: Metric = "js_distance",
                       shape_range: tuple[float, float] = (1.0, 30.0)) -> BoundsSummary:
    """Bounds reports for ``trials`` random (P, Q) pairs with uniform shapes."""
    if trials < 0:
        raise DomainError("trials must be >= 0")
    rng = np.random.default_rng(seed)
    shapes = rng.uniform(shape_range[0], shape_range[1], size=(trials, 4))
    left = make_epsilon_beta(epsilon, "left", concentration)
    d_rl = distance(left.swapped(), left, metric)
    reports = tuple(
        check_separation_bounds(BetaParams(a1, b1), BetaParams(a2, b2), epsilon,
                                concentration, metric, d_rl=d_rl)
        for a1, b1, a2, b2 in shapes)
    return BoundsSummary(
        trials=trials,
        seed=seed,
        shape_range=(float(shape_range[0]), float(shape_range[1])),
        lower_violations=sum(not r.lower_holds for r in reports),
        upper_violations=sum(not r.upper_holds for r in reports),
        reports=reports,
    )

