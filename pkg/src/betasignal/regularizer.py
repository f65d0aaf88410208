"""KL separation between fitted TR/FR Betas as a differentiable training signal.

The separation is ``KL(tr || fr)`` where both Betas are moment-matched to the
current scores of their class. Its gradient with respect to each score
chains the closed-form KL partials (digamma/trigamma) through the moment
fit: a score only moves its own class's mean and population variance,

    d mean / d s_i = 1 / n_c,    d var / d s_i = 2 (s_i - mean) / n_c.

:func:`export_objective` packages ``-lambda * gradient`` (and a diagonal
curvature) in the (grad, hess) layout that custom-objective hooks of
gradient-boosting libraries consume. :func:`demo_train` exercises the same
math on a full-batch logistic regression.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import special
from .beta import CLIP, fit_signal_pair, split_classes
from .divergence import kl_beta
from .errors import (
    BetaSignalError,
    BoundaryGradientError,
    ClassMissingError,
    DomainError,
    InsufficientDataError,
    TrainingDivergedError,
)
from .signals import confusion_at, metrics_at

#: Step for the finite-difference curvature of the analytic gradient.
CURVATURE_STEP = 1e-5


@dataclass(frozen=True)
class RegularizerGrad:
    gradient: np.ndarray
    curvature: np.ndarray
    kl_value: float


def kl_separation(scores, labels) -> float:
    """KL(tr || fr) of the moment-matched class Betas."""
    tr, fr = fit_signal_pair(scores, labels)
    return kl_beta(tr, fr)


def _kl_partials(a1, b1, a2, b2):
    """Partials of KL(Beta(a1, b1) || Beta(a2, b2)) in (a1, b1, a2, b2)."""
    s1 = a1 + b1
    s2 = a2 + b2
    t_s1 = (a2 - a1 + b2 - b1) * special.trigamma(s1)
    d_a1 = (a1 - a2) * special.trigamma(a1) + t_s1
    d_b1 = (b1 - b2) * special.trigamma(b1) + t_s1
    psi_s = special.digamma(s1) - special.digamma(s2)
    d_a2 = special.digamma(a2) - special.digamma(a1) + psi_s
    d_b2 = special.digamma(b2) - special.digamma(b1) + psi_s
    return d_a1, d_b1, d_a2, d_b2


def _shape_partials(mu, var):
    """d(alpha, beta) / d(mean, var) for the moment-matched Beta."""
    om = 1.0 - mu
    da_dmu = (2.0 * mu - 3.0 * mu * mu) / var - 1.0
    da_dvar = -mu * mu * om / (var * var)
    db_dmu = om * (1.0 - 3.0 * mu) / var + 1.0
    db_dvar = -mu * om * om / (var * var)
    return da_dmu, da_dvar, db_dmu, db_dvar


def _shapes(mu, var):
    alpha = ((1.0 - mu) / var - 1.0 / mu) * mu * mu
    return alpha, (1.0 / mu - 1.0) * alpha


def _moment_sensitivities(mu1, var1, mu0, var0):
    """dKL/d(mean, var) of each class; broadcasts over arrays."""
    a1, b1 = _shapes(mu1, var1)
    a2, b2 = _shapes(mu0, var0)
    d_a1, d_b1, d_a2, d_b2 = _kl_partials(a1, b1, a2, b2)
    p1 = _shape_partials(mu1, var1)
    p0 = _shape_partials(mu0, var0)
    g_mu1 = d_a1 * p1[0] + d_b1 * p1[2]
    g_var1 = d_a1 * p1[1] + d_b1 * p1[3]
    g_mu0 = d_a2 * p0[0] + d_b2 * p0[2]
    g_var0 = d_a2 * p0[1] + d_b2 * p0[3]
    return g_mu1, g_var1, g_mu0, g_var0


def _class_moments(x):
    mu = float(x.mean())
    return mu, float(np.mean((x - mu) ** 2))


def kl_separation_grad(scores, labels, curvature: bool = True,
                       step: float = CURVATURE_STEP) -> RegularizerGrad:
    """Analytic d KL(tr || fr) / d score for every sample.

    ``curvature`` holds the diagonal second derivative, computed as a central
    difference of the analytic gradient (each coordinate perturbed on its own).

    Raises:
        BoundaryGradientError: a score lies on or outside the clipping interval.
    """
    s = np.asarray(scores, dtype=float).ravel()
    y = np.asarray(labels).ravel()
    if s.shape != y.shape:
        raise DomainError(f"scores and labels differ in length ({s.size} vs {y.size})")
    if np.any(~np.isfinite(s)) or np.any(s <= CLIP) or np.any(s >= 1.0 - CLIP):
        raise BoundaryGradientError(
            f"scores must lie strictly inside ({CLIP}, {1.0 - CLIP}) for the gradient")
    kl = kl_separation(s, y)  # validates classes and moments
    pos = y == 1
    x1, x0 = split_classes(s, y)
    n1, n0 = x1.size, x0.size
    mu1, var1 = _class_moments(x1)
    mu0, var0 = _class_moments(x0)
    g_mu1, g_var1, g_mu0, g_var0 = _moment_sensitivities(mu1, var1, mu0, var0)

    grad = np.empty_like(s)
    grad[pos] = (g_mu1 + 2.0 * g_var1 * (x1 - mu1)) / n1
    grad[~pos] = (g_mu0 + 2.0 * g_var0 * (x0 - mu0)) / n0

    curv = np.zeros_like(s)
    if curvature:
        curv[pos] = _curvature(x1, mu1, var1, (mu0, var0), own_first=True, step=step)
        curv[~pos] = _curvature(x0, mu0, var0, (mu1, var1), own_first=False, step=step)
    return RegularizerGrad(gradient=grad, curvature=curv, kl_value=kl)


def _curvature(x, mu, var, other, own_first, step):
    n = x.size
    dev = x - mu
    out = np.zeros_like(x)
    for sign in (1.0, -1.0):
        d = sign * step
        mu_p = mu + d / n
        var_p = var + (2.0 * dev * d + d * d * (1.0 - 1.0 / n)) / n
        if own_first:
            g_mu, g_var, _, _ = _moment_sensitivities(mu_p, var_p, *other)
        else:
            _, _, g_mu, g_var = _moment_sensitivities(*other, mu_p, var_p)
        g = (g_mu + 2.0 * g_var * (x + d - mu_p)) / n
        out += sign * g
    return out / (2.0 * step)


def export_objective(scores, labels, lam: float) -> tuple[np.ndarray, np.ndarray]:
    """Regularizer contribution for an external booster's custom objective.

    Input: aligned ``scores`` and ``labels`` of length n (current predictions
    in probability space). Output: aligned ``(grad, hess)`` of length n for the
    term ``-lam * KL(tr || fr)`` of a loss that is minimised, taken with
    respect to the scores. Callers boosting in margin space chain these
    through the link derivative themselves. The fit is recomputed from the
    given scores on every call; no state is kept between rounds.
    """
    if not lam >= 0.0:
        raise DomainError(f"lambda must be >= 0, got {lam!r}")
    rg = kl_separation_grad(scores, labels)
    return 0.0 - lam * rg.gradient, 0.0 - lam * rg.curvature


@dataclass(frozen=True)
class DemoTrainConfig:
    lam: float = 0.0
    learning_rate: float = 0.5
    epochs: int = 100
    seed: int = 0
    init_scale: float = 0.1

    def __post_init__(self):
        if not self.lam >= 0.0:
            raise DomainError("lambda must be >= 0")
        if not self.learning_rate > 0.0:
            raise DomainError("learning rate must be > 0")
        if not (isinstance(self.epochs, int) and self.epochs > 0):
            raise DomainError("epochs must be a positive integer")


@dataclass(frozen=True)
class EpochRecord:
    epoch: int
    loss: float
    accuracy: float | None
    mcc: float | None
    kl_separation: float


@dataclass(frozen=True)
class TrainResult:
    weights: np.ndarray
    history: list[EpochRecord] = field(default_factory=list)


def _sigmoid(z):
    return np.exp(-np.logaddexp(0.0, -z))


def add_bias(features) -> np.ndarray:
    x = np.asarray(features, dtype=float)
    if x.ndim != 2:
        raise DomainError("features must be a 2-D array")
    if not np.all(np.isfinite(x)):
        raise DomainError("features must be finite")
    return np.hstack([x, np.ones((x.shape[0], 1))])


def demo_objective(xb, labels, weights, lam):
    """Loss and weight gradient of ``BCE - lam * KL`` for a logistic model.

    ``xb`` carries the bias column already. Returns ``(loss, grad, scores, kl)``.
    """
    y = np.asarray(labels, dtype=float)
    z = xb @ weights
    p = _sigmoid(z)
    n = y.size
    bce = float(np.mean(np.logaddexp(0.0, z) - y * z))
    # d BCE / d z
    r = (p - y) / n
    if lam > 0.0:
        rg = kl_separation_grad(p, labels, curvature=False)
        kl = rg.kl_value
        r = r - lam * rg.gradient * p * (1.0 - p)
    else:
        kl = kl_separation(p, labels)
    return bce - lam * kl, xb.T @ r, p, kl


def demo_train(features, labels, config: DemoTrainConfig = DemoTrainConfig()) -> TrainResult:
    """Full-batch gradient descent on ``BCE - lam * kl_separation``.

    Weights (the last one is the bias) start at ``N(0, init_scale^2)`` drawn
    from ``config.seed``. ``history[e]`` describes the weights after ``e``
    updates; ``history[0]`` is the initial model.

    Raises:
        TrainingDivergedError: loss or weights became non-finite, or the
            scores collapsed so far that the per-epoch Beta fit failed.
    """
    xb = add_bias(features)
    y = np.asarray(labels).ravel()
    if xb.shape[0] != y.size:
        raise DomainError("features and labels differ in length")
    if not np.any(y == 1) or not np.any(y == 0):
        raise ClassMissingError("demo training needs both classes")
    if min(np.sum(y == 1), np.sum(y == 0)) < 2:
        raise InsufficientDataError("need at least 2 samples per class")
    rng = np.random.default_rng(config.seed)
    w = rng.normal(0.0, config.init_scale, size=xb.shape[1])
    history = []
    for epoch in range(config.epochs + 1):
        if not np.all(np.isfinite(w)):
            raise TrainingDivergedError(f"non-finite weights at epoch {epoch}", epoch=epoch)
        try:
            loss, grad, p, kl = demo_objective(xb, y, w, config.lam)
        except BetaSignalError as exc:
            if epoch == 0:
                raise
            raise TrainingDivergedError(f"scores collapsed at epoch {epoch}: {exc}",
                                        epoch=epoch) from exc
        if not (np.isfinite(loss) and np.all(np.isfinite(grad))):
            raise TrainingDivergedError(f"non-finite loss at epoch {epoch}", epoch=epoch)
        m = metrics_at(confusion_at(p, y, 0.5))
        history.append(EpochRecord(epoch, loss, m.accuracy, m.mcc, kl))
        if epoch < config.epochs:
            w = w - config.learning_rate * grad
    return TrainResult(weights=w, history=history)


def make_two_gaussians(n: int = 400, dim: int = 2, separation: float = 2.0,
                       seed: int = 0) -> tuple[np.ndarray, np.ndarray]:
    """Two unit-variance Gaussian classes whose means lie ``separation`` apart.

    Labels alternate 0/1 so both classes have n // 2 (or so) samples.
    """
    rng = np.random.default_rng(seed)
    labels = np.arange(n) % 2
    direction = np.ones(dim) / np.sqrt(dim)
    centres = (labels[:, None] - 0.5) * separation * direction[None, :]
    return centres + rng.normal(size=(n, dim)), labels
