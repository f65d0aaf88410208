"""Beta distributions as parametric models of class-conditional score curves.

A binary classifier's scores for label-1 samples (TR) and label-0 samples
(FR) are each summarised by a Beta(alpha, beta) fitted by moment matching:

    mean  = alpha / (alpha + beta)
    var   = alpha * beta / ((alpha + beta)^2 (alpha + beta + 1))

    alpha = ((1 - mean) / var - 1 / mean) * mean^2
    beta  = (1 / mean - 1) * alpha
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Literal

import numpy as np

from . import special
from .errors import (
    BetaSignalError,
    ClassMissingError,
    DegenerateDistributionError,
    DomainError,
    InfeasibleMomentsError,
    InsufficientDataError,
)

Side = Literal["left", "right"]

#: Scores are clipped into [CLIP, 1 - CLIP] before fitting.
CLIP = 1e-6


@dataclass(frozen=True)
class BetaParams:
    """Shape parameters of a Beta distribution."""

    alpha: float
    beta: float

    def __post_init__(self):
        for name in ("alpha", "beta"):
            v = getattr(self, name)
            if not (isinstance(v, (int, float, np.floating, np.integer))
                    and math.isfinite(v) and v > 0):
                raise DomainError(f"{name} must be finite and > 0, got {v!r}")
            object.__setattr__(self, name, float(v))

    @property
    def mean(self) -> float:
        return self.alpha / (self.alpha + self.beta)

    def swapped(self) -> "BetaParams":
        return BetaParams(self.beta, self.alpha)

    def as_dict(self) -> dict:
        return {"alpha": self.alpha, "beta": self.beta}


@dataclass(frozen=True)
class Moments:
    """Mean and (population) variance of a distribution on (0, 1)."""

    mu: float
    var: float

    def __post_init__(self):
        if not (0.0 < self.mu < 1.0):
            raise DomainError(f"mean must lie in (0, 1), got {self.mu!r}")
        if not self.var > 0.0:
            raise DegenerateDistributionError(f"variance must be > 0, got {self.var!r}")
        if self.var >= self.mu * (1.0 - self.mu):
            raise InfeasibleMomentsError(
                f"variance {self.var!r} >= mean*(1-mean) = {self.mu * (1.0 - self.mu)!r}; "
                "no Beta distribution has these moments")

    @property
    def sigma(self) -> float:
        return math.sqrt(self.var)


def log_density(p: BetaParams, log_x, log_1mx):
    """Beta log density from precomputed ``log x`` and ``log(1 - x)``."""
    return ((p.alpha - 1.0) * log_x + (p.beta - 1.0) * log_1mx
            - special.ln_beta(p.alpha, p.beta))


def _open_unit(x):
    arr = np.asarray(x, dtype=float)
    if np.any(~np.isfinite(arr)) or np.any(arr <= 0.0) or np.any(arr >= 1.0):
        raise DomainError(f"x must lie in the open interval (0, 1), got {x!r}")
    return arr


def beta_logpdf(p: BetaParams, x):
    arr = _open_unit(x)
    out = log_density(p, np.log(arr), np.log1p(-arr))
    return float(out) if np.ndim(x) == 0 else out


def beta_pdf(p: BetaParams, x):
    """Density of ``p`` at ``x`` in (0, 1); evaluated in log space."""
    out = np.exp(beta_logpdf(p, x))
    return float(out) if np.ndim(x) == 0 else out


def beta_cdf(p: BetaParams, x):
    return special.reg_inc_beta(x, p.alpha, p.beta)


def beta_moments(p: BetaParams) -> Moments:
    s = p.alpha + p.beta
    return Moments(p.alpha / s, p.alpha * p.beta / (s * s * (s + 1.0)))


def params_from_moments(m: Moments) -> BetaParams:
    """Invert the mean/variance formulas (moment matching)."""
    mu, var = m.mu, m.var
    alpha = ((1.0 - mu) / var - 1.0 / mu) * mu * mu
    beta = (1.0 / mu - 1.0) * alpha
    return BetaParams(alpha, beta)


def clip_scores(scores) -> np.ndarray:
    """Clip scores into [CLIP, 1 - CLIP]; values outside [0, 1] are a domain error."""
    arr = np.asarray(scores, dtype=float)
    if np.any(~np.isfinite(arr)) or np.any(arr < 0.0) or np.any(arr > 1.0):
        raise DomainError("scores must be finite and lie in [0, 1]")
    return np.clip(arr, CLIP, 1.0 - CLIP)


def sample_moments(samples) -> Moments:
    """Mean and population variance (divide by n) of clipped samples."""
    arr = clip_scores(samples).ravel()
    if arr.size < 2:
        raise InsufficientDataError(f"need at least 2 samples to fit a Beta, got {arr.size}")
    mu = float(arr.mean())
    var = float(np.mean((arr - mu) ** 2))
    # identical samples leave only rounding noise in the variance
    if var <= (8.0 * np.finfo(float).eps * mu) ** 2:
        raise DegenerateDistributionError("samples have zero variance")
    return Moments(mu, var)


def fit_beta_moments(samples) -> BetaParams:
    """Method-of-moments Beta fit.

    Raises:
        InsufficientDataError: fewer than two samples.
        DegenerateDistributionError: zero variance.
        InfeasibleMomentsError: variance >= mean * (1 - mean).
    """
    return params_from_moments(sample_moments(samples))


def split_classes(scores, labels):
    """Return (label-1 scores, label-0 scores) as float arrays."""
    s = np.asarray(scores, dtype=float).ravel()
    y = np.asarray(labels).ravel()
    if s.shape != y.shape:
        raise DomainError(f"scores and labels differ in length ({s.size} vs {y.size})")
    if not np.all((y == 0) | (y == 1)):
        raise DomainError("labels must be 0 or 1")
    return s[y == 1], s[y == 0]


def fit_signal_pair(scores, labels) -> tuple[BetaParams, BetaParams]:
    """Fit TR (label 1) and FR (label 0) Betas.

    Errors from the per-class fit are re-raised with the failing label
    attached as ``exc.label``.
    """
    pos, neg = split_classes(scores, labels)
    for label, arr in ((1, pos), (0, neg)):
        if arr.size == 0:
            raise ClassMissingError(f"no samples with label {label}", label=label)
    fitted = []
    for label, arr in ((1, pos), (0, neg)):
        try:
            fitted.append(fit_beta_moments(arr))
        except BetaSignalError as exc:
            raise type(exc)(f"class {label}: {exc}", label=label) from exc
    return fitted[0], fitted[1]


def make_epsilon_beta(epsilon: float, side: Side, concentration: float) -> BetaParams:
    """Construct an epsilon-Beta with shape ratio pinned at ``epsilon / 2``.

    ``left`` puts the mass near 1 (beta / alpha < epsilon), ``right`` is the
    mirror image. ``concentration`` is the larger of the two shapes.
    """
    if not (0.0 < epsilon < 1.0):
        raise DomainError(f"epsilon must lie in (0, 1), got {epsilon!r}")
    if not (math.isfinite(concentration) and concentration > 0.0):
        raise DomainError(f"concentration must be > 0, got {concentration!r}")
    p = BetaParams(concentration, concentration * epsilon / 2.0)
    if side == "left":
        return p
    if side == "right":
        return p.swapped()
    raise DomainError(f"side must be 'left' or 'right', got {side!r}")


def is_epsilon_beta(p: BetaParams, epsilon: float, side: Side) -> bool:
    if side == "left":
        return p.beta / p.alpha < epsilon
    if side == "right":
        return p.alpha / p.beta < epsilon
    raise DomainError(f"side must be 'left' or 'right', got {side!r}")
