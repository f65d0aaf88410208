"""Threshold-based ("discrete") signals: confusion matrix, metrics, sweeps, curves.

A sample is predicted positive iff ``score >= threshold``. Metrics whose
denominator vanishes are ``None`` rather than 0, so sweeps near the extreme
thresholds never silently report a made-up value.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass
from typing import Optional, Sequence

import numpy as np

from .errors import ClassMissingError, DomainError, InsufficientDataError, ValidationError

METRICS = ("accuracy", "precision", "recall", "f1", "mcc")
DEFAULT_GRID = np.linspace(0.0, 1.0, 101)


@dataclass(frozen=True)
class ScoredSample:
    """One classifier output: probability of class 1 and the true label."""

    score: float
    label: int

    def __post_init__(self):
        if not (isinstance(self.score, (int, float)) and math.isfinite(self.score)
                and 0.0 <= self.score <= 1.0):
            raise ValidationError(f"score must be a finite number in [0, 1], got {self.score!r}")
        if self.label not in (0, 1):
            raise ValidationError(f"label must be 0 or 1, got {self.label!r}")


def to_arrays(samples: Sequence[ScoredSample]) -> tuple[np.ndarray, np.ndarray]:
    """Split a sequence of samples into (scores, labels) arrays."""
    scores = np.fromiter((s.score for s in samples), dtype=float, count=len(samples))
    labels = np.fromiter((s.label for s in samples), dtype=np.int64, count=len(samples))
    return scores, labels


def check_arrays(scores, labels) -> tuple[np.ndarray, np.ndarray]:
    s = np.asarray(scores, dtype=float).ravel()
    y = np.asarray(labels).ravel()
    if s.shape != y.shape:
        raise DomainError(f"scores and labels differ in length ({s.size} vs {y.size})")
    if s.size == 0:
        raise InsufficientDataError("no samples")
    if np.any(~np.isfinite(s)) or np.any(s < 0.0) or np.any(s > 1.0):
        raise DomainError("scores must be finite and lie in [0, 1]")
    if not np.all((y == 0) | (y == 1)):
        raise DomainError("labels must be 0 or 1")
    return s, y.astype(np.int64)


@dataclass(frozen=True)
class ConfusionMatrix:
    tp: int
    fp: int
    fn: int
    tn: int

    def __post_init__(self):
        if min(self.tp, self.fp, self.fn, self.tn) < 0:
            raise DomainError("confusion counts must be nonnegative")

    @property
    def n(self) -> int:
        return self.tp + self.fp + self.fn + self.tn


@dataclass(frozen=True)
class Metrics:
    accuracy: Optional[float]
    precision: Optional[float]
    recall: Optional[float]
    f1: Optional[float]
    mcc: Optional[float]


@dataclass(frozen=True)
class MetricRow:
    threshold: float
    accuracy: Optional[float]
    precision: Optional[float]
    recall: Optional[float]
    f1: Optional[float]
    mcc: Optional[float]

    def as_dict(self) -> dict:
        return asdict(self)


def _ratio(num, den):
    return num / den if den > 0 else None


def metrics_from_counts(tp, fp, fn, tn) -> Metrics:
    """Metrics from (possibly fractional) confusion counts.

    Shared by the integer confusion matrix and the smooth, model-implied
    expected fractions.
    """
    n = tp + fp + fn + tn
    precision = _ratio(tp, tp + fp)
    recall = _ratio(tp, tp + fn)
    f1 = None
    if precision is not None and recall is not None:
        f1 = _ratio(2 * tp, 2 * tp + fp + fn)
    den = (tp + fp) * (tp + fn) * (tn + fp) * (tn + fn)
    mcc = None
    if den > 0:
        mcc = (tp * tn - fp * fn) / math.sqrt(den)
        mcc = min(1.0, max(-1.0, float(mcc)))
    return Metrics(
        accuracy=_ratio(tp + tn, n),
        precision=None if precision is None else float(precision),
        recall=None if recall is None else float(recall),
        f1=None if f1 is None else float(f1),
        mcc=mcc,
    )


def confusion_at(scores, labels, threshold: float) -> ConfusionMatrix:
    s, y = check_arrays(scores, labels)
    pred = s >= threshold
    pos = y == 1
    return ConfusionMatrix(
        tp=int(np.sum(pred & pos)),
        fp=int(np.sum(pred & ~pos)),
        fn=int(np.sum(~pred & pos)),
        tn=int(np.sum(~pred & ~pos)),
    )


def metrics_at(cm: ConfusionMatrix) -> Metrics:
    if cm.n == 0:
        raise InsufficientDataError("empty confusion matrix")
    return metrics_from_counts(cm.tp, cm.fp, cm.fn, cm.tn)


def check_grid(grid) -> np.ndarray:
    g = np.asarray(grid, dtype=float).ravel()
    if g.size == 0:
        raise DomainError("threshold grid is empty")
    if np.any(~np.isfinite(g)) or np.any(g < 0.0) or np.any(g > 1.0):
        raise DomainError("thresholds must lie in [0, 1]")
    if np.any(np.diff(g) <= 0.0):
        raise DomainError("threshold grid must be strictly increasing")
    return g


def confusion_sweep(scores, labels, grid) -> list[ConfusionMatrix]:
    """Confusion matrices at every threshold of ``grid`` (one sort, binary search)."""
    s, y = check_arrays(scores, labels)
    g = check_grid(grid)
    pos = np.sort(s[y == 1])
    neg = np.sort(s[y == 0])
    # number of scores >= t
    tp = pos.size - np.searchsorted(pos, g, side="left")
    fp = neg.size - np.searchsorted(neg, g, side="left")
    return [ConfusionMatrix(int(a), int(b), int(pos.size - a), int(neg.size - b))
            for a, b in zip(tp, fp)]


def sweep(scores, labels, grid=None) -> list[MetricRow]:
    """Metrics at each threshold of a strictly increasing grid (default: 101 points)."""
    g = DEFAULT_GRID if grid is None else check_grid(grid)
    rows = []
    for t, cm in zip(g, confusion_sweep(scores, labels, g)):
        rows.append(MetricRow(threshold=float(t), **asdict(metrics_at(cm))))
    return rows


@dataclass(frozen=True)
class Curves:
    """Histogram densities of TR (label 1) and FR (label 0) scores."""

    edges: np.ndarray
    tr_density: np.ndarray
    fr_density: np.ndarray


def empirical_curves(scores, labels, bins: int = 20) -> Curves:
    """Histogram densities on ``bins`` equal bins of [0, 1].

    Bins are half-open ``[lo, hi)`` except the last, which is closed.
    """
    if not (isinstance(bins, (int, np.integer)) and bins > 0):
        raise DomainError(f"bins must be a positive integer, got {bins!r}")
    s, y = check_arrays(scores, labels)
    edges = np.linspace(0.0, 1.0, bins + 1)
    out = []
    for label in (1, 0):
        cls = s[y == label]
        if cls.size == 0:
            raise ClassMissingError(f"no samples with label {label}", label=label)
        counts, _ = np.histogram(cls, bins=edges)
        out.append(counts / (cls.size * np.diff(edges)))
    return Curves(edges=edges, tr_density=out[0], fr_density=out[1])
