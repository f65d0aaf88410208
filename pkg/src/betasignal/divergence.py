"""Distances between two fitted Beta distributions.

``kl_beta`` is the closed form. Everything else (and the numerical KL used to
cross-check it) goes through :func:`betasignal.quadrature.integrate_unit`,
with the densities' logit-space modes and crossing points seeded as initial
breakpoints so that narrow peaks and the kinks of ``min`` and ``|p - q|`` are
never straddled by a single panel.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass
from typing import Literal

import numpy as np

from . import special
from .beta import BetaParams
from .errors import NumericalError, QuadratureError
from .quadrature import LOGIT_LIMIT, integrate_unit, logit_logs

Metric = Literal["js_distance", "l1"]

LN2 = math.log(2.0)
# Closed-form KL values in (-KL_CLAMP, 0) are rounding noise.
KL_CLAMP = 1e-12
_SPREAD = (0.0, 1.0, 2.0, 4.0, 8.0, 16.0, 32.0)


@dataclass(frozen=True)
class DivergenceReport:
    kl_forward: float
    kl_reverse: float
    js: float
    lp: float
    lp_order: float
    overlap: float

    def as_dict(self) -> dict:
        return asdict(self)


def kl_beta(p: BetaParams, q: BetaParams) -> float:
    """KL(p || q) between two Beta distributions, in nats.

    ln(B(a2, b2) / B(a1, b1)) + (a1 - a2) psi(a1) + (b1 - b2) psi(b1)
        + (a2 - a1 + b2 - b1) psi(a1 + b1)
    """
    a1, b1, a2, b2 = p.alpha, p.beta, q.alpha, q.beta
    kl = (special.ln_beta(a2, b2) - special.ln_beta(a1, b1)
          + (a1 - a2) * special.digamma(a1)
          + (b1 - b2) * special.digamma(b1)
          + (a2 - a1 + b2 - b1) * special.digamma(a1 + b1))
    if kl < 0.0:
        if kl > -KL_CLAMP:
            return 0.0
        raise NumericalError(f"closed-form KL is negative ({kl!r}) for {p} || {q}")
    return float(kl)


def logit_breakpoints(*params: BetaParams) -> list[float]:
    """Logit-space mode and spread of ``x (1 - x) pdf(x)`` for each Beta."""
    pts = []
    for p in params:
        mode = math.log(p.alpha / p.beta)
        scale = math.sqrt(1.0 / p.alpha + 1.0 / p.beta)
        pts.extend(mode + k * scale for k in _SPREAD)
        pts.extend(mode - k * scale for k in _SPREAD[1:])
    return pts


def density_crossings(p: BetaParams, q: BetaParams) -> list[float]:
    """Logit-space points where pdf_p = pdf_q (at most two).

    The log-ratio is A log x + B log(1 - x) + C, which is monotone on each
    side of its single stationary point, so bisection per side suffices.
    """
    A = p.alpha - q.alpha
    B = p.beta - q.beta
    C = special.ln_beta(q.alpha, q.beta) - special.ln_beta(p.alpha, p.beta)
    if A == 0.0 and B == 0.0:
        return []

    def g(s):
        lx, l1x = logit_logs(s)
        return float(A * lx + B * l1x + C)

    edges = [-LOGIT_LIMIT, LOGIT_LIMIT]
    if A * B > 0.0:
        edges.insert(1, float(np.clip(math.log(A / B), -LOGIT_LIMIT, LOGIT_LIMIT)))
    roots = []
    for lo, hi in zip(edges[:-1], edges[1:]):
        glo, ghi = g(lo), g(hi)
        if glo == 0.0:
            roots.append(lo)
            continue
        if glo * ghi > 0.0:
            continue
        for _ in range(200):
            mid = 0.5 * (lo + hi)
            if mid <= lo or mid >= hi:
                break
            gm = g(mid)
            if (gm > 0.0) == (glo > 0.0):
                lo, glo = mid, gm
            else:
                hi = mid
        roots.append(0.5 * (lo + hi))
    return roots


def _log_pair(p, q):
    lbp = special.ln_beta(p.alpha, p.beta)
    lbq = special.ln_beta(q.alpha, q.beta)

    def logs(lx, l1x):
        lp = (p.alpha - 1.0) * lx + (p.beta - 1.0) * l1x - lbp
        lq = (q.alpha - 1.0) * lx + (q.beta - 1.0) * l1x - lbq
        return lp, lq, lx + l1x

    return logs


def kl_numerical(p: BetaParams, q: BetaParams, **kwargs) -> float:
    """KL(p || q) by quadrature of p log(p / q); an independent check on :func:`kl_beta`."""
    logs = _log_pair(p, q)

    def g(lx, l1x):
        lp, lq, lj = logs(lx, l1x)
        return np.exp(lp + lj) * (lp - lq)

    return integrate_unit(g, logit_breakpoints(p, q), **kwargs).value


def js_divergence(p: BetaParams, q: BetaParams, **kwargs) -> float:
    """Jensen-Shannon divergence in nats; lies in [0, ln 2]."""
    if p == q:
        return 0.0
    logs = _log_pair(p, q)

    def g(lx, l1x):
        lp, lq, lj = logs(lx, l1x)
        lm = np.logaddexp(lp, lq) - LN2
        return 0.5 * (np.exp(lp + lj) * (lp - lm) + np.exp(lq + lj) * (lq - lm))

    res = integrate_unit(g, logit_breakpoints(p, q), **kwargs)
    return float(min(max(res.value, 0.0), LN2))


def _lp_diverges(p, q, order):
    # near x = 0 the difference behaves like x^(min alpha - 1), likewise at 1
    return (order * (min(p.alpha, q.alpha) - 1.0) <= -1.0
            or order * (min(p.beta, q.beta) - 1.0) <= -1.0)


def lp_distance(p: BetaParams, q: BetaParams, order: float = 1.0, **kwargs) -> float:
    """L^order distance between the two densities on (0, 1)."""
    if not order >= 1.0:
        raise ValueError(f"order must be >= 1, got {order!r}")
    if p == q:
        return 0.0
    if _lp_diverges(p, q, order):
        raise QuadratureError(f"L^{order} distance is infinite: a density has an "
                              "endpoint singularity that is not order-integrable")
    logs = _log_pair(p, q)

    def g(lx, l1x):
        lp, lq, lj = logs(lx, l1x)
        hi = np.maximum(lp, lq)
        lo = np.minimum(lp, lq)
        return np.exp(order * hi + lj) * (-np.expm1(lo - hi)) ** order

    pts = logit_breakpoints(p, q) + density_crossings(p, q)
    res = integrate_unit(g, pts, **kwargs)
    return float(max(res.value, 0.0) ** (1.0 / order))


def overlap_area(p: BetaParams, q: BetaParams, **kwargs) -> float:
    """Area under min(pdf_p, pdf_q); 1 for identical densities, 0 for disjoint ones."""
    if p == q:
        return 1.0
    logs = _log_pair(p, q)

    def g(lx, l1x):
        lp, lq, lj = logs(lx, l1x)
        return np.exp(np.minimum(lp, lq) + lj)

    pts = logit_breakpoints(p, q) + density_crossings(p, q)
    res = integrate_unit(g, pts, **kwargs)
    return float(min(max(res.value, 0.0), 1.0))


def distance(p: BetaParams, q: BetaParams, metric: Metric = "js_distance") -> float:
    """A distance obeying the triangle inequality: sqrt(JS) or L1.

    KL is deliberately not offered here: it is not a metric.
    """
    if metric == "js_distance":
        return math.sqrt(js_divergence(p, q))
    if metric == "l1":
        return lp_distance(p, q, 1.0)
    raise ValueError(f"unknown metric {metric!r}; expected 'js_distance' or 'l1'")


def divergence_report(p: BetaParams, q: BetaParams, order: float = 1.0) -> DivergenceReport:
    return DivergenceReport(
        kl_forward=kl_beta(p, q),
        kl_reverse=kl_beta(q, p),
        js=js_divergence(p, q),
        lp=lp_distance(p, q, order),
        lp_order=float(order),
        overlap=overlap_area(p, q),
    )
