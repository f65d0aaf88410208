"""Adaptive Gauss-Kronrod quadrature.

:func:`integrate` is a globally adaptive G7/K15 rule that refines every
subinterval whose error estimate is large relative to the remaining budget,
evaluating the integrand on whole batches of nodes at once.

:func:`integrate_unit` integrates densities over (0, 1) in logit space,
``x = 1 / (1 + exp(-s))``. The integrand receives ``log x`` and ``log(1 - x)``
computed without cancellation, so endpoint singularities of Beta densities
with shapes below 1 become exponentially decaying tails in ``s`` and mass
arbitrarily close to either endpoint stays resolvable.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import QuadratureError

# Kronrod nodes on [0, 1) (symmetric), the last one is the centre.
_XGK = np.array([
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
])
_WGK = np.array([
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
])
_WG = np.array([
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
])

_NODES = np.concatenate([-_XGK[:-1], _XGK[::-1]])
_KW = np.concatenate([_WGK[:-1], _WGK[::-1]])
# Gauss nodes are Kronrod nodes 1, 3, 5, 7 (and their mirrors)
_GW = np.zeros(15)
_GW[[1, 3, 5]] = _WG[:3]
_GW[[13, 11, 9]] = _WG[:3]
_GW[7] = _WG[3]

# Half-width of the logit window; exp(-700) ~ 1e-304 is still a normal double.
LOGIT_LIMIT = 700.0


@dataclass(frozen=True)
class QuadResult:
    value: float
    error: float
    n_intervals: int


def _gk15(f, a, b):
    half = 0.5 * (b - a)
    mid = 0.5 * (a + b)
    x = mid[:, None] + half[:, None] * _NODES[None, :]
    with np.errstate(over="ignore", invalid="ignore"):
        fx = f(x.ravel()).reshape(x.shape)
    if not np.all(np.isfinite(fx)):
        raise QuadratureError("integrand is not finite on the integration range",
                              n_intervals=len(a))
    k = half * (fx @ _KW)
    g = half * (fx @ _GW)
    return k, np.abs(k - g)


def integrate(f, breakpoints, *, abs_tol: float = 1e-11, rel_tol: float = 1e-11,
              max_intervals: int = 50000, max_rounds: int = 400) -> QuadResult:
    """Integrate a vectorised ``f`` over ``[breakpoints[0], breakpoints[-1]]``.

    Args:
        f: callable mapping a 1-D array of abscissae to integrand values.
        breakpoints: increasing points forming the initial partition; put
            kinks and peaks here.
        abs_tol, rel_tol: the run stops once the summed error estimate is
            below ``max(abs_tol, rel_tol * |value|)``.

    Raises:
        QuadratureError: the tolerance was not met within the limits, or the
            integrand returned non-finite values.
    """
    pts = np.unique(np.asarray(breakpoints, dtype=float))
    if pts.size < 2:
        raise ValueError("need at least two distinct breakpoints")
    a, b = pts[:-1], pts[1:]
    k, err = _gk15(f, a, b)
    for _ in range(max_rounds):
        value = float(k.sum())
        total_err = float(err.sum())
        tol = max(abs_tol, rel_tol * abs(value))
        if total_err <= tol:
            return QuadResult(value, total_err, len(a))
        split = err > tol / len(a)
        mid = 0.5 * (a + b)
        # intervals already at floating-point resolution cannot be refined
        split &= (mid > a) & (mid < b)
        if not split.any() or len(a) + split.sum() > max_intervals:
            break
        keep = ~split
        na = np.concatenate([a[split], mid[split]])
        nb = np.concatenate([mid[split], b[split]])
        nk, nerr = _gk15(f, na, nb)
        a = np.concatenate([a[keep], na])
        b = np.concatenate([b[keep], nb])
        k = np.concatenate([k[keep], nk])
        err = np.concatenate([err[keep], nerr])
    raise QuadratureError("adaptive quadrature did not reach tolerance",
                          estimate=float(k.sum()), error=float(err.sum()),
                          n_intervals=len(a))


def logit_logs(s):
    """Return ``(log x, log(1 - x))`` for ``x = sigmoid(s)`` without cancellation."""
    s = np.asarray(s, dtype=float)
    return -np.logaddexp(0.0, -s), -np.logaddexp(0.0, s)


def integrate_unit(g, breakpoints_s=(), **kwargs) -> QuadResult:
    """Integrate over x in (0, 1) through the logit substitution.

    ``g(log_x, log_1mx)`` must return ``f(x) * x * (1 - x)``, i.e. the
    integrand already multiplied by the Jacobian; callers working with log
    densities fold the Jacobian in before exponentiating so nothing
    overflows near the ends of the window. ``breakpoints_s`` are extra
    initial partition points in logit space, clipped into the window.
    """
    pts = np.clip(np.asarray(list(breakpoints_s), dtype=float), -LOGIT_LIMIT, LOGIT_LIMIT)
    pts = np.concatenate([pts, [-LOGIT_LIMIT, LOGIT_LIMIT]])

    def h(s):
        return g(*logit_logs(s))

    return integrate(h, pts, **kwargs)
