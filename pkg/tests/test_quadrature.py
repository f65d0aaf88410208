import math

import numpy as np
import pytest

from betasignal.errors import QuadratureError
from betasignal.quadrature import LOGIT_LIMIT, _gk15, integrate, integrate_unit, logit_logs


@pytest.mark.parametrize("deg", range(0, 23))
def test_single_panel_exact_for_polynomials(deg):
    # a 15-point Kronrod rule integrates degree <= 22 exactly
    k, _ = _gk15(lambda x: x ** deg, np.array([-1.0]), np.array([1.0]))
    exact = 0.0 if deg % 2 else 2.0 / (deg + 1)
    assert k[0] == pytest.approx(exact, abs=1e-14)


@pytest.mark.parametrize("deg", range(0, 14))
def test_embedded_gauss_exact_to_degree_13(deg):
    # the error estimate |K15 - G7| vanishes while the 7-point rule is still exact
    _, err = _gk15(lambda x: x ** deg, np.array([-1.0]), np.array([1.0]))
    assert err[0] <= 1e-14


def test_smooth_integrand():
    res = integrate(np.exp, [0.0, 1.0])
    assert res.value == pytest.approx(math.e - 1.0, abs=1e-14)
    assert res.error <= 1e-11


def test_kink_resolved_by_refinement():
    # no breakpoint at the kink: adaptivity must find it
    res = integrate(lambda x: np.abs(x - 0.3), [0.0, 1.0])
    assert res.value == pytest.approx(0.5 * (0.3 ** 2 + 0.7 ** 2), abs=1e-10)
    assert res.n_intervals > 1


def test_non_finite_integrand_raises():
    with pytest.raises(QuadratureError):
        integrate(lambda x: np.where(x > 0.5, np.nan, x), [0.0, 1.0])


def test_non_convergence_carries_diagnostics():
    with pytest.raises(QuadratureError) as info:
        integrate(lambda x: 1.0 / x, [1e-300, 1.0], max_intervals=50, abs_tol=1e-14)
    exc = info.value
    assert exc.n_intervals is not None and exc.estimate is not None and exc.error is not None


def test_logit_logs_are_stable_at_extremes():
    lx, l1x = logit_logs(np.array([-LOGIT_LIMIT, 0.0, LOGIT_LIMIT]))
    assert lx[0] == pytest.approx(-LOGIT_LIMIT)
    assert l1x[2] == pytest.approx(-LOGIT_LIMIT)
    assert lx[1] == pytest.approx(math.log(0.5)) and l1x[1] == pytest.approx(math.log(0.5))
    assert lx[2] == pytest.approx(0.0, abs=1e-300) and l1x[0] == pytest.approx(0.0, abs=1e-300)


def test_unit_integral_with_endpoint_singularity():
    # int_0^1 x^(-1/2) dx = 2; integrand times Jacobian x(1 - x) in log space
    res = integrate_unit(lambda lx, l1x: np.exp(0.5 * lx + l1x))
    assert res.value == pytest.approx(2.0, abs=1e-10)
