import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.integrate import quad
from scipy.special import gamma, jv, kv

from wignerneg.regularized import (
    QuadratureError,
    RegularizedStateParams,
    fb_moment,
    phi,
    psi,
    psi_derivative,
    psi_norm_check,
    wigner_point,
)

EPSILONS = [0.02, 0.05, 0.1, 0.25, 0.5, 1.0]


def bessel_wigner(eps, x, p):
    """Closed form of W for the regularized state (independent oracle)."""
    a = abs(x)
    first = np.pi * jv(eps, abs(2 * x * p)) / (abs(x * p) ** eps * np.exp(a))
    second = np.real(2 * kv(eps, a + 2j * x * p) / (1j * p * x + a / 2) ** eps)
    return (a / 2) ** (2 * eps) / (np.pi * gamma(eps)) * (first + second)


@pytest.mark.parametrize("eps", EPSILONS)
def test_norm(eps):
    assert psi_norm_check(RegularizedStateParams(eps)) == pytest.approx(1.0, abs=1e-8)


@pytest.mark.parametrize("eps", EPSILONS)
def test_fb_moment(eps):
    assert fb_moment(RegularizedStateParams(eps)) == pytest.approx(2 * eps - 1, abs=1e-6)


@pytest.mark.parametrize("c0", [-1.5, 0.5, 2.0])
def test_fb_moment_with_offset(c0):
    val = fb_moment(RegularizedStateParams(0.2, c0=c0))
    assert val == pytest.approx(c0**2 + 2 * 0.2 - 1, abs=1e-6)


def test_norm_against_scipy_quad():
    p = RegularizedStateParams(0.75)
    val = 2 * quad(lambda x: psi(p, x) ** 2, 0, np.inf, limit=200)[0]
    assert val == pytest.approx(1.0, abs=1e-8)


def test_epsilon_must_be_positive():
    with pytest.raises(ValueError):
        RegularizedStateParams(0.0)


def test_psi_derivative_finite_difference():
    p = RegularizedStateParams(0.3)
    x = np.array([-2.0, -0.4, 0.7, 1.5, 3.0])
    h = 1e-6
    fd = (psi(p, x + h) - psi(p, x - h)) / (2 * h)
    np.testing.assert_allclose(psi_derivative(p, x), fd, rtol=1e-6)


def test_phi_closed_form():
    # for c0 = 0, phi = -i (2 eps - |x|) psi
    p = RegularizedStateParams(0.3)
    x = np.linspace(0.1, 4, 9)
    np.testing.assert_allclose(phi(p, x), -1j * (2 * 0.3 - x) * psi(p, x), atol=1e-14)


@pytest.mark.parametrize("eps", [0.1, 0.25, 0.5, 1.0])
@pytest.mark.parametrize("x,p", [(1.0, 0.5), (0.3, -2.0), (2.5, 1.2), (-1.5, 0.7)])
def test_wigner_matches_bessel_form(eps, x, p):
    val = wigner_point(RegularizedStateParams(eps), x, p)
    assert val == pytest.approx(bessel_wigner(eps, x, p), abs=1e-9)


@settings(max_examples=15, deadline=None)
@given(st.floats(0.05, 3.0), st.floats(-3.0, 3.0))
def test_wigner_symmetry(x, p):
    params = RegularizedStateParams(0.3)
    vals = wigner_point(params, x, np.array([p, -p]))
    assert vals[0] == pytest.approx(vals[1], abs=1e-12)
    assert wigner_point(params, -x, p) == pytest.approx(vals[0], abs=1e-12)


def test_wigner_marginal():
    params = RegularizedStateParams(0.5)
    ps = np.linspace(-30, 30, 3001)
    marginal = np.trapezoid(wigner_point(params, 1.0, ps), ps)
    assert marginal == pytest.approx(psi(params, 1.0) ** 2, abs=1e-4)


def test_wigner_error_estimate():
    val, err = wigner_point(RegularizedStateParams(0.25), 0.8, 0.4, return_error=True)
    assert err < 1e-9
    assert np.isfinite(val)


def test_refinement_failure_raises():
    with pytest.raises(QuadratureError):
        fb_moment(RegularizedStateParams(0.02, nodes=4, tol=1e-16))
