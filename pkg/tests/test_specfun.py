import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import special

from spherepcf.errors import DomainError, QuadratureError
from spherepcf.specfun import (QuadratureSpec, bessel_j, bessel_pcf_integral,
                               bessel_pcf_leading, bessel_pcf_remainder, binom,
                               default_quadrature, gamma_fn, integrate, jacobi_poly)


def test_gamma_examples():
    assert gamma_fn(1) == 1
    assert gamma_fn(5) == pytest.approx(24, rel=1e-14)
    assert gamma_fn(0.5) == pytest.approx(math.sqrt(math.pi), rel=1e-14)
    for bad in (0, -1.5):
        with pytest.raises(DomainError):
            gamma_fn(bad)


@given(st.floats(0.5, 50))
def test_gamma_recurrence(x):
    assert gamma_fn(x + 1) == pytest.approx(x * gamma_fn(x), rel=1e-10)


def test_binom():
    assert binom(5, 2) == pytest.approx(21)
    assert binom(3, 0.5) == pytest.approx(special.binom(3.5, 3))


def test_jacobi_examples():
    assert jacobi_poly(0, 0.3, 1.2, -0.4) == 1
    assert jacobi_poly(1, 2, 0, 0.3) == pytest.approx(1.6)
    for L in (1, 7, 30):
        assert jacobi_poly(L, 1.0, 0.0, 1.0) == pytest.approx(binom(L, 1.0))


def test_jacobi_against_scipy():
    x = np.linspace(-1, 1, 41)
    for n, a, b in [(5, 1, 0), (40, 1.5, 0.5), (300, 1, 0), (12, -0.5, 2.0)]:
        np.testing.assert_allclose(jacobi_poly(n, a, b, x), special.eval_jacobi(n, a, b, x),
                                   rtol=1e-9, atol=1e-9 * abs(special.eval_jacobi(n, a, b, 1)))


def test_jacobi_domain():
    with pytest.raises(DomainError):
        jacobi_poly(-1, 0, 0, 0.1)
    with pytest.raises(DomainError):
        jacobi_poly(2, -1, 0, 0.1)
    with pytest.raises(DomainError):
        jacobi_poly(2, 0, 0, 1.5)


@settings(max_examples=100)
@given(st.integers(2, 200), st.floats(-0.9, 5), st.floats(-0.9, 5), st.floats(-1, 1))
def test_jacobi_recurrence_residual(n, a, b, x):
    # 2n(n+a+b)(2n+a+b-2) P_n = (2n+a+b-1)[(2n+a+b)(2n+a+b-2)x + a^2-b^2] P_{n-1}
    #                           - 2(n+a-1)(n+b-1)(2n+a+b) P_{n-2}
    c = 2 * n + a + b
    lhs = 2 * n * (n + a + b) * (c - 2) * jacobi_poly(n, a, b, x)
    rhs = ((c - 1) * (c * (c - 2) * x + a * a - b * b) * jacobi_poly(n - 1, a, b, x)
           - 2 * (n + a - 1) * (n + b - 1) * c * jacobi_poly(n - 2, a, b, x))
    scale = abs(2 * n * (n + a + b) * (c - 2)) * binom(n, max(a, b)) + 1
    assert abs(lhs - rhs) <= 1e-9 * scale


def _series_j(nu, x, terms=30):
    return sum((-1) ** k * (x / 2) ** (2 * k + nu) / (math.factorial(k) * math.gamma(k + nu + 1))
               for k in range(terms))


def test_bessel_examples():
    assert bessel_j(1, 0.0) == 0
    assert bessel_j(0, 0.0) == 1
    assert bessel_j(0.5, math.pi / 2) == pytest.approx(2 / math.pi, rel=1e-12)
    assert bessel_j(1, 1.0) == pytest.approx(_series_j(1, 1.0), rel=1e-13)


@pytest.mark.parametrize("nu", [0, 0.5, 1, 1.5, 2, 3, 4])
def test_bessel_against_scipy(nu):
    x = np.linspace(0, 200, 4001)
    env = np.sqrt(2 / (np.pi * np.maximum(x, 1)))
    err = np.abs(bessel_j(nu, x) - special.jv(nu, x)) / env
    assert err.max() < 1e-10


def test_bessel_domain():
    with pytest.raises(DomainError):
        bessel_j(-1, 1.0)
    with pytest.raises(DomainError):
        bessel_j(1, -1.0)


def test_integrate_examples():
    assert integrate(lambda t: t, 0, 1) == pytest.approx(0.5, abs=1e-12)
    assert integrate(np.sin, 0, math.pi) == pytest.approx(2, abs=1e-9)
    assert integrate(np.sin, 1, 1) == 0
    v = integrate(lambda y: bessel_j(1, y) ** 2 / y, 1e-12, 500, QuadratureSpec(abs_tol=1e-10))
    assert v == pytest.approx(0.5, abs=2e-3)


@settings(max_examples=50)
@given(st.lists(st.floats(-5, 5), min_size=6, max_size=6), st.floats(-3, 3), st.floats(0, 4))
def test_integrate_polynomials(coefs, a, w):
    b = a + w
    p = np.polynomial.Polynomial(coefs)
    want = p.integ()(b) - p.integ()(a)
    spec = QuadratureSpec(abs_tol=1e-9)
    assert abs(integrate(p, a, b, spec) - want) <= 1e-9 + 1e-13 * abs(want)


def test_integrate_scalar_function():
    assert integrate(lambda t: math.exp(t), 0, 1) == pytest.approx(math.e - 1, abs=1e-9)


def test_integrate_budget_error():
    spec = QuadratureSpec(abs_tol=1e-14, max_subdivisions=4)
    with pytest.raises(QuadratureError) as info:
        integrate(lambda t: np.sin(1 / np.maximum(t, 1e-3)), 0, 1, spec)
    assert math.isfinite(info.value.estimate)


def test_quadrature_spec_validation(monkeypatch):
    with pytest.raises(DomainError):
        QuadratureSpec(abs_tol=0)
    with pytest.raises(DomainError):
        QuadratureSpec(max_subdivisions=0)
    assert default_quadrature().abs_tol == 1e-9
    monkeypatch.setenv("SPHEREPCF_QUAD_TOL", "1e-7")
    assert default_quadrature().abs_tol == 1e-7


def test_bessel_pcf_examples():
    assert bessel_pcf_integral(1, 0) == 0
    v = bessel_pcf_integral(1, 0.01)
    assert abs(v - 1.25e-5) <= 0.01**4
    assert bessel_pcf_integral(1, 500) == pytest.approx(0.5, abs=2e-3)
    with pytest.raises(DomainError):
        bessel_pcf_integral(0, 1)


@pytest.mark.parametrize("nu", [0.5, 1, 1.5, 2])
def test_bessel_pcf_against_direct_quadrature(nu):
    from scipy.integrate import quad
    for x in (0.3, 2.0, 4.0, 7.5, 30.0):
        want = quad(lambda t: special.jv(nu, t) ** 2 / t, 0, x, epsabs=1e-14, limit=400)[0]
        assert bessel_pcf_integral(nu, x) == pytest.approx(want, abs=1e-11)


def test_bessel_pcf_continuity_at_switch():
    from spherepcf.specfun import _PCF_SERIES_MAX
    for nu in (1, 1.5):
        lo = bessel_pcf_integral(nu, _PCF_SERIES_MAX)
        hi = bessel_pcf_integral(nu, _PCF_SERIES_MAX * (1 + 1e-12))
        assert abs(hi - lo) < 1e-9


def test_bessel_pcf_remainder():
    for x in (1e-3, 0.5, 3.0, 9.0):
        assert (bessel_pcf_remainder(1, x) + bessel_pcf_leading(1, x)
                == pytest.approx(bessel_pcf_integral(1, x), rel=1e-13, abs=1e-300))
    # the remainder is O(x^4) for nu = 1
    assert abs(bessel_pcf_remainder(1, 1e-3)) < 1e-12


@settings(max_examples=40, deadline=None)
@given(st.floats(0.5, 3), st.floats(0, 60), st.floats(0, 60))
def test_bessel_pcf_monotone_bounded(nu, a, b):
    a, b = sorted((a, b))
    fa, fb = bessel_pcf_integral(nu, a), bessel_pcf_integral(nu, b)
    assert fa <= fb + 1e-12
    assert fb <= 1 / (2 * nu) + 1e-3
