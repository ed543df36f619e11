import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy import integrate as si

from oracles import sqrt_endpoint_antiderivative
from patchrad import quad
from patchrad.quad import QuadResult, QuadratureError


def one(k):
    return np.ones_like(k)


def test_endpoint_unit():
    r = quad.integrate_sqrt_endpoint(one, 1.0)
    assert r.value == pytest.approx(float(sqrt_endpoint_antiderivative(1)), rel=1e-14)
    assert r.value == pytest.approx(2 / 15, rel=1e-14)
    assert r.error_estimate >= 0 and r.evaluations > 0


def test_endpoint_scaling():
    r = quad.integrate_sqrt_endpoint(one, 2.0)
    assert r.value == pytest.approx(2 / 15 * 2**5, rel=1e-14)


def test_endpoint_empty():
    assert quad.integrate_sqrt_endpoint(one, 0.0).value == 0.0


def test_endpoint_rejects_negative():
    with pytest.raises(ValueError):
        quad.integrate_sqrt_endpoint(one, -1.0)


def test_endpoint_breakpoint_discontinuity():
    # step at k = 0.6: int_{0.6}^1 k^3 sqrt(1-k^2) dk
    step = lambda k: (k >= 0.6).astype(float)
    W = 1 - 0.36
    exact = W**1.5 / 3 - W**2.5 / 5
    r = quad.integrate_sqrt_endpoint(step, 1.0, rel_tol=1e-13, breakpoints=[0.6])
    assert r.value == pytest.approx(exact, rel=1e-13)


def test_semi_infinite_exp():
    assert quad.integrate_semi_infinite(lambda w: np.exp(-w), 1.0).value == pytest.approx(1, rel=1e-12)
    assert quad.integrate_semi_infinite(lambda w: np.exp(-w), 37.0).value == pytest.approx(1, rel=1e-12)


def test_semi_infinite_gamma():
    r = quad.integrate_semi_infinite(lambda w: w**6 * np.exp(-w * w), 1.0)
    assert r.value == pytest.approx(15 / 16 * math.sqrt(math.pi), rel=1e-12)


def test_semi_infinite_zero():
    assert quad.integrate_semi_infinite(lambda w: 0 * w, 1.0).value == 0.0


def test_semi_infinite_non_decaying_fails():
    with pytest.raises(QuadratureError) as exc:
        quad.integrate_semi_infinite(lambda w: np.ones_like(w), 1.0, max_panels=20)
    assert exc.value.best is not None


def test_budget_exhaustion_carries_estimate():
    with pytest.raises(QuadratureError) as exc:
        quad.integrate(lambda x: np.sin(1 / x), 1e-9, 1.0, rel_tol=1e-14, max_evals=500)
    assert isinstance(exc.value.best, QuadResult)


def test_matches_scipy_on_peaked_integrand():
    f = lambda x: 1 / ((x - 0.3) ** 2 + 1e-4)
    ref = si.quad(f, 0, 1, points=[0.3], epsabs=0, epsrel=1e-13)[0]
    assert quad.integrate(f, 0, 1, 1e-12).value == pytest.approx(ref, rel=1e-11)


def test_reversed_limits():
    assert quad.integrate(lambda x: x, 1, 0).value == pytest.approx(-0.5, rel=1e-15)


def test_quadresult_invariants():
    with pytest.raises(ValueError):
        QuadResult(1.0, -1.0, 3)
    with pytest.raises(ValueError):
        QuadResult(1.0, 0.0, 0)


coeffs = st.lists(st.floats(min_value=-10, max_value=10), min_size=1, max_size=6)


@settings(max_examples=40, deadline=None)
@given(p=coeffs, r=coeffs, alpha=st.floats(-5, 5), beta=st.floats(-5, 5),
       a=st.floats(0.1, 3.0))
def test_linearity(p, r, alpha, beta, a):
    f = lambda k: np.polyval(p, k)
    g = lambda k: np.polyval(r, k)
    tol = 1e-10
    lhs = quad.integrate_sqrt_endpoint(lambda k: alpha * f(k) + beta * g(k), a, tol)
    I_f = quad.integrate_sqrt_endpoint(f, a, tol)
    I_g = quad.integrate_sqrt_endpoint(g, a, tol)
    scale = abs(alpha) * quad.integrate_sqrt_endpoint(lambda k: np.abs(f(k)), a).value \
        + abs(beta) * quad.integrate_sqrt_endpoint(lambda k: np.abs(g(k)), a).value
    assert abs(lhs.value - (alpha * I_f.value + beta * I_g.value)) <= 10 * tol * scale + 1e-300


@settings(max_examples=40, deadline=None)
@given(p=coeffs, shift=st.floats(0, 5), a=st.floats(0.1, 3.0))
def test_monotonicity(p, shift, a):
    g = lambda k: np.polyval(p, k)
    f = lambda k: g(k) + shift
    rf = quad.integrate_sqrt_endpoint(f, a)
    rg = quad.integrate_sqrt_endpoint(g, a)
    assert rf.value >= rg.value - rf.error_estimate - rg.error_estimate - 1e-14 * abs(rg.value)


@settings(max_examples=25, deadline=None)
@given(p=coeffs, a=st.floats(0.2, 2.0))
def test_substitution_vs_midpoint(p, a):
    f = lambda k: np.polyval(p, k)
    gk = quad.integrate_sqrt_endpoint(f, a)
    direct = lambda k: k**3 * f(k) * np.sqrt(np.maximum(a * a - k * k, 0.0))
    mid = quad.integrate_midpoint(direct, 0.0, a, 4096)
    assert abs(gk.value - mid.value) <= gk.error_estimate + mid.error_estimate + 1e-14
