import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy import integrate as si

from patchrad.motion import (
    EnvelopedHarmonic,
    GaussianPulse,
    Sampled,
    Stationary,
    derivative,
    fourier_transform,
    jerk_energy,
)

ANALYTIC = [GaussianPulse(1.0, 1.0), GaussianPulse(2e-7, 3e-10), EnvelopedHarmonic(1.0, 4.0, 1.5),
            EnvelopedHarmonic(0.3, 0.2, 2.0)]


def test_gaussian_transform_at_zero():
    assert fourier_transform(GaussianPulse(1.0, 1.0), 0.0) == pytest.approx(math.sqrt(2 * math.pi))


def test_gaussian_transform_real_even():
    g = GaussianPulse(0.7, 1.3)
    w = np.linspace(-5, 5, 21)
    qt = g.fourier_transform(w)
    assert np.all(qt.imag == 0)
    assert np.array_equal(qt, qt[::-1])


def test_gaussian_transform_matches_direct_integral():
    g = GaussianPulse(0.7, 1.3)
    for w in (0.0, 0.4, 1.7):
        re = si.quad(lambda t: math.cos(w * t) * g.position(t), -30, 30, epsabs=1e-15,
                     epsrel=1e-13)[0]
        im = si.quad(lambda t: math.sin(w * t) * g.position(t), -30, 30, epsabs=1e-15,
                     epsrel=1e-13)[0]
        assert g.fourier_transform(w) == pytest.approx(complex(re, im), rel=1e-11, abs=1e-14)


def test_enveloped_transform_modulation_theorem():
    q0, w0, tau = 0.4, 3.0, 1.2
    e = EnvelopedHarmonic(q0, w0, tau)
    for w in (-3.5, 0.0, 2.0, 3.0):
        expected = q0 * tau * math.sqrt(2 * math.pi) / 2 * (
            math.exp(-tau**2 * (w - w0) ** 2 / 2) + math.exp(-tau**2 * (w + w0) ** 2 / 2))
        assert e.fourier_transform(w).real == pytest.approx(expected, rel=1e-14)
        re = si.quad(lambda t: e.position(t), -30, 30, weight="cos", wvar=w, epsabs=1e-15,
                     epsrel=1e-13, limit=200)[0]
        assert e.fourier_transform(w).real == pytest.approx(re, rel=1e-9, abs=1e-13)


def test_derivatives_examples():
    g = GaussianPulse(2.0, 0.5)
    assert derivative(g, 5, 0.0) == 0.0
    assert derivative(g, 2, 0.0) == pytest.approx(-2.0 / 0.25)
    for tr in ANALYTIC:
        assert derivative(tr, 0, 0.37) == pytest.approx(tr.position(0.37))


@pytest.mark.parametrize("tr", ANALYTIC[:1] + ANALYTIC[2:], ids=lambda t: t.kind)
@pytest.mark.parametrize("n", range(1, 6))
def test_derivatives_against_finite_differences(tr, n):
    h = 1e-3
    t = np.linspace(-2, 2, 9)
    fd = (tr.derivative(n - 1, t + h) - tr.derivative(n - 1, t - h)) / (2 * h)
    assert np.allclose(fd, tr.derivative(n, t), rtol=1e-5, atol=1e-5 * np.max(np.abs(fd)))


def test_order_limits():
    with pytest.raises(ValueError):
        GaussianPulse(1, 1).derivative(6, 0.0)


@pytest.mark.parametrize("tr", ANALYTIC, ids=lambda t: t.kind)
def test_parseval(tr):
    T = 40 * tr.tau
    time = si.quad(lambda t: tr.position(t) ** 2, -T, T, epsabs=0, epsrel=1e-13, limit=400)[0]
    W = 40 / tr.tau + getattr(tr, "omega0", 0)
    freq = si.quad(lambda w: float(tr.power(w)) / (2 * math.pi), -W, W, epsabs=0,
                   epsrel=1e-13, limit=400)[0]
    assert freq == pytest.approx(time, rel=1e-8)


@pytest.mark.parametrize("tr", ANALYTIC, ids=lambda t: t.kind)
@pytest.mark.parametrize("n", range(0, 6))
def test_jerk_energy_closed_form_vs_time_quadrature(tr, n):
    T = 40 * tr.tau
    pts = list(np.linspace(-T, T, 41))
    ref = sum(si.quad(lambda t: tr.derivative(n, t) ** 2, a, b, epsabs=0, epsrel=1e-13)[0]
              for a, b in zip(pts[:-1], pts[1:]))
    assert jerk_energy(tr, n) == pytest.approx(ref, rel=1e-9)


def test_jerk_energy_examples():
    assert jerk_energy(GaussianPulse(1, 1), 0) == pytest.approx(math.sqrt(math.pi), rel=1e-15)
    assert jerk_energy(Stationary(), 3) == 0.0


@pytest.mark.parametrize("tr", ANALYTIC, ids=lambda t: t.kind)
def test_jerk_energy_parseval(tr):
    W = 40 / tr.tau + getattr(tr, "omega0", 0)
    ref = si.quad(lambda w: w**6 * float(tr.power(w)) / (2 * math.pi), -W, W, epsabs=0,
                  epsrel=1e-13, limit=400)[0]
    assert jerk_energy(tr, 3) == pytest.approx(ref, rel=1e-9)


@settings(max_examples=50, deadline=None)
@given(q0=st.floats(0.01, 10), w0=st.floats(0, 10), tau=st.floats(0.1, 10),
       w=st.floats(-20, 20))
def test_hermitian_symmetry(q0, w0, tau, w):
    for tr in (GaussianPulse(q0, tau), EnvelopedHarmonic(q0, w0, tau)):
        assert tr.fourier_transform(-w) == np.conj(tr.fourier_transform(w))


@settings(max_examples=50, deadline=None)
@given(q0=st.floats(-10, 10), w0=st.floats(0, 10), tau=st.floats(0.1, 10),
       t=st.floats(-50, 50))
def test_bounded(q0, w0, tau, t):
    for tr in (GaussianPulse(q0, tau), EnvelopedHarmonic(q0, w0, tau)):
        assert abs(tr.position(t)) <= tr.bound * (1 + 1e-15)


def _sampled_pulse(window="tukey", n=4001):
    t = np.linspace(-20, 20, n)
    g = GaussianPulse(1.0, 1.0)
    return g, Sampled(t, g.position(t), window)


@pytest.mark.parametrize("window", ["tukey", "none"])
def test_sampled_vs_analytic_transform(window):
    g, s = _sampled_pulse(window)
    w = np.linspace(-5.2, 5.2, 105)  # |qt| > 1e-6 peak out to |w| ~ 5.26
    ref = g.fourier_transform(w)
    assert np.max(np.abs(s.fourier_transform(w) - ref) / np.abs(ref)) < 1e-6


def test_sampled_hermitian_and_bandlimited():
    _, s = _sampled_pulse("hann")
    w = np.array([0.3, 1.1, 2.5])
    assert np.allclose(s.fourier_transform(-w), np.conj(s.fourier_transform(w)), rtol=1e-13)
    assert s.fourier_transform(s.nyquist * 1.01) == 0


def test_sampled_derivatives_and_energy():
    g, s = _sampled_pulse("none", 8001)
    t = np.linspace(-3, 3, 13)
    for n in range(4):
        assert np.allclose(s.derivative(n, t), g.derivative(n, t), atol=2e-4)
    assert s.jerk_energy(3) == pytest.approx(g.jerk_energy(3), rel=1e-4)
    with pytest.raises(ValueError):
        s.derivative(4, 0.0)


def test_sampled_validation():
    with pytest.raises(ValueError, match="8 points"):
        Sampled(np.arange(5.0), np.zeros(5))
    with pytest.raises(ValueError, match="uniform"):
        Sampled(np.array([0, 1, 2, 3, 4, 5, 6, 7.5]), np.zeros(8))


def test_sampled_csv_round_trip(tmp_path):
    _, s = _sampled_pulse("hann", 101)
    p = tmp_path / "traj.csv"
    s.to_csv(p)
    back = Sampled.from_csv(p)
    assert np.array_equal(back.t, s.t) and np.array_equal(back.q, s.q)
    assert p.read_text().splitlines()[0] == "t_seconds,q_centimeters"


def test_sampled_csv_requires_header(tmp_path):
    p = tmp_path / "bad.csv"
    p.write_text("0,1\n1,2\n")
    with pytest.raises(ValueError, match="header"):
        Sampled.from_csv(p)


def test_immutable():
    g = GaussianPulse(1.0, 1.0)
    with pytest.raises(Exception):
        g.q0 = 2.0
    _, s = _sampled_pulse()
    with pytest.raises(ValueError):
        s.q[0] = 1.0
