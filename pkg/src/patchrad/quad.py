"""Adaptive Gauss-Kronrod quadrature for the k- and omega-integrals.

Integrands are called with a 1-D numpy array of abscissae and must return an
array of the same shape.
"""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass
from typing import Callable, Iterable, Sequence

import numpy as np

Integrand = Callable[[np.ndarray], np.ndarray]

DEFAULT_REL_TOL = 1e-10
DEFAULT_ABS_TOL = 1e-300
DEFAULT_MAX_EVALS = 1_000_000

# 21-point Kronrod extension of the 10-point Gauss rule (QUADPACK qk21).
_XGK = np.array([
    0.995657163025808080735527280689003,
    0.973906528517171720077964012084452,
    0.930157491355708226001207180059508,
    0.865063366688984510732096688423493,
    0.780817726586416897063717578345042,
    0.679409568299024406234327365114874,
    0.562757134668604683339000099272694,
    0.433395394129247190799265943165784,
    0.294392862701460198131126603103866,
    0.148874338981631210884826001129720,
    0.000000000000000000000000000000000,
])
_WGK = np.array([
    0.011694638867371874278064396062192,
    0.032558162307964727478818972459390,
    0.054755896574351996031381300244580,
    0.075039674810919952767043140916190,
    0.093125454583697605535065465083366,
    0.109387158802297641899210590325805,
    0.123491976262065851077208977353419,
    0.134709217311473325928054001771707,
    0.142775938577060080797094273138717,
    0.147739104901338491374841515972068,
    0.149445554002916905664936468389821,
])
_WG = np.array([
    0.066671344308688137593568809893332,
    0.149451349150580593145776339657697,
    0.219086362515982043995534934228163,
    0.269266719309996355091226921569469,
    0.295524224714752870173892994651338,
])

NODES = np.concatenate([-_XGK[:-1], _XGK[::-1]])  # 21 nodes on [-1, 1]
KRONROD_WEIGHTS = np.concatenate([_WGK[:-1], _WGK[::-1]])
GAUSS_WEIGHTS = np.zeros(21)
GAUSS_WEIGHTS[1:10:2] = _WG
GAUSS_WEIGHTS[11:20:2] = _WG[::-1]

_EPS = np.finfo(float).eps


@dataclass(frozen=True)
class QuadResult:
    value: float
    error_estimate: float
    evaluations: int

    def __post_init__(self):
        if not self.error_estimate >= 0:
            raise ValueError("error_estimate must be >= 0")
        if self.evaluations <= 0:
            raise ValueError("evaluations must be > 0")


class QuadratureError(ArithmeticError):
    """Raised when the tolerance cannot be met within the evaluation budget."""

    def __init__(self, message: str, best: QuadResult | None = None):
        super().__init__(message)
        self.best = best


def _kronrod(f: Integrand, a: float, b: float) -> tuple[float, float]:
    half = 0.5 * (b - a)
    center = 0.5 * (a + b)
    fx = np.asarray(f(center + half * NODES), dtype=float)
    if fx.shape != NODES.shape:
        raise ValueError("integrand must return an array shaped like its input")
    if not np.all(np.isfinite(fx)):
        raise QuadratureError(f"non-finite integrand value on [{a}, {b}]")
    k = float(np.dot(KRONROD_WEIGHTS, fx))
    g = float(np.dot(GAUSS_WEIGHTS, fx))
    resabs = float(np.dot(KRONROD_WEIGHTS, np.abs(fx)))
    resasc = float(np.dot(KRONROD_WEIGHTS, np.abs(fx - 0.5 * k)))
    value = k * half
    err = abs((k - g) * half)
    resabs *= abs(half)
    resasc *= abs(half)
    # QUADPACK error scaling
    if resasc != 0.0 and err != 0.0:
        err = resasc * min(1.0, (200.0 * err / resasc) ** 1.5)
    if resabs > np.finfo(float).tiny / (50 * _EPS):
        err = max(50 * _EPS * resabs, err)
    return value, err


def integrate(
    f: Integrand,
    a: float,
    b: float,
    rel_tol: float = DEFAULT_REL_TOL,
    abs_tol: float = DEFAULT_ABS_TOL,
    breakpoints: Iterable[float] = (),
    max_evals: int = DEFAULT_MAX_EVALS,
) -> QuadResult:
    """Globally adaptive G10/K21 quadrature of ``f`` over ``[a, b]``.

    The interval with the largest error estimate is bisected until the summed
    estimate drops below ``max(abs_tol, rel_tol * |value|)``.  Interior
    ``breakpoints`` seed the initial partition, which is where integrand
    discontinuities should go.
    """
    a, b = float(a), float(b)
    if a == b:
        return QuadResult(0.0, 0.0, 1)
    sign = 1.0
    if b < a:
        a, b, sign = b, a, -1.0
    edges = [a] + sorted(p for p in set(float(p) for p in breakpoints) if a < p < b) + [b]

    heap = []
    evals = 0
    total = 0.0
    total_err = 0.0
    for lo, hi in zip(edges[:-1], edges[1:]):
        v, e = _kronrod(f, lo, hi)
        evals += 21
        total += v
        total_err += e
        heapq.heappush(heap, (-e, lo, hi, v))

    while total_err > max(abs_tol, rel_tol * abs(total)):
        if evals + 42 > max_evals:
            raise QuadratureError(
                f"no convergence on [{a}, {b}] after {evals} evaluations "
                f"(estimate {sign * total!r} +- {total_err:.3g})",
                QuadResult(sign * total, total_err, evals),
            )
        neg_e, lo, hi, v = heapq.heappop(heap)
        mid = 0.5 * (lo + hi)
        if not lo < mid < hi:
            # interval exhausted at machine resolution; accept what we have
            heapq.heappush(heap, (0.0, lo, hi, v))
            total_err += neg_e
            continue
        v1, e1 = _kronrod(f, lo, mid)
        v2, e2 = _kronrod(f, mid, hi)
        evals += 42
        total += v1 + v2 - v
        total_err += e1 + e2 + neg_e
        heapq.heappush(heap, (-e1, lo, mid, v1))
        heapq.heappush(heap, (-e2, mid, hi, v2))

    # re-sum to shed the drift of incremental updates
    total = math.fsum(item[3] for item in heap)
    total_err = math.fsum(-item[0] for item in heap)
    return QuadResult(sign * total, max(total_err, 0.0), evals)


def integrate_sqrt_endpoint(
    f: Integrand,
    a: float,
    rel_tol: float = DEFAULT_REL_TOL,
    abs_tol: float = DEFAULT_ABS_TOL,
    breakpoints: Sequence[float] = (),
    max_evals: int = DEFAULT_MAX_EVALS,
) -> QuadResult:
    """Compute ``int_0^a dk k^3 f(k) sqrt(a^2 - k^2)``.

    With ``k = a sin(theta)`` the integral becomes
    ``a^5 int_0^{pi/2} sin^3 cos^2 f(a sin theta) dtheta``, which is smooth,
    so the square-root endpoint is never sampled.  ``breakpoints`` are given
    in k and mapped to theta.
    """
    a = float(a)
    if a < 0 or not math.isfinite(a):
        raise ValueError(f"upper limit must be finite and >= 0, got {a}")
    if a == 0.0:
        return QuadResult(0.0, 0.0, 1)

    def g(theta):
        s = np.sin(theta)
        return s**3 * np.cos(theta) ** 2 * f(a * s)

    thetas = [math.asin(k / a) for k in breakpoints if 0.0 < k < a]
    scale = a**5
    res = integrate(g, 0.0, 0.5 * math.pi, rel_tol, abs_tol / scale if scale else abs_tol,
                    thetas, max_evals)
    return QuadResult(scale * res.value, scale * res.error_estimate, res.evaluations)


def integrate_midpoint(f: Integrand, a: float, b: float, n: int = 4096) -> QuadResult:
    """Composite midpoint rule; the error estimate is ``|M(2n) - M(n)|``.

    Deliberately naive.  Used as an independent cross-check of the adaptive
    engine.
    """
    if n < 1:
        raise ValueError("n must be >= 1")

    def mid(m):
        h = (b - a) / m
        x = a + h * (np.arange(m) + 0.5)
        return h * math.fsum(np.asarray(f(x), dtype=float))

    coarse, fine = mid(n), mid(2 * n)
    return QuadResult(fine, abs(fine - coarse), 3 * n)


def integrate_semi_infinite(
    f: Integrand,
    decay_scale: float,
    tol: float = DEFAULT_REL_TOL,
    points: Sequence[float] = (),
    max_panels: int = 200,
    max_evals: int = DEFAULT_MAX_EVALS,
) -> QuadResult:
    """Integrate ``f`` over ``[0, inf)``.

    The first panel is ``[0, max(decay_scale, max(points))]`` (split at
    ``points``); later panels double in length.  Integration stops once two
    consecutive panels each contribute less than ``tol`` times the running
    total, and the last panel's magnitude is added to the error as the bound
    on the discarded tail.  ``decay_scale`` should sit past the bulk of the
    integrand, otherwise an all-zero prefix ends the search early.
    """
    if not decay_scale > 0:
        raise ValueError("decay_scale must be > 0")
    pts = sorted(float(p) for p in points if p > 0)
    first = max([float(decay_scale)] + pts)
    total, err, evals = 0.0, 0.0, 0

    def panel(lo, hi, bps=()):
        nonlocal evals
        floor = max(DEFAULT_ABS_TOL, 0.1 * tol * abs(total))
        r = integrate(f, lo, hi, tol, floor, bps, max_evals - evals)
        evals += r.evaluations
        return r

    r = panel(0.0, first, pts)
    total, err = r.value, r.error_estimate
    lo, quiet, last = first, 0, 0.0
    for _ in range(max_panels):
        hi = 2.0 * lo
        try:
            r = panel(lo, hi)
        except QuadratureError as exc:
            raise QuadratureError(f"semi-infinite panel [{lo}, {hi}] failed: {exc}",
                                  QuadResult(total, err + abs(last), max(evals, 1))) from exc
        total += r.value
        err += r.error_estimate
        last = r.value
        quiet = quiet + 1 if abs(r.value) <= max(DEFAULT_ABS_TOL, tol * abs(total)) else 0
        if quiet >= 2:
            return QuadResult(total, err + abs(last), evals)
        lo = hi
    raise QuadratureError(
        f"tail bound not reached after {max_panels} panels (extent {lo:g})",
        QuadResult(total, err + abs(last), evals),
    )
