"""Bounded plane trajectories q(t), their Fourier transforms and derivatives.

Transform convention: ``qt(w) = int dt exp(+i w t) q(t)``, inverse
``q(t) = (1/2pi) int dw exp(-i w t) qt(w)``, so Parseval reads
``int q^2 dt = int dw/2pi |qt|^2``.

The acceleration is ``a = q''``; hence ``da/dt = q'''`` and
``d^3a/dt^3 = q^(5)``.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from scipy.special import comb, gamma

MAX_ORDER = 5
SAMPLED_MAX_ORDER = 3
WINDOWS = ("hann", "tukey", "none")
TUKEY_ALPHA = 0.25


def _hermite_e(n: int, x):
    """Probabilists' Hermite polynomial He_n(x)."""
    h0 = np.ones_like(x)
    if n == 0:
        return h0
    h1 = x
    for k in range(1, n):
        h0, h1 = h1, x * h1 - k * h0
    return h1


def _gaussian_derivative(n: int, t, tau: float):
    # d^n/dt^n exp(-t^2 / 2 tau^2)
    u = np.asarray(t, dtype=float) / tau
    return (-1.0 / tau) ** n * _hermite_e(n, u) * np.exp(-0.5 * u * u)


def _check_order(order: int, limit: int = MAX_ORDER) -> int:
    if int(order) != order or not 0 <= order <= limit:
        raise ValueError(f"derivative order must be an integer in 0..{limit}, got {order}")
    return int(order)


class Trajectory:
    """Base class; concrete variants are immutable dataclasses."""

    kind = "abstract"

    @property
    def bound(self) -> float:
        raise NotImplementedError

    def position(self, t):
        return self.derivative(0, t)

    def derivative(self, order: int, t):
        raise NotImplementedError

    def fourier_transform(self, omega):
        raise NotImplementedError

    def power(self, omega):
        """``|qt(omega)|^2``."""
        return np.abs(self.fourier_transform(omega)) ** 2

    def jerk_energy(self, n: int = 3) -> float:
        raise NotImplementedError

    def omega_scale(self) -> float:
        """Angular frequency past which ``omega^6 |qt|^2`` has decayed."""
        raise NotImplementedError

    def omega_points(self) -> tuple[float, ...]:
        """Frequencies worth using as quadrature breakpoints."""
        return ()

    def describe(self) -> dict:
        raise NotImplementedError


@dataclass(frozen=True)
class GaussianPulse(Trajectory):
    """``q(t) = q0 exp(-t^2 / 2 tau^2)``."""

    q0: float
    tau: float
    kind = "gaussian_pulse"

    def __post_init__(self):
        if not self.tau > 0:
            raise ValueError("tau must be > 0")

    @property
    def bound(self) -> float:
        return abs(self.q0)

    def derivative(self, order, t):
        return self.q0 * _gaussian_derivative(_check_order(order), t, self.tau)

    def fourier_transform(self, omega):
        w = np.asarray(omega, dtype=float)
        return (self.q0 * self.tau * math.sqrt(2 * math.pi)
                * np.exp(-0.5 * (self.tau * w) ** 2)).astype(complex)

    def jerk_energy(self, n: int = 3) -> float:
        n = _check_order(n)
        return self.q0**2 * float(gamma(n + 0.5)) / self.tau ** (2 * n - 1)

    def omega_scale(self) -> float:
        return 10.0 / self.tau

    def omega_points(self):
        return (math.sqrt(3.0) / self.tau,)

    def describe(self):
        return {"kind": self.kind, "q0_cm": self.q0, "tau_s": self.tau}


@dataclass(frozen=True)
class EnvelopedHarmonic(Trajectory):
    """``q(t) = q0 exp(-t^2 / 2 tau^2) cos(omega0 t)``."""

    q0: float
    omega0: float
    tau: float
    kind = "enveloped_harmonic"

    def __post_init__(self):
        if not self.tau > 0:
            raise ValueError("tau must be > 0")
        if not self.omega0 >= 0:
            raise ValueError("omega0 must be >= 0")

    @property
    def bound(self) -> float:
        return abs(self.q0)

    def derivative(self, order, t):
        n = _check_order(order)
        t = np.asarray(t, dtype=float)
        acc = np.zeros(t.shape, dtype=complex)
        for k in range(n + 1):
            acc = acc + comb(n, k, exact=True) * _gaussian_derivative(k, t, self.tau) \
                * (1j * self.omega0) ** (n - k)
        out = self.q0 * np.real(acc * np.exp(1j * self.omega0 * t))
        return out if out.ndim else float(out)

    def fourier_transform(self, omega):
        w = np.asarray(omega, dtype=float)
        amp = self.q0 * self.tau * math.sqrt(2 * math.pi) / 2
        return (amp * (np.exp(-0.5 * (self.tau * (w - self.omega0)) ** 2)
                       + np.exp(-0.5 * (self.tau * (w + self.omega0)) ** 2))).astype(complex)

    def jerk_energy(self, n: int = 3) -> float:
        n = _check_order(n)
        tau, w0 = self.tau, self.omega0
        var = 1.0 / (2 * tau * tau)
        # E[(w0 + sigma Z)^(2n)]
        moment = sum(
            comb(2 * n, 2 * k, exact=True) * w0 ** (2 * n - 2 * k) * var**k
            * _double_factorial(2 * k - 1)
            for k in range(n + 1)
        )
        cross = math.exp(-((tau * w0) ** 2)) * float(gamma(n + 0.5)) / tau ** (2 * n)
        return 0.5 * self.q0**2 * tau * (math.sqrt(math.pi) * moment + cross)

    def omega_scale(self) -> float:
        return self.omega0 + 12.0 / self.tau

    def omega_points(self):
        w0, d = self.omega0, 1.0 / self.tau
        return tuple(p for p in (w0 - 6 * d, w0 - d, w0, w0 + d, w0 + 6 * d) if p > 0)

    def describe(self):
        return {"kind": self.kind, "q0_cm": self.q0, "omega0_rad_per_s": self.omega0,
                "tau_s": self.tau}


def _double_factorial(n: int) -> int:
    return math.prod(range(n, 0, -2)) if n > 0 else 1


def _window(name: str, n: int) -> np.ndarray:
    j = np.arange(n)
    if name == "none":
        return np.ones(n)
    if name == "hann":
        return 0.5 * (1.0 - np.cos(2 * np.pi * j / (n - 1)))
    if name == "tukey":
        w = np.ones(n)
        edge = TUKEY_ALPHA * (n - 1) / 2
        lo = j < edge
        hi = j > (n - 1) - edge
        w[lo] = 0.5 * (1 - np.cos(np.pi * j[lo] / edge))
        w[hi] = 0.5 * (1 - np.cos(np.pi * ((n - 1) - j[hi]) / edge))
        return w
    raise ValueError(f"unknown window {name!r}; choose from {WINDOWS}")


@dataclass(frozen=True, eq=False)
class Sampled(Trajectory):
    """Uniformly sampled motion.

    The transform is the tapered, trapezoid-weighted sum
    ``sum_j h_j w_j q_j exp(i omega t_j)``, taken as band-limited: it is zero
    for ``|omega|`` above the Nyquist frequency.  Derivatives (order <= 3)
    come from repeated second-order central differences on the raw samples,
    linearly interpolated in t.
    """

    t: np.ndarray
    q: np.ndarray
    window: str = "hann"
    _weights: np.ndarray = field(init=False, repr=False)
    kind = "sampled"

    def __post_init__(self):
        t = np.asarray(self.t, dtype=float)
        q = np.asarray(self.q, dtype=float)
        if t.ndim != 1 or t.shape != q.shape:
            raise ValueError("t and q must be 1-D arrays of equal length")
        if t.size < 8:
            raise ValueError(f"sampled trajectory needs at least 8 points, got {t.size}")
        dt = np.diff(t)
        if not np.all(dt > 0) or np.max(np.abs(dt - dt.mean())) > 1e-9 * dt.mean():
            raise ValueError("sampled trajectory requires a strictly increasing uniform grid")
        h = np.full(t.size, dt.mean())
        h[0] = h[-1] = 0.5 * dt.mean()
        t.setflags(write=False)
        q.setflags(write=False)
        object.__setattr__(self, "t", t)
        object.__setattr__(self, "q", q)
        object.__setattr__(self, "_weights", h * _window(self.window, t.size))

    @property
    def dt(self) -> float:
        return float((self.t[-1] - self.t[0]) / (self.t.size - 1))

    @property
    def nyquist(self) -> float:
        return math.pi / self.dt

    @property
    def bound(self) -> float:
        return float(np.max(np.abs(self.q)))

    def _grid_derivative(self, n: int) -> np.ndarray:
        d = self.q
        for _ in range(n):
            d = np.gradient(d, self.dt, edge_order=2)
        return d

    def derivative(self, order, t):
        n = _check_order(order, MAX_ORDER)
        if n > SAMPLED_MAX_ORDER:
            raise ValueError(f"sampled trajectories support derivatives up to order "
                             f"{SAMPLED_MAX_ORDER}, got {n}")
        out = np.interp(t, self.t, self._grid_derivative(n), left=0.0, right=0.0)
        return out if np.ndim(out) else float(out)

    def fourier_transform(self, omega):
        w = np.atleast_1d(np.asarray(omega, dtype=float))
        out = np.exp(1j * np.outer(w, self.t)) @ (self._weights * self.q)
        out[np.abs(w) > self.nyquist] = 0.0
        return out if np.ndim(omega) else complex(out[0])

    def jerk_energy(self, n: int = 3) -> float:
        n = _check_order(n, MAX_ORDER)
        if n > SAMPLED_MAX_ORDER:
            raise ValueError(f"sampled trajectories support derivatives up to order "
                             f"{SAMPLED_MAX_ORDER}, got {n}")
        return float(np.trapezoid(self._grid_derivative(n) ** 2, self.t))

    def omega_scale(self) -> float:
        return self.nyquist

    def describe(self):
        return {"kind": self.kind, "n_samples": int(self.t.size), "dt_s": self.dt,
                "t0_s": float(self.t[0]), "window": self.window}

    @classmethod
    def from_csv(cls, path, window: str = "hann") -> Sampled:
        """Read a two-column ``t_seconds,q_centimeters`` CSV (header required)."""
        rows = []
        with open(path, newline="") as fh:
            reader = csv.reader(line for line in fh if not line.startswith("#"))
            header = next(reader, None)
            if header is None or [h.strip() for h in header] != ["t_seconds", "q_centimeters"]:
                raise ValueError(f"{path}: expected header 't_seconds,q_centimeters', "
                                 f"got {header!r}")
            for row in reader:
                if row:
                    rows.append((float(row[0]), float(row[1])))
        arr = np.array(rows, dtype=float).reshape(-1, 2)
        return cls(arr[:, 0], arr[:, 1], window)

    def to_csv(self, path) -> None:
        with open(Path(path), "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["t_seconds", "q_centimeters"])
            for ti, qi in zip(self.t, self.q):
                w.writerow([repr(float(ti)), repr(float(qi))])


@dataclass(frozen=True)
class Stationary(Trajectory):
    """The trivial motion ``q = 0``."""

    kind = "stationary"

    @property
    def bound(self) -> float:
        return 0.0

    def derivative(self, order, t):
        _check_order(order)
        return np.zeros_like(np.asarray(t, dtype=float)) if np.ndim(t) else 0.0

    def fourier_transform(self, omega):
        return np.zeros_like(np.asarray(omega, dtype=float), dtype=complex)

    def jerk_energy(self, n: int = 3) -> float:
        _check_order(n)
        return 0.0

    def omega_scale(self) -> float:
        return 1.0

    def describe(self):
        return {"kind": self.kind}


def fourier_transform(traj: Trajectory, omega):
    return traj.fourier_transform(omega)


def derivative(traj: Trajectory, order: int, t):
    return traj.derivative(order, t)


def jerk_energy(traj: Trajectory, n: int = 3) -> float:
    """``int dt [q^(n)(t)]^2``; ``n = 3`` is the integral of the squared jerk."""
    return traj.jerk_energy(n)
