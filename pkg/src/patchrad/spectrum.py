"""Radiated spectral density of a moving dipole layer and derived quantities.

Everything is per unit area of the plane, both sides combined, in
Gaussian-CGS.  The master formula is

    P(w) = |w| |qt(w)|^2 int_0^{w/c} dk k^3 Omega(k) sqrt((w/c)^2 - k^2)

and the total radiated energy per unit area is ``int_0^inf dw/2pi P(w)``.
``K(w) = P(w) / |qt(w)|^2`` depends on the correlation model only.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import quad
from .correlation import (
    Constant,
    CorrelationModel,
    GaussianQuasilocal,
    SharpCutoff,
    TimeCorrelationModel,
)
from .motion import Sampled, Stationary, Trajectory
from .quad import QuadratureError, QuadResult
from .specfun import dawson
from .units import C_LIGHT, FORCE_PER_AREA, HBAR, LENGTH, TIME, Quantity, c, hbar, unit

SMALL_L_FACTOR = 2.0 / 15.0
SHARP_CUTOFF_PREFACTOR = 4 * math.pi / 15
SHARP_CUTOFF_PRINTED_PREFACTOR = 64 * math.pi / 15
ENERGY_FACTOR_PRINTED = 2.0 / 15.0
ENERGY_FACTOR_CANDIDATES = (1.0 / 15.0, 2.0 / 15.0)
F_SERIES_SWITCH = 0.5


def _threads() -> int:
    try:
        return max(1, int(os.environ.get("PATCHRAD_THREADS", "1")))
    except ValueError:
        return 1


def parallel_map(fn, items):
    """Map ``fn`` over ``items``; order of results matches ``items``.

    Each item is computed independently, so output does not depend on the
    worker count set by ``PATCHRAD_THREADS``.
    """
    items = list(items)
    n = _threads()
    if n == 1 or len(items) < 2:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=n) as pool:
        return list(pool.map(fn, items))


# --- master formula -------------------------------------------------------

def k_integral(model: CorrelationModel, omega: float, rel_tol: float = quad.DEFAULT_REL_TOL
               ) -> QuadResult:
    """``int_0^{w/c} dk k^3 Omega(k) sqrt((w/c)^2 - k^2)``."""
    a = abs(float(omega)) / C_LIGHT
    lo, _ = model.support()
    if a == 0.0 or lo >= a:
        return QuadResult(0.0, 0.0, 1)
    try:
        return quad.integrate_sqrt_endpoint(model, a, rel_tol, breakpoints=model.breakpoints())
    except QuadratureError as exc:
        raise QuadratureError(f"k-integral failed at omega={omega!r} for "
                              f"{model.describe()}: {exc}", exc.best) from exc


def kernel(model: CorrelationModel, omega: float, rel_tol: float = quad.DEFAULT_REL_TOL) -> float:
    """``K(w) = P(w) / |qt(w)|^2``, by direct quadrature."""
    return abs(float(omega)) * k_integral(model, omega, rel_tol).value


def spectral_density(model: CorrelationModel, traj: Trajectory, omega: float,
                     rel_tol: float = quad.DEFAULT_REL_TOL) -> float:
    """Spectral density by direct quadrature of the k-integral.

    This is the reference every closed form is checked against.  ``omega = 0``
    gives 0 (empty k range).
    """
    omega = float(omega)
    if omega < 0 or not math.isfinite(omega):
        raise ValueError(f"omega must be finite and >= 0, got {omega}")
    q2 = float(traj.power(omega))
    if q2 == 0.0 or omega == 0.0:
        return 0.0
    return kernel(model, omega, rel_tol) * q2


# --- Gaussian model -------------------------------------------------------

def _f_series_coefficients(n_terms: int = 24) -> list[float]:
    # 3x - (3 + 2x^2) D(x) = sum_{n>=2} a_n x^(2n+1), D = sum d_n x^(2n+1)
    d = [1.0]
    for n in range(1, n_terms + 2):
        d.append(d[-1] * -2.0 / (2 * n + 1))
    return [-(3 * d[n] + 2 * d[n - 1]) for n in range(2, n_terms + 2)]


_F_COEFFS = _f_series_coefficients()


def f_gaussian(x: float) -> float:
    """``(2 pi / x^3) [3x - (3 + 2x^2) D(x)]`` with D Dawson's integral.

    Below ``x = 0.5`` the bracket is summed as a power series; the direct
    form loses digits there since the result is O(x^5) from O(x) terms.
    """
    x = float(x)
    if not x > 0 or not math.isfinite(x):
        raise ValueError(f"f_gaussian needs finite x > 0, got {x}")
    if x < F_SERIES_SWITCH:
        x2 = x * x
        total, p = 0.0, x2
        for a in _F_COEFFS:
            total += a * p
            p *= x2
        return 2 * math.pi * total
    return 2 * math.pi / x**3 * (3 * x - (3 + 2 * x * x) * dawson(x))


def gaussian_kernel_closed(V_rms: float, ell: float, omega: float, image: bool = False) -> float:
    """Closed-form ``K(w)`` of the Gaussian quasilocal model."""
    if not ell > 0:
        raise ValueError("ell must be > 0")
    omega = abs(float(omega))
    if omega == 0.0:
        return 0.0
    scale = 1.0 if image else 0.25
    return scale * V_rms**2 * omega**4 / C_LIGHT**3 * f_gaussian(ell * omega / (4 * C_LIGHT))


def spectral_density_gaussian_closed(V_rms: float, ell: float, traj: Trajectory, omega: float,
                                     image: bool = False) -> float:
    """``V^2 |qt|^2 (w^4/c^3) f(l w / 4c)``, divided by 4 unless ``image``.

    The undivided expression already carries the grounded-conductor factor 4.
    """
    if not omega > 0:
        raise ValueError("omega must be > 0")
    return gaussian_kernel_closed(V_rms, ell, omega, image) * float(traj.power(omega))


# --- sharp-cutoff model ---------------------------------------------------

def sharp_cutoff_shape(beta: float) -> float:
    """``(1 - beta^2)^{3/2} (2 + 3 beta^2)`` for ``beta = k_min c / w``."""
    b2 = beta * beta
    return (1 - b2) ** 1.5 * (2 + 3 * b2)


def spectral_density_sharpcutoff_closed(V_rms: float, k_min: float, k_max: float,
                                        traj: Trajectory, omega: float, image: bool = False,
                                        rel_tol: float = quad.DEFAULT_REL_TOL) -> float:
    """Closed form of the sharp-cutoff spectrum.

    Valid for ``k_min < w/c < k_max``; zero at and below threshold; above
    ``k_max c`` the closed form's assumption fails and the k-integral is done
    numerically.
    """
    model = SharpCutoff(V_rms, k_min, k_max, image)
    omega = float(omega)
    if not omega > 0:
        raise ValueError("omega must be > 0")
    a = omega / C_LIGHT
    if a <= k_min:
        return 0.0
    if a >= k_max:
        return spectral_density(model, traj, omega, rel_tol)
    pref = SHARP_CUTOFF_PREFACTOR * (4.0 if image else 1.0)
    return (pref * V_rms**2 * omega**6 * float(traj.power(omega))
            / (C_LIGHT**5 * (k_max**2 - k_min**2)) * sharp_cutoff_shape(k_min / a))


# --- short correlation length -----------------------------------------------

def small_l_kernel(omega_tilde0: float, omega: float) -> float:
    return SMALL_L_FACTOR * omega_tilde0 * abs(float(omega)) ** 6 / C_LIGHT**5


def spectral_density_small_l(omega_tilde0: float, traj: Trajectory, omega: float) -> float:
    """``(2/15) Omega(0) w^6 |qt|^2 / c^5``, valid when ``l w / c << 1``."""
    if not omega > 0:
        raise ValueError("omega must be > 0")
    return small_l_kernel(omega_tilde0, omega) * float(traj.power(omega))


# --- energy -----------------------------------------------------------------

def _omega_breakpoints(model: CorrelationModel, traj: Trajectory) -> tuple[float, ...]:
    pts = list(traj.omega_points())
    pts += [k * C_LIGHT for k in model.breakpoints() if 0 < k < math.inf]
    return tuple(sorted(set(p for p in pts if p > 0)))


def energy_integral(model: CorrelationModel, traj: Trajectory, tol: float = 1e-10,
                    kernel_fn=None) -> QuadResult:
    """``int_0^inf dw/2pi P(w)`` with its error estimate.

    ``kernel_fn(w)`` replaces the quadrature kernel when a closed form is
    known (used by the correlation-length sweep).
    """
    if isinstance(traj, Stationary) or traj.bound == 0.0:
        return QuadResult(0.0, 0.0, 1)
    kfun = kernel_fn or (lambda w: kernel(model, w, min(tol, quad.DEFAULT_REL_TOL)))

    def integrand(ws):
        return np.array([kfun(w) * float(traj.power(w)) if w > 0 else 0.0 for w in ws]) \
            / (2 * math.pi)

    pts = _omega_breakpoints(model, traj)
    scale = traj.omega_scale()
    if isinstance(traj, Sampled):
        pts = tuple(p for p in pts if p < traj.nyquist)
    return quad.integrate_semi_infinite(integrand, scale, tol, pts)


def total_energy(model: CorrelationModel, traj: Trajectory, tol: float = 1e-10) -> float:
    """Total radiated energy per unit area (erg/cm^2)."""
    return energy_integral(model, traj, tol).value


@dataclass(frozen=True)
class EnergyFactorCheck:
    """Fit of ``U = F Omega(0) I3 / c^5`` against the candidate prefactors."""

    energy: float
    jerk_integral: float
    fitted_factor: float
    matched_factor: float | None
    relative_mismatch: float
    printed_factor: float = ENERGY_FACTOR_PRINTED

    def as_dict(self):
        return {
            "energy_erg_per_cm2": self.energy,
            "jerk_integral_cm2_per_s5": self.jerk_integral,
            "fitted_factor": self.fitted_factor,
            "matched_factor": self.matched_factor,
            "relative_mismatch": self.relative_mismatch,
            "printed_factor": self.printed_factor,
        }


def identify_energy_factor(omega_tilde0: float, traj: Trajectory, tol: float = 1e-10,
                           match_tol: float = 1e-6) -> EnergyFactorCheck:
    """Integrate the constant-spectrum energy and see which F in {1/15, 2/15} fits."""
    u = total_energy(Constant(omega_tilde0), traj, tol)
    i3 = traj.jerk_energy(3)
    fitted = u * C_LIGHT**5 / (omega_tilde0 * i3)
    best = min(ENERGY_FACTOR_CANDIDATES, key=lambda f: abs(fitted / f - 1))
    mismatch = abs(fitted / best - 1)
    return EnergyFactorCheck(u, i3, fitted, best if mismatch <= match_tol else None, mismatch)


# --- reaction force -------------------------------------------------------------

# erg cm * (cm / s^5) / (cm/s)^5 must be a pressure
assert (unit("erg") * unit("cm") * Quantity(1.0, LENGTH / TIME**5) / c**5).dim == FORCE_PER_AREA


def reaction_force(omega_tilde0: float, traj: Trajectory, t):
    """Radiation-reaction force per unit area, ``-(2/15) Omega(0) q^(5)(t) / c^5``.

    The sign makes the force dissipative: ``-int f q' dt`` is the positive
    work ``(2/15) Omega(0) int (q''')^2 dt / c^5``.
    """
    if isinstance(traj, Sampled):
        raise ValueError("reaction force needs the fifth derivative; "
                         "sampled trajectories only provide up to third order")
    return -SMALL_L_FACTOR * omega_tilde0 * traj.derivative(5, t) / C_LIGHT**5


# --- time-dependent layers --------------------------------------------------------

def motion_overlap(model: TimeCorrelationModel, traj: Trajectory, omega: float,
                   rel_tol: float = 1e-10) -> complex:
    """``int dnu/2pi qt(-nu) g(w - nu) qt(nu)`` for a Lorentzian profile g.

    With ``nu = w + gamma tan(phi)`` the Lorentzian weight becomes the flat
    measure ``dphi / pi`` on ``(-pi/2, pi/2)``.
    """
    gam = model.temporal.gamma
    omega = float(omega)

    def product(phi):
        nu = omega + gam * np.tan(phi)
        return traj.fourier_transform(-nu) * traj.fourier_transform(nu)

    peaks = set()
    for p in traj.omega_points() + (0.0,):
        peaks.update((p, -p))
    half = 0.5 * math.pi
    bps = sorted({math.atan((p - omega) / gam) for p in peaks} | {0.0})
    bps = [b for b in bps if -half < b < half]

    scale = max(float(np.max(np.abs(product(np.array(bps))))), 1e-300) if bps else 1e-300
    re = quad.integrate(lambda x: np.real(product(x)), -half, half, rel_tol, 1e-300, bps)
    im = quad.integrate(lambda x: np.imag(product(x)), -half, half, rel_tol,
                        rel_tol * scale, bps)
    return complex(re.value, im.value) / math.pi


def spectral_density_time_dependent(model: TimeCorrelationModel, traj: Trajectory,
                                    omega: float, rel_tol: float = 1e-10) -> float:
    """Spectral density for a layer whose correlations also depend on time lag.

    The instantaneous profile returns :func:`spectral_density` on the static
    model unchanged.  For a separable Lorentzian profile the k- and
    nu-integrals factorize, ``P = K(w) * overlap(w)``.
    """
    if model.instantaneous:
        return spectral_density(model.spatial, traj, omega, rel_tol)
    omega = float(omega)
    if not omega > 0:
        raise ValueError("omega must be > 0")
    j = motion_overlap(model, traj, omega, rel_tol)
    if abs(j.imag) > 1e-10 * max(abs(j), 1e-300):
        raise QuadratureError(f"motion overlap has imaginary residual {j.imag!r} "
                              f"(magnitude {abs(j)!r}); trajectory not real?")
    return kernel(model.spatial, omega, rel_tol) * max(j.real, 0.0)


# --- dynamical Casimir benchmark ----------------------------------------------

def dce_kernel(omega: float) -> float:
    return HBAR / (30 * math.pi**2) * abs(float(omega)) ** 6 / C_LIGHT**4


def dce_spectral_density(traj: Trajectory, omega: float) -> float:
    """Perfect-mirror vacuum emission ``(hbar / 30 pi^2) w^6 |qt|^2 / c^4``."""
    if not omega > 0:
        raise ValueError("omega must be > 0")
    return dce_kernel(omega) * float(traj.power(omega))


def xi_ratio(V_rms: float, ell: float) -> float:
    """Small-l patch emission over vacuum emission, ``pi^3 V^2 l^2 / (2 hbar c)``."""
    if V_rms < 0 or ell < 0:
        raise ValueError("V_rms and ell must be >= 0")
    return math.pi**3 * V_rms**2 * ell**2 / (2 * HBAR * C_LIGHT)


def xi_ratio_numeric(V_rms: float, ell: float, omega: float) -> float:
    """The same ratio formed from the two kernels at one frequency."""
    om0 = GaussianQuasilocal(V_rms, ell).value_at_zero
    return small_l_kernel(om0, omega) / dce_kernel(omega)


def xi_reference_scale() -> float:
    """``V^2 l^2`` of the (40 mV, 100 nm) reference patch, in statvolt^2 cm^2."""
    v = 0.040 * unit("V").value
    l = 100 * unit("nm").value
    return v * v * l * l


# xi is a pure number
assert (Quantity(1.0, unit("V").dim) ** 2 * unit("cm") ** 2 / (hbar * c)).dim.dimensionless


# --- correlation-length sweep -------------------------------------------------

@dataclass(frozen=True)
class SweepResult:
    ell: np.ndarray
    energy: np.ndarray
    ell_star: float | None
    energy_star: float | None
    on_boundary: bool


_GOLDEN = (math.sqrt(5) - 1) / 2


def sweep_correlation_length(V_rms: float, traj: Trajectory, ell_values, tol: float = 1e-10,
                             image: bool = False, refine_tol: float = 1e-6) -> SweepResult:
    """Tabulate total energy against l for the Gaussian model and locate its maximum.

    The maximum is refined by golden-section search in log l over the table
    bracket.  A maximum at either end of the table is flagged through
    ``on_boundary`` and no ``ell_star`` is returned.
    """
    ells = np.asarray(sorted(float(x) for x in ell_values))
    if ells.size < 3 or ells[0] <= 0:
        raise ValueError("need at least 3 positive correlation lengths")

    def energy(ell):
        return energy_integral(
            GaussianQuasilocal(V_rms, ell, image), traj, tol,
            kernel_fn=lambda w: gaussian_kernel_closed(V_rms, ell, w, image),
        ).value

    table = np.array(parallel_map(energy, ells))
    i = int(np.argmax(table))
    if i == 0 or i == ells.size - 1:
        return SweepResult(ells, table, None, None, True)

    lo, hi = math.log(ells[i - 1]), math.log(ells[i + 1])
    x1 = hi - _GOLDEN * (hi - lo)
    x2 = lo + _GOLDEN * (hi - lo)
    f1, f2 = energy(math.exp(x1)), energy(math.exp(x2))
    while hi - lo > refine_tol:
        if f1 > f2:
            hi, x2, f2 = x2, x1, f1
            x1 = hi - _GOLDEN * (hi - lo)
            f1 = energy(math.exp(x1))
        else:
            lo, x1, f1 = x1, x2, f2
            x2 = lo + _GOLDEN * (hi - lo)
            f2 = energy(math.exp(x2))
    best = math.exp(0.5 * (lo + hi))
    return SweepResult(ells, table, best, energy(best), False)


# --- monochromatic steady state ------------------------------------------------

def monochromatic_power(model: CorrelationModel, omega0: float, q0: float,
                        rel_tol: float = quad.DEFAULT_REL_TOL) -> float:
    """Time-averaged power per unit area for ``q = q0 cos(w0 t)``: ``(q0^2/4) K(w0)``."""
    if not omega0 > 0:
        raise ValueError("omega0 must be > 0")
    if q0 == 0:
        return 0.0
    return 0.25 * q0 * q0 * kernel(model, omega0, rel_tol)


# --- sampled spectra ------------------------------------------------------------

@dataclass
class SpectrumResult:
    omega: np.ndarray
    P: np.ndarray
    K: np.ndarray
    P_over_PDCE: np.ndarray | None = None
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        self.omega = np.asarray(self.omega, dtype=float)
        self.P = np.asarray(self.P, dtype=float)
        self.K = np.asarray(self.K, dtype=float)
        if self.omega.size > 1 and np.any(np.diff(self.omega) <= 0):
            raise ValueError("omega grid must be strictly increasing")
        if np.any(self.P < 0):
            raise ValueError("spectral density must be >= 0")


def compute_spectrum(model: CorrelationModel, traj: Trajectory, omega_grid,
                     rel_tol: float = quad.DEFAULT_REL_TOL, include_dce: bool = False
                     ) -> SpectrumResult:
    omega = np.asarray(omega_grid, dtype=float)
    K = np.array(parallel_map(lambda w: kernel(model, w, rel_tol), omega))
    q2 = np.asarray(traj.power(omega), dtype=float)
    P = K * q2
    ratio = None
    if include_dce:
        kd = np.array([dce_kernel(w) for w in omega])
        with np.errstate(divide="ignore", invalid="ignore"):
            ratio = np.where(kd > 0, K / np.where(kd > 0, kd, 1.0), 0.0)
    meta = {
        "model": model.describe(),
        "trajectory": traj.describe(),
        "image_factor": bool(model.image),
        "quadrature": {"rel_tol": rel_tol, "abs_tol": quad.DEFAULT_ABS_TOL},
        "unit_system": "gaussian-cgs",
    }
    return SpectrumResult(omega, P, K, ratio, meta)
