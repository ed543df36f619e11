"""Dipole-layer autocorrelation spectra.

A model gives ``Omega(k)``, the 2-D Fourier transform of
``(1/L^2) int d^2y D(y) D(x + y)``, as a function of ``|k|`` only.  With
``image=True`` the value is multiplied by 4 (a layer in front of a grounded
conductor: the image doubles the dipole density).
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field, replace

import numpy as np
from scipy.interpolate import PchipInterpolator

IMAGE_FACTOR = 4.0


class CorrelationModel:
    kind = "abstract"
    image: bool = False

    def _bare(self, k: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def __call__(self, k):
        k_arr = np.asarray(k, dtype=float)
        if np.any(k_arr < 0) or np.any(np.isnan(k_arr)):
            raise ValueError("wavenumber must be >= 0")
        val = self._bare(k_arr)
        if self.image:
            val = IMAGE_FACTOR * val
        return val if np.ndim(val) else float(val)

    def support(self) -> tuple[float, float]:
        """``(k_lo, k_hi)`` outside of which the spectrum vanishes."""
        return 0.0, math.inf

    def breakpoints(self) -> tuple[float, ...]:
        """Wavenumbers where the spectrum is not smooth."""
        return ()

    @property
    def value_at_zero(self) -> float:
        """Long-wavelength value ``Omega(0)`` (image factor included)."""
        return self(0.0)

    def with_image(self, image: bool = True):
        return replace(self, image=image)

    def describe(self) -> dict:
        raise NotImplementedError


@dataclass(frozen=True)
class GaussianQuasilocal(CorrelationModel):
    """``(pi/8) V^2 l^2 exp(-k^2 l^2 / 16)``."""

    V_rms: float
    ell: float
    image: bool = False
    kind = "gaussian"

    def __post_init__(self):
        if not self.V_rms >= 0 or not self.ell >= 0:
            raise ValueError("V_rms and ell must be >= 0")

    def _bare(self, k):
        ell2 = self.ell**2
        return (math.pi / 8) * self.V_rms**2 * ell2 * np.exp(-k * k * ell2 / 16)

    def describe(self):
        return {"kind": self.kind, "V_rms_statvolt": self.V_rms, "ell_cm": self.ell,
                "image": self.image}


@dataclass(frozen=True)
class SharpCutoff(CorrelationModel):
    """Flat spectrum ``4 pi V^2 / (k_max^2 - k_min^2)`` on ``k_min <= k <= k_max``."""

    V_rms: float
    k_min: float
    k_max: float
    image: bool = False
    kind = "sharp_cutoff"

    def __post_init__(self):
        if not 0 <= self.k_min < self.k_max:
            raise ValueError(f"sharp cutoff needs 0 <= k_min < k_max, got "
                             f"k_min={self.k_min}, k_max={self.k_max}")
        if not self.V_rms >= 0:
            raise ValueError("V_rms must be >= 0")

    @property
    def level(self) -> float:
        return 4 * math.pi * self.V_rms**2 / (self.k_max**2 - self.k_min**2)

    def _bare(self, k):
        inside = (k >= self.k_min) & (k <= self.k_max)
        return np.where(inside, self.level, 0.0)

    def support(self):
        return self.k_min, self.k_max

    def breakpoints(self):
        return (self.k_min, self.k_max)

    def describe(self):
        return {"kind": self.kind, "V_rms_statvolt": self.V_rms, "k_min_per_cm": self.k_min,
                "k_max_per_cm": self.k_max, "image": self.image}


@dataclass(frozen=True)
class Constant(CorrelationModel):
    """k-independent spectrum, the short-correlation-length idealization."""

    value: float
    image: bool = False
    kind = "constant"

    def __post_init__(self):
        if not self.value >= 0:
            raise ValueError("constant spectrum must be >= 0")

    def _bare(self, k):
        return np.full(np.shape(k), float(self.value)) if np.ndim(k) else float(self.value)

    def describe(self):
        return {"kind": self.kind, "omega_tilde0_erg_cm": self.value, "image": self.image}


@dataclass(frozen=True, eq=False)
class Tabulated(CorrelationModel):
    """Spectrum interpolated from nodes with a monotone cubic (PCHIP).

    Constant below the first node, zero above the last.  PCHIP keeps every
    interpolant between its two bracketing node values, so non-negative
    nodes give a non-negative spectrum.  ``zero_mode`` optionally records the
    k = 0 power that the table itself excludes.
    """

    k: np.ndarray
    values: np.ndarray
    image: bool = False
    zero_mode: float | None = None
    _interp: PchipInterpolator = field(init=False, repr=False)
    kind = "tabulated"

    def __post_init__(self):
        k = np.asarray(self.k, dtype=float)
        v = np.asarray(self.values, dtype=float)
        if k.ndim != 1 or k.shape != v.shape or k.size < 2:
            raise ValueError("tabulated spectrum needs >= 2 nodes in matching 1-D arrays")
        if np.any(np.diff(k) <= 0) or k[0] < 0:
            raise ValueError("tabulated k grid must be >= 0 and strictly increasing")
        if np.any(v < 0) or not np.all(np.isfinite(v)):
            raise ValueError("tabulated spectrum values must be finite and >= 0")
        k.setflags(write=False)
        v.setflags(write=False)
        object.__setattr__(self, "k", k)
        object.__setattr__(self, "values", v)
        object.__setattr__(self, "_interp", PchipInterpolator(k, v, extrapolate=False))

    def _bare(self, k):
        k = np.asarray(k, dtype=float)
        out = self._interp(np.clip(k, self.k[0], self.k[-1]))
        out = np.where(k > self.k[-1], 0.0, out)
        # nodes reproduce the table exactly
        idx = np.clip(np.searchsorted(self.k, k), 0, self.k.size - 1)
        out = np.where(self.k[idx] == k, self.values[idx], out)
        # guard against round-off undershoot at flat zero stretches
        out = np.maximum(out, 0.0)
        return out if out.ndim else float(out)

    def support(self):
        return 0.0, float(self.k[-1])

    def breakpoints(self):
        return (float(self.k[-1]),)

    def describe(self):
        return {"kind": self.kind, "n_nodes": int(self.k.size),
                "k_range_per_cm": [float(self.k[0]), float(self.k[-1])],
                "zero_mode": self.zero_mode, "image": self.image}

    def to_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["k_per_cm", "omega_tilde_erg_cm"])
            for ki, vi in zip(self.k, self.values):
                w.writerow([repr(float(ki)), repr(float(vi))])

    @classmethod
    def from_csv(cls, path, image: bool = False) -> Tabulated:
        with open(path, newline="") as fh:
            reader = csv.reader(line for line in fh if not line.startswith("#"))
            header = next(reader, None)
            if header is None or [h.strip() for h in header] != ["k_per_cm", "omega_tilde_erg_cm"]:
                raise ValueError(f"{path}: expected header 'k_per_cm,omega_tilde_erg_cm', "
                                 f"got {header!r}")
            rows = [(float(r[0]), float(r[1])) for r in reader if r]
        arr = np.array(rows, dtype=float).reshape(-1, 2)
        return cls(arr[:, 0], arr[:, 1], image=image)


def omega_tilde(model: CorrelationModel, k):
    return model(k)


# --- temporal profiles -----------------------------------------------------

@dataclass(frozen=True)
class Instantaneous:
    """Equal-time correlation, ``g(w) = 2 pi delta(w)``."""

    kind = "instantaneous"

    def describe(self):
        return {"kind": self.kind}


@dataclass(frozen=True)
class Lorentzian:
    """``g(w) = 2 gamma / (w^2 + gamma^2)``, normalized to ``int dw/2pi g = 1``."""

    gamma: float
    kind = "lorentzian"

    def __post_init__(self):
        if not self.gamma > 0:
            raise ValueError("gamma must be > 0")

    def __call__(self, w):
        w = np.asarray(w, dtype=float)
        return 2.0 * self.gamma / (w * w + self.gamma**2)

    def describe(self):
        return {"kind": self.kind, "gamma_per_s": self.gamma}


@dataclass(frozen=True)
class TimeCorrelationModel:
    """Separable space-time spectrum ``Omega(k, w) = Omega(k) g(w)``."""

    spatial: CorrelationModel
    temporal: Instantaneous | Lorentzian = Instantaneous()

    @property
    def instantaneous(self) -> bool:
        return isinstance(self.temporal, Instantaneous)

    def describe(self):
        return {"spatial": self.spatial.describe(), "temporal": self.temporal.describe()}


def omega_tilde_time(model: TimeCorrelationModel, k, w):
    """``Omega(k) g(w)``.

    The instantaneous profile is a delta function and has no pointwise value;
    consumers must branch on ``model.instantaneous`` and use
    ``model.spatial`` directly.
    """
    if model.instantaneous:
        raise ValueError("instantaneous correlation is a delta in frequency; "
                         "use model.spatial (the static spectrum) instead")
    return model.spatial(k) * model.temporal(w)


# --- empirical estimation --------------------------------------------------

@dataclass(frozen=True)
class RadialSpectrum:
    k: np.ndarray  # mean |k| of the modes in each bin
    values: np.ndarray  # mean |D(k)|^2 / L^2 per bin
    counts: np.ndarray
    zero_mode: float


def radial_spectrum(grid: np.ndarray, cell: float) -> RadialSpectrum:
    """Radially binned ``|D(k)|^2 / L^2`` of a periodic square field.

    ``D(k) = cell^2 * sum_x D(x) exp(-i k.x)``.  Bins are ``2 pi / L`` wide,
    centred on integer multiples of the fundamental, up to the Nyquist
    radius.
    """
    grid = np.asarray(grid, dtype=float)
    n = grid.shape[0]
    if grid.ndim != 2 or grid.shape[1] != n:
        raise ValueError("patch field must be a square 2-D grid")
    if n < 16:
        raise ValueError(f"patch field grid must be at least 16x16, got {n}x{n}")
    L = n * cell
    dk = 2 * math.pi / L
    dtil = cell * cell * np.fft.fft2(grid)
    power = (np.abs(dtil) ** 2 / (L * L)).ravel()
    idx = np.fft.fftfreq(n, d=1.0 / n)
    kx, ky = np.meshgrid(idx, idx, indexing="ij")
    kmag = (dk * np.hypot(kx, ky)).ravel()
    b = np.rint(kmag / dk).astype(int)
    nb = n // 2
    sel = (b >= 1) & (b <= nb)
    counts = np.bincount(b[sel], minlength=nb + 1)[1:]
    ksum = np.bincount(b[sel], weights=kmag[sel], minlength=nb + 1)[1:]
    psum = np.bincount(b[sel], weights=power[sel], minlength=nb + 1)[1:]
    return RadialSpectrum(ksum / counts, psum / counts, counts, float(power[0]))


def from_patch_field(patch) -> Tabulated:
    """Tabulated spectrum estimated from one patch-field realization.

    ``patch`` needs ``grid`` and ``cell`` attributes.  The k = 0 power is kept
    out of the table (it is reported as ``zero_mode``): a uniform layer does
    not radiate.
    """
    rs = radial_spectrum(patch.grid, patch.cell)
    return Tabulated(rs.k, rs.values, zero_mode=rs.zero_mode)
