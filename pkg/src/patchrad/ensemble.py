"""Random patch fields with a prescribed correlation spectrum.

Fields are synthesized mode by mode: every independent Fourier mode gets a
complex Gaussian amplitude with variance ``L^2 Omega(|k|)`` (the convention of
:func:`patchrad.correlation.radial_spectrum`), conjugate partners are filled
in for a real field, and the k = 0 mode is zeroed.

Random numbers come from Philox4x64-10 keyed by ``(seed, stream)``.  Mode
``m`` (its flat index in the N x N FFT grid) reads counter block ``m`` and
turns two of its 64-bit lanes into a normal pair by Box-Muller, so every
mode's draw is a pure function of ``(seed, stream, m)``.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .correlation import CorrelationModel, from_patch_field, radial_spectrum
from .motion import Trajectory
from .spectrum import SpectrumResult, kernel, parallel_map

RNG_ALGORITHM = "philox4x64-10/box-muller, counter block = flat mode index"
_U53 = 2.0**-53


@dataclass(frozen=True, eq=False)
class PatchField:
    grid: np.ndarray
    cell: float
    seed: int
    target: dict
    stream: int = 0

    def __post_init__(self):
        n = self.grid.shape[0]
        if self.grid.shape != (n, n) or n < 16 or n & (n - 1):
            raise ValueError("patch field must be N x N with N a power of two >= 16")

    @property
    def N(self) -> int:
        return self.grid.shape[0]

    @property
    def L(self) -> float:
        return self.N * self.cell

    def sidecar(self) -> dict:
        return {"N": self.N, "cell_cm": self.cell, "L_cm": self.L, "seed": self.seed,
                "stream": self.stream, "target": self.target, "dtype": "<f8",
                "order": "C", "rng": RNG_ALGORITHM}

    def save(self, path) -> tuple[Path, Path]:
        """Write ``path`` (raw little-endian float64, row-major) and ``path.json``."""
        path = Path(path)
        path.write_bytes(np.ascontiguousarray(self.grid, dtype="<f8").tobytes())
        side = path.with_name(path.name + ".json")
        side.write_text(json.dumps(self.sidecar(), indent=2, sort_keys=True) + "\n")
        return path, side

    @classmethod
    def load(cls, path) -> PatchField:
        path = Path(path)
        meta = json.loads(path.with_name(path.name + ".json").read_text())
        n = int(meta["N"])
        grid = np.frombuffer(path.read_bytes(), dtype="<f8").reshape(n, n).astype(float)
        return cls(grid, float(meta["cell_cm"]), int(meta["seed"]), meta["target"],
                   int(meta.get("stream", 0)))


def mode_normals(seed: int, stream: int, start: int, count: int) -> np.ndarray:
    """Standard normal pairs for modes ``start .. start+count-1``, shape (count, 2)."""
    bg = np.random.Philox(key=[seed & 0xFFFFFFFFFFFFFFFF, stream & 0xFFFFFFFFFFFFFFFF])
    if start:
        bg.advance(start)
    raw = bg.random_raw(4 * count).reshape(count, 4)[:, :2]
    u = ((raw >> np.uint64(11)).astype(float) + 0.5) * _U53
    r = np.sqrt(-2.0 * np.log(u[:, 0]))
    phase = 2 * math.pi * u[:, 1]
    return np.column_stack([r * np.cos(phase), r * np.sin(phase)])


def _kgrid(n: int, cell: float) -> np.ndarray:
    dk = 2 * math.pi / (n * cell)
    idx = np.fft.fftfreq(n, d=1.0 / n)
    kx, ky = np.meshgrid(idx, idx, indexing="ij")
    return dk * np.hypot(kx, ky)


def generate(target: CorrelationModel, N: int, cell: float, seed: int, stream: int = 0
             ) -> PatchField:
    """One periodic N x N realization with expected spectrum ``target``."""
    if N < 16 or N & (N - 1):
        raise ValueError(f"N must be a power of two >= 16, got {N}")
    if not cell > 0:
        raise ValueError("cell must be > 0")
    L = N * cell
    S = L * L * np.asarray(target(_kgrid(N, cell)), dtype=float)
    if not np.all(np.isfinite(S)):
        raise ValueError("target spectrum is not finite on the grid's k range")

    flat = np.arange(N * N)
    i, j = np.divmod(flat, N)
    conj = ((-i) % N) * N + ((-j) % N)
    z = mode_normals(seed, stream, 0, N * N)

    Sf = S.ravel()
    amp = np.where(
        flat == conj,
        np.sqrt(Sf) * z[:, 0],
        np.sqrt(0.5 * Sf) * (z[:, 0] + 1j * z[:, 1]),
    ).astype(complex)
    canonical = flat <= conj
    dtil = np.empty(N * N, dtype=complex)
    dtil[canonical] = amp[canonical]
    dtil[~canonical] = np.conj(amp[conj[~canonical]])
    dtil[0] = 0.0

    grid = np.fft.ifft2(dtil.reshape(N, N)).real / (cell * cell)
    return PatchField(grid, float(cell), int(seed), target.describe(), int(stream))


@dataclass
class EnsembleResult:
    spectrum: SpectrumResult  # mean over realizations
    stderr: np.ndarray  # standard error of the mean P
    realizations: int
    mean_radial: np.ndarray  # ensemble-mean empirical Omega per radial bin
    radial_k: np.ndarray
    radial_counts: np.ndarray


def ensemble_spectrum(target: CorrelationModel, traj: Trajectory, omega_grid, realizations: int,
                      seed: int, N: int = 256, cell: float | None = None,
                      rel_tol: float = 1e-8) -> EnsembleResult:
    """Mean spectral density over independent patch-field realizations.

    Each realization goes field -> empirical tabulated spectrum -> direct
    quadrature.  Realization ``r`` uses RNG stream ``r``.
    """
    if realizations < 2:
        raise ValueError("need at least 2 realizations")
    if cell is None:
        raise ValueError("cell size is required")
    omega = np.asarray(omega_grid, dtype=float)
    q2 = np.asarray(traj.power(omega), dtype=float)

    def one(r):
        field = generate(target, N, cell, seed, stream=r)
        rs = radial_spectrum(field.grid, field.cell)
        model = from_patch_field(field)
        K = np.array([kernel(model, w, rel_tol) for w in omega])
        return K, rs

    out = parallel_map(one, range(realizations))
    Ks = np.array([o[0] for o in out])
    radial = np.array([o[1].values for o in out])
    P = Ks * q2
    mean_P = P.mean(axis=0)
    stderr = P.std(axis=0, ddof=1) / math.sqrt(realizations)
    rs0 = out[0][1]
    meta = {
        "model": target.describe(),
        "trajectory": traj.describe(),
        "image_factor": bool(target.image),
        "quadrature": {"rel_tol": rel_tol},
        "unit_system": "gaussian-cgs",
        "ensemble": {"realizations": realizations, "seed": seed, "N": N, "cell_cm": cell,
                     "rng": RNG_ALGORITHM},
    }
    result = SpectrumResult(omega, mean_P, Ks.mean(axis=0), None, meta)
    return EnsembleResult(result, stderr, realizations, radial.mean(axis=0), rs0.k, rs0.counts)
