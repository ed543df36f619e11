import math

import numpy as np
import pytest

from patchrad.correlation import Constant, GaussianQuasilocal, radial_spectrum
from patchrad.ensemble import PatchField, ensemble_spectrum, generate, mode_normals
from patchrad.motion import GaussianPulse
from patchrad.units import C_LIGHT

V, ELL = 1e-3, 1e-4
TARGET = GaussianQuasilocal(V, ELL)


def test_same_seed_bit_identical():
    a = generate(TARGET, 64, ELL / 4, seed=7)
    b = generate(TARGET, 64, ELL / 4, seed=7)
    assert np.array_equal(a.grid, b.grid)
    c = generate(TARGET, 64, ELL / 4, seed=8)
    assert not np.array_equal(a.grid, c.grid)
    d = generate(TARGET, 64, ELL / 4, seed=7, stream=1)
    assert not np.array_equal(a.grid, d.grid)


def test_zero_target_zero_field():
    f = generate(Constant(0.0), 32, 1.0, seed=1)
    assert np.all(f.grid == 0.0)


def test_mode_normals_chunk_independent():
    full = mode_normals(3, 5, 0, 100)
    part = np.vstack([mode_normals(3, 5, 0, 37), mode_normals(3, 5, 37, 63)])
    assert np.array_equal(full, part)


def test_mode_normals_statistics():
    z = mode_normals(11, 0, 0, 200_000)
    assert abs(z.mean()) < 0.01
    assert z.std() == pytest.approx(1.0, abs=0.01)


def test_zero_mean_and_real():
    f = generate(TARGET, 64, ELL / 4, seed=2)
    assert f.grid.dtype == np.float64
    assert abs(f.grid.mean()) <= 1e-12 * np.abs(f.grid).max()


def test_single_realization_mode_variance():
    # mean |D~|^2 / L^2 over many modes approximates the target level
    f = generate(Constant(2.0), 128, 0.1, seed=4)
    rs = radial_spectrum(f.grid, f.cell)
    w = rs.counts
    assert np.sum(rs.values * w) / np.sum(w) == pytest.approx(2.0, rel=0.02)


def test_invalid_inputs():
    with pytest.raises(ValueError):
        generate(TARGET, 48, 1.0, seed=0)
    with pytest.raises(ValueError):
        generate(TARGET, 8, 1.0, seed=0)
    with pytest.raises(ValueError):
        generate(TARGET, 32, 0.0, seed=0)
    with pytest.raises(ValueError):
        PatchField(np.zeros((16, 32)), 1.0, 0, {})


def test_save_load_round_trip(tmp_path):
    f = generate(TARGET, 32, ELL / 4, seed=9, stream=2)
    raw, side = f.save(tmp_path / "field.bin")
    assert raw.stat().st_size == 32 * 32 * 8
    g = PatchField.load(tmp_path / "field.bin")
    assert np.array_equal(g.grid, f.grid)
    assert (g.cell, g.seed, g.stream, g.target) == (f.cell, f.seed, f.stream, f.target)


def _pulse():
    w0 = 4 * C_LIGHT / ELL
    return GaussianPulse(1e-7, 1 / w0), np.array([0.5, 1.0, 2.0]) * w0


def test_stderr_shrinks():
    tr, ws = _pulse()
    small = ensemble_spectrum(TARGET, tr, ws, 8, seed=1, N=32, cell=ELL / 4)
    big = ensemble_spectrum(TARGET, tr, ws, 32, seed=1, N=32, cell=ELL / 4)
    ratio = small.stderr / big.stderr
    # expected 2 for a 4x increase; loose band for sampling noise in the std itself
    assert np.all((ratio > 1.2) & (ratio < 3.5))


def test_zero_target_zero_spectrum():
    tr, ws = _pulse()
    res = ensemble_spectrum(Constant(0.0), tr, ws, 2, seed=1, N=16, cell=ELL / 4)
    assert np.all(res.spectrum.P == 0)
    assert np.all(res.stderr == 0)


def test_ensemble_requires_two():
    tr, ws = _pulse()
    with pytest.raises(ValueError):
        ensemble_spectrum(TARGET, tr, ws, 1, seed=1, N=16, cell=ELL / 4)


def test_ensemble_deterministic():
    tr, ws = _pulse()
    a = ensemble_spectrum(TARGET, tr, ws, 3, seed=5, N=32, cell=ELL / 4)
    b = ensemble_spectrum(TARGET, tr, ws, 3, seed=5, N=32, cell=ELL / 4)
    assert np.array_equal(a.spectrum.P, b.spectrum.P)
    assert np.array_equal(a.mean_radial, b.mean_radial)


def test_moderate_round_trip():
    res = ensemble_spectrum(TARGET, *_pulse(), 40, seed=3, N=64, cell=ELL / 4)
    well = res.radial_counts >= 50
    dev = np.abs(res.mean_radial[well] / TARGET(res.radial_k[well]) - 1)
    # 40 realizations x >= 50 modes: relative sd per bin <= 1/sqrt(2000) ~ 2.2 %
    assert dev.max() < 0.12
