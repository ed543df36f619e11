"""Self-validation: every closed form against its independent oracle.

Each check records both numbers, never a bare verdict.  Known mismatches
between printed prefactors and the direct quadrature are recorded with
status ``informational``; they do not fail the run.
"""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field

import numpy as np
from scipy.special import dawsn

from . import __version__
from . import quad
from .correlation import Constant, GaussianQuasilocal, Instantaneous, Lorentzian, SharpCutoff, \
    TimeCorrelationModel
from .ensemble import ensemble_spectrum
from .motion import EnvelopedHarmonic, GaussianPulse, Sampled
from .specfun import dawson
from .spectrum import (
    SHARP_CUTOFF_PREFACTOR,
    SHARP_CUTOFF_PRINTED_PREFACTOR,
    dce_spectral_density,
    f_gaussian,
    gaussian_kernel_closed,
    identify_energy_factor,
    kernel,
    monochromatic_power,
    reaction_force,
    sharp_cutoff_shape,
    spectral_density,
    spectral_density_gaussian_closed,
    spectral_density_sharpcutoff_closed,
    spectral_density_small_l,
    spectral_density_time_dependent,
    sweep_correlation_length,
    total_energy,
    xi_ratio,
    xi_ratio_numeric,
    xi_reference_scale,
)
from .units import C_LIGHT, unit

# pi^3 V^2 l^2 / (2 hbar c) at V = 40 mV, l = 100 nm, evaluated at 40 digits
XI_REFERENCE = 0.8729740528328693288550651887863437430114


@dataclass
class Check:
    name: str
    oracle: float
    value: float
    ratio: float
    tolerance: float
    status: str  # pass | fail | informational
    note: str = ""


@dataclass
class ValidationReport:
    checks: list[Check] = field(default_factory=list)
    discrepancies: list[dict] = field(default_factory=list)
    metadata: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(c.status != "fail" for c in self.checks)

    def add(self, name, oracle, value, tolerance, *, mode="rel", note="", informational=False):
        oracle, value = float(oracle), float(value)
        ratio = value / oracle if oracle != 0 else (1.0 if value == 0 else math.inf)
        if mode == "rel":
            dev = abs(ratio - 1) if oracle != 0 else abs(value)
        elif mode == "abs":
            dev = abs(value - oracle)
        elif mode == "le":  # value must not exceed the tolerance
            dev = value
        else:
            raise ValueError(mode)
        ok = bool(dev <= tolerance)
        status = "informational" if informational else ("pass" if ok else "fail")
        self.checks.append(Check(name, oracle, value, ratio, float(tolerance), status, note))
        return ok

    def to_dict(self) -> dict:
        return {
            "metadata": self.metadata,
            "passed": self.passed,
            "checks": [asdict(c) for c in self.checks],
            "discrepancies": self.discrepancies,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True, allow_nan=True) + "\n"


# --- individual checks -------------------------------------------------------

V_TEST = 1e-3  # statvolt
ELL_TEST = 1e-4  # cm


def check_quadrature(rep: ValidationReport):
    one = lambda k: np.ones_like(k)
    rep.add("quad.sqrt_endpoint_unit", 2 / 15, quad.integrate_sqrt_endpoint(one, 1.0).value, 1e-14)
    rep.add("quad.sqrt_endpoint_a2", 2 / 15 * 32, quad.integrate_sqrt_endpoint(one, 2.0).value,
            1e-14)
    rep.add("quad.semi_infinite_exp", 1.0,
            quad.integrate_semi_infinite(lambda w: np.exp(-w), 1.0).value, 1e-12)
    rep.add("quad.semi_infinite_w6_gauss", 15 / 16 * math.sqrt(math.pi),
            quad.integrate_semi_infinite(lambda w: w**6 * np.exp(-w * w), 1.0).value, 1e-12)


def check_dawson(rep: ValidationReport):
    xs = np.linspace(0.0, 20.0, 501)
    err = float(np.max(np.abs(dawson(xs) - dawsn(xs))))
    rep.add("dawson.vs_cephes_max_abs", 0.0, err, 1e-12, mode="le",
            note="independent library implementation")
    h = 1e-5
    xs = np.linspace(0.05, 15.0, 300)
    fd = (dawson(xs + h) - dawson(xs - h)) / (2 * h)
    worst = float(np.max(np.abs(fd - (1 - 2 * xs * dawson(xs)))))
    rep.add("dawson.ode_identity_fd", 0.0, worst, 1e-8, mode="le")


def check_gaussian_closed(rep: ValidationReport):
    for x in (0.1, 0.5, 1.0, 2.0, 5.0):
        w = 4 * C_LIGHT * x / ELL_TEST
        tr = GaussianPulse(1e-7, 1.0 / w)
        for image in (False, True):
            q = spectral_density(GaussianQuasilocal(V_TEST, ELL_TEST, image), tr, w, 1e-12)
            cf = spectral_density_gaussian_closed(V_TEST, ELL_TEST, tr, w, image)
            rep.add(f"gaussian.closed_vs_quadrature[x={x},image={image}]", q, cf, 1e-8)


def check_small_l(rep: ValidationReport):
    for lw, tol in ((0.1, 1e-2), (0.01, 1e-4)):
        w = lw * C_LIGHT / ELL_TEST
        tr = GaussianPulse(1e-7, 1.0 / w)
        model = GaussianQuasilocal(V_TEST, ELL_TEST)
        small = spectral_density_small_l(model.value_at_zero, tr, w)
        rep.add(f"small_l.limit[l*w/c={lw}]", small, spectral_density(model, tr, w, 1e-12), tol)
    w = 0.3 * C_LIGHT / ELL_TEST
    tr = GaussianPulse(1e-7, 1.0 / w)
    rep.add("small_l.constant_model", spectral_density_small_l(2.5, tr, w),
            spectral_density(Constant(2.5), tr, w, 1e-12), 1e-10)
    rep.add("small_l.pi_over_60",
            math.pi / 60 * V_TEST**2 * ELL_TEST**2 * w**6 * tr.power(w) / C_LIGHT**5,
            spectral_density_small_l(GaussianQuasilocal(V_TEST, ELL_TEST).value_at_zero, tr, w),
            1e-13)


def f_argmax(lo=0.5, hi=3.0, tol=1e-10) -> float:
    g = (math.sqrt(5) - 1) / 2
    a, b = lo, hi
    while b - a > tol:
        c1, c2 = b - g * (b - a), a + g * (b - a)
        if f_gaussian(c1) > f_gaussian(c2):
            b = c2
        else:
            a = c1
    return 0.5 * (a + b)


def check_maximum(rep: ValidationReport):
    xm = f_argmax()
    rep.add("gaussian.f_argmax_in_[1.3,1.7]", 1.5, xm, 0.2, mode="abs")
    w0 = 1e10
    tr = EnvelopedHarmonic(1e-7, w0, 50.0 / w0)
    ells = C_LIGHT / w0 * np.geomspace(1.0, 30.0, 13)
    res = sweep_correlation_length(V_TEST, tr, ells, tol=1e-8)
    star = res.ell_star * w0 / C_LIGHT if res.ell_star else math.nan
    rep.add("sweep.ell_star_in_[5,7]c/w0", 6.0, star, 1.0, mode="abs",
            note="on_boundary" if res.on_boundary else "")


def _sharp_model():
    return 1e-3, 2.0, 20.0  # V_rms, k_min, k_max (1/cm)


def check_sharp_cutoff(rep: ValidationReport):
    V, kmin, kmax = _sharp_model()
    model = SharpCutoff(V, kmin, kmax)
    w_th = kmin * C_LIGHT
    tr = GaussianPulse(1e-7, 1.0 / w_th)
    below = [spectral_density(model, tr, w_th * s) for s in (0.25, 0.9, 1.0)]
    below += [spectral_density_sharpcutoff_closed(V, kmin, kmax, tr, w_th * s)
              for s in (0.25, 0.9, 1.0)]
    rep.add("sharp.threshold_zero", 0.0, max(abs(b) for b in below), 0.0, mode="le")

    eps = np.geomspace(1e-6, 1e-3, 7)
    P = np.array([spectral_density(model, tr, w_th * (1 + e), 1e-13) for e in eps])
    slope = float(np.polyfit(np.log(eps), np.log(P), 1)[0])
    rep.add("sharp.threshold_exponent", 1.5, slope, 0.05)

    ws = C_LIGHT * np.linspace(kmin * 1.05, kmax * 0.95, 9)
    consts = np.array([
        kernel(model, w, 1e-13) * C_LIGHT**5 * (kmax**2 - kmin**2)
        / (V**2 * w**6 * sharp_cutoff_shape(kmin * C_LIGHT / w)) for w in ws
    ])
    rel_spread = float(np.std(consts) / np.mean(consts))
    rep.add("sharp.prefactor_w_independent", 0.0, rel_spread, 1e-9, mode="le")
    fitted = float(np.mean(consts))
    rep.add("sharp.prefactor_bare_4pi/15", SHARP_CUTOFF_PREFACTOR, fitted, 1e-10)
    rep.add("sharp.closed_vs_quadrature", spectral_density(model, tr, ws[4], 1e-13),
            spectral_density_sharpcutoff_closed(V, kmin, kmax, tr, ws[4]), 1e-9)
    rep.add("sharp.printed_prefactor_64pi/15", fitted, SHARP_CUTOFF_PRINTED_PREFACTOR, 0.0,
            informational=True, note="printed prefactor exceeds direct evaluation by 16 "
                                     "(by 4 after the image factor)")
    rep.discrepancies.append({
        "name": "sharp_cutoff_prefactor",
        "printed": SHARP_CUTOFF_PRINTED_PREFACTOR,
        "quadrature_bare": fitted,
        "quadrature_image": 4 * fitted,
        "ratio_printed_to_bare": SHARP_CUTOFF_PRINTED_PREFACTOR / fitted,
    })


def check_dce(rep: ValidationReport):
    V = 0.040 * unit("V").value
    ell = 100 * unit("nm").value
    rep.add("xi.reference_40mV_100nm", XI_REFERENCE, xi_ratio(V, ell), 1e-12)
    rep.add("xi.order_unity", 1.0, xi_ratio(V, ell), 1.0, mode="abs",
            note="within a factor 2 of the (40 mV, 100 nm) normalization")
    rep.add("xi.reference_scale", (0.040 / 299.792458) ** 2 * 1e-10, xi_reference_scale(), 1e-14)
    for w in (1e9, 3e10, 7e11):
        tr = GaussianPulse(1e-7, 1.0 / w)
        num = spectral_density_small_l(GaussianQuasilocal(V, ell).value_at_zero, tr, w) \
            / dce_spectral_density(tr, w)
        rep.add(f"xi.closed_vs_numeric[w={w:g}]", num, xi_ratio(V, ell), 1e-10)
        rep.add(f"xi.kernel_ratio[w={w:g}]", xi_ratio_numeric(V, ell, w), xi_ratio(V, ell), 1e-10)


def check_energy(rep: ValidationReport):
    tr = GaussianPulse(1e-7, 1e-10)
    chk = identify_energy_factor(3.0, tr)
    rep.add("energy.parseval_factor_match", chk.matched_factor or math.nan, chk.fitted_factor,
            1e-6, note="fitted F in U = F Omega(0) int (q''')^2 dt / c^5")
    rep.add("energy.printed_factor_2/15", chk.fitted_factor, chk.printed_factor, 0.0,
            informational=True, note=f"direct integration gives F = {chk.fitted_factor:.12g}")
    rep.discrepancies.append({"name": "energy_factor", **chk.as_dict()})
    u1 = total_energy(GaussianQuasilocal(V_TEST, ELL_TEST), GaussianPulse(1e-7, 1e-14))
    u2 = total_energy(GaussianQuasilocal(V_TEST, ELL_TEST), GaussianPulse(2e-7, 1e-14))
    rep.add("energy.second_order_scaling", 4 * u1, u2, 1e-9)

    # work done against the reaction force equals (2/15) Omega(0) I3 / c^5
    t = np.linspace(-12 * tr.tau, 12 * tr.tau, 4001)
    work = -quad.integrate(lambda s: reaction_force(3.0, tr, s) * tr.derivative(1, s),
                           t[0], t[-1], 1e-12).value
    rep.add("reaction.work_energy", 2 / 15 * 3.0 * tr.jerk_energy(3) / C_LIGHT**5, work, 1e-8)


def check_time_dependent(rep: ValidationReport):
    tau = 1e-10
    tr = GaussianPulse(1e-7, tau)
    w = math.sqrt(3) / tau
    spatial = GaussianQuasilocal(V_TEST, ELL_TEST)
    static = spectral_density(spatial, tr, w)
    inst = spectral_density_time_dependent(TimeCorrelationModel(spatial, Instantaneous()), tr, w)
    rep.add("time.instantaneous_exact", static, inst, 0.0)
    lor = spectral_density_time_dependent(TimeCorrelationModel(spatial, Lorentzian(1e-3 / tau)),
                                          tr, w)
    rep.add("time.lorentzian_reduction", static, lor, 1e-2)


def check_monochromatic(rep: ValidationReport):
    w0 = 3e10
    tau = 50.0 / w0
    tr = EnvelopedHarmonic(1e-7, w0, tau)
    model = GaussianQuasilocal(V_TEST, C_LIGHT / w0)
    u = total_energy(model, tr, 1e-10)
    rep.add("monochromatic.windowed_parseval", monochromatic_power(model, w0, 1e-7),
            u / (math.sqrt(math.pi) * tau), 2e-2)
    sharp = SharpCutoff(V_TEST, 2 * w0 / C_LIGHT, 4 * w0 / C_LIGHT)
    rep.add("monochromatic.below_threshold", 0.0, monochromatic_power(sharp, w0, 1e-7), 0.0,
            mode="le")


def check_properties(rep: ValidationReport, cases: int = 200, seed: int = 20240601):
    rng = np.random.default_rng(seed)
    neg = 0
    for _ in range(cases):
        ell = 10 ** rng.uniform(-6, -2)
        w = 10 ** rng.uniform(8, 13)
        kind = rng.integers(3)
        if kind == 0:
            model = GaussianQuasilocal(10 ** rng.uniform(-5, -2), ell, bool(rng.integers(2)))
        elif kind == 1:
            kmin = 10 ** rng.uniform(-1, 3)
            model = SharpCutoff(10 ** rng.uniform(-5, -2), kmin, kmin * 10 ** rng.uniform(0.1, 2))
        else:
            model = Constant(10 ** rng.uniform(-12, -6))
        tr = EnvelopedHarmonic(10 ** rng.uniform(-8, -5), w * rng.uniform(0.5, 1.5),
                               rng.uniform(5, 50) / w)
        if spectral_density(model, tr, w) < 0:
            neg += 1
    rep.add("property.P_nonnegative_violations", 0.0, float(neg), 0.0, mode="le",
            note=f"{cases} random model/trajectory pairs")

    model = GaussianQuasilocal(V_TEST, ELL_TEST)
    w = C_LIGHT / ELL_TEST
    scaled = [spectral_density(model, GaussianPulse(q0, 1 / w), w) / q0**2
              for q0 in (1e-9, 1e-7, 1e-5)]
    rep.add("property.P_over_q0sq_invariance", scaled[0], max(scaled), 1e-13)

    a = spectral_density(model, GaussianPulse(1e-7, 1 / w), w)
    b = spectral_density(model, EnvelopedHarmonic(3e-7, 0.8 * w, 7 / w), w)
    ka = a / GaussianPulse(1e-7, 1 / w).power(w)
    kb = b / EnvelopedHarmonic(3e-7, 0.8 * w, 7 / w).power(w)
    rep.add("property.kernel_trajectory_independent", ka, kb, 1e-10)

    for tr in (GaussianPulse(1.3, 0.7), EnvelopedHarmonic(0.9, 5.0, 1.1)):
        freq = quad.integrate(lambda x: tr.power(x) / (2 * math.pi), -60, 60, 1e-13).value
        time = quad.integrate(lambda x: tr.position(x) ** 2, -40, 40, 1e-13).value
        rep.add(f"property.parseval[{tr.kind}]", time, freq, 1e-8)

    t = np.linspace(-20, 20, 4001)
    g = GaussianPulse(1.0, 1.0)
    s = Sampled(t, g.position(t), window="tukey")
    ws = np.linspace(-5, 5, 41)
    rep.add("property.sampled_vs_analytic_ft", 0.0,
            float(np.max(np.abs(s.fourier_transform(ws) - g.fourier_transform(ws))
                         / np.abs(g.fourier_transform(ws)))), 1e-6, mode="le")


def check_ensemble(rep: ValidationReport, realizations: int = 200, N: int = 256,
                   seed: int = 1234):
    ell = ELL_TEST
    target = GaussianQuasilocal(V_TEST, ell)
    w0 = 4 * C_LIGHT / ell
    tr = GaussianPulse(1e-7, 1 / w0)
    ws = np.array([0.5, 1.0, 2.0]) * w0
    res = ensemble_spectrum(target, tr, ws, realizations, seed, N, ell / 4)
    well = res.radial_counts >= 50
    dev = np.abs(res.mean_radial[well] / target(res.radial_k[well]) - 1)
    rep.add("ensemble.radial_bins_max_rel_dev", 0.0, float(dev.max()), 0.05, mode="le",
            note=f"{int(well.sum())} bins with >= 50 modes, {realizations} realizations, "
                 f"{N}^2 grid")
    for w, p in zip(ws, res.spectrum.P):
        rep.add(f"ensemble.mean_P[w/w0={w / w0:g}]", gaussian_kernel_closed(V_TEST, ell, w)
                * tr.power(w), p, 0.10)


ALL_CHECKS = (
    check_quadrature,
    check_dawson,
    check_gaussian_closed,
    check_small_l,
    check_maximum,
    check_sharp_cutoff,
    check_dce,
    check_energy,
    check_time_dependent,
    check_monochromatic,
    check_properties,
)


def run_validation(seed: int = 1234, ensemble_realizations: int = 200, ensemble_N: int = 256,
                   metadata: dict | None = None) -> ValidationReport:
    rep = ValidationReport(metadata={"tool": "patchrad", "version": __version__,
                                     "unit_system": "gaussian-cgs", **(metadata or {})})
    for check in ALL_CHECKS:
        check(rep)
    check_ensemble(rep, ensemble_realizations, ensemble_N, seed)
    return rep
