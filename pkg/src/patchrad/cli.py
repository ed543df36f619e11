"""Command-line front end.

    patchrad spectrum    --config run.json --out results/
    patchrad energy      --config run.json
    patchrad compare-dce --config run.json --out results/
    patchrad xi          --config run.json
    patchrad sweep       --config run.json --out results/
    patchrad ensemble    --config run.json --out results/ --seed 7
    patchrad validate    [--config run.json] --out results/
    patchrad describe    spectrum

Exit codes: 0 ok, 1 validation failure, 2 bad config, 3 numerical failure,
4 I/O failure.  Errors are also written to stderr as one JSON object.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from pathlib import Path

import numpy as np
from pydantic import ValidationError

from . import __version__
from . import config as cfgmod
from .config import RunConfig
from .correlation import GaussianQuasilocal
from .ensemble import ensemble_spectrum
from .quad import QuadratureError
from .spectrum import (
    C_LIGHT,
    ENERGY_FACTOR_CANDIDATES,
    compute_spectrum,
    energy_integral,
    spectral_density_time_dependent,
    sweep_correlation_length,
    xi_ratio,
    xi_reference_scale,
)
from .units import convert
from .validation import run_validation

EXIT_OK, EXIT_FAILED, EXIT_SCHEMA, EXIT_NUMERIC, EXIT_IO = 0, 1, 2, 3, 4
SUBCOMMANDS = ("spectrum", "energy", "compare-dce", "xi", "sweep", "ensemble", "validate")


class CliError(Exception):
    def __init__(self, kind: str, code: int, message: str, field: str | None = None):
        super().__init__(message)
        self.kind, self.code, self.field = kind, code, field


def _fmt(x: float) -> str:
    return f"{float(x):.17g}"


def _provenance(cfg: RunConfig) -> dict:
    return {"tool": "patchrad", "version": __version__, "config_sha256": cfg.digest(),
            "unit_system": "si" if cfg.units == "si" else "gaussian-cgs"}


def _write_csv(path: Path, cfg: RunConfig, header: list[str], rows) -> None:
    buf = io.StringIO()
    for k, v in _provenance(cfg).items():
        buf.write(f"# {k}: {v}\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([_fmt(x) for x in row])
    path.write_text(buf.getvalue())


def _write_json(path: Path, cfg: RunConfig, payload: dict) -> None:
    doc = {"provenance": _provenance(cfg), "config": cfg.model_dump(mode="json", by_alias=True),
           **payload}
    path.write_text(json.dumps(_jsonable(doc), indent=2, sort_keys=True) + "\n")


def _jsonable(x):
    if isinstance(x, dict):
        return {k: _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, np.ndarray):
        return [_jsonable(v) for v in x.tolist()]
    if isinstance(x, (np.floating, float)):
        return float(x) if math.isfinite(x) else str(x)
    if isinstance(x, np.integer):
        return int(x)
    return x


def _outdir(cfg: RunConfig, args) -> Path:
    d = Path(args.out or cfg.output.dir)
    d.mkdir(parents=True, exist_ok=True)
    return d


def _stem(cfg: RunConfig, default: str) -> str:
    return cfg.output.stem or default


# SI conversion factors for spectrum columns
_ERG_J = convert(1.0, "erg", "J")
_CM_M = convert(1.0, "cm", "m")
P_TO_SI = _ERG_J / _CM_M**2  # erg s/cm^2 -> J s/m^2
K_TO_SI = _ERG_J / _CM_M**4  # erg/(cm^4 s) -> J/(m^4 s)
U_TO_SI = _ERG_J / _CM_M**2  # erg/cm^2 -> J/m^2


def spectrum_columns(units: str, with_dce: bool) -> list[str]:
    if units == "si":
        cols = ["omega_rad_per_s", "P_J_s_per_m2", "K_J_per_m4_s"]
    else:
        cols = ["omega_rad_per_s", "P_erg_s_per_cm2", "K_erg_per_cm4_s"]
    return cols + (["P_over_PDCE"] if with_dce else [])


def _spectrum(cfg: RunConfig, args, with_dce: bool) -> int:
    traj = cfg.trajectory.build()
    model = cfg.correlation.build()
    omega = cfg.omega_grid.values()
    tol = cfg.tolerance.rel
    res = compute_spectrum(model, traj, omega, tol, include_dce=with_dce)
    tmodel = cfg.temporal_model(model)
    if not tmodel.instantaneous:
        res.P = np.array([spectral_density_time_dependent(tmodel, traj, w, tol) if w > 0 else 0.0
                          for w in omega])
        res.metadata["temporal"] = tmodel.temporal.describe()
    sP, sK = (P_TO_SI, K_TO_SI) if cfg.units == "si" else (1.0, 1.0)
    cols = [res.omega, res.P * sP, res.K * sK]
    if with_dce:
        cols.append(res.P_over_PDCE)
    out = _outdir(cfg, args)
    stem = _stem(cfg, "compare_dce" if with_dce else "spectrum")
    _write_csv(out / f"{stem}.csv", cfg, spectrum_columns(cfg.units, with_dce), zip(*cols))
    payload = {"metadata": res.metadata,
               "columns": spectrum_columns(cfg.units, with_dce),
               "data": [list(r) for r in zip(*cols)]}
    if with_dce and isinstance(model, GaussianQuasilocal):
        payload["xi"] = xi_ratio(model.V_rms, model.ell)
    _write_json(out / f"{stem}.json", cfg, payload)
    print(f"wrote {out / stem}.csv and .json ({len(omega)} frequencies)")
    return EXIT_OK


def cmd_spectrum(cfg, args):
    return _spectrum(cfg, args, with_dce=False)


def cmd_compare_dce(cfg, args):
    return _spectrum(cfg, args, with_dce=True)


def cmd_energy(cfg, args):
    traj = cfg.trajectory.build()
    model = cfg.correlation.build()
    r = energy_integral(model, traj, cfg.tolerance.rel)
    scale = U_TO_SI if cfg.units == "si" else 1.0
    unit = "J_per_m2" if cfg.units == "si" else "erg_per_cm2"
    payload = {"total_energy": {f"value_{unit}": r.value * scale,
                                f"error_estimate_{unit}": r.error_estimate * scale,
                                "evaluations": r.evaluations},
               "model": model.describe(), "trajectory": traj.describe()}
    try:
        i3 = traj.jerk_energy(3)
    except ValueError:
        i3 = None
    if i3 is not None:
        om0 = model.value_at_zero
        payload["short_correlation_estimates"] = {
            "jerk_integral_cm2_per_s5": i3,
            "omega_tilde0_erg_cm": om0,
            **{f"F={f:.10g}_{unit}": f * om0 * i3 / C_LIGHT**5 * scale
               for f in ENERGY_FACTOR_CANDIDATES},
        }
    out = _outdir(cfg, args)
    _write_json(out / f"{_stem(cfg, 'energy')}.json", cfg, payload)
    print(f"U_rad = {_fmt(r.value * scale)} {unit.replace('_per_', '/')} "
          f"(+- {r.error_estimate * scale:.3g})")
    return EXIT_OK


def cmd_xi(cfg, args):
    if cfg.xi is not None:
        V = cfgmod.gaussian_potential(cfg.xi.V_rms, "xi.V_rms")
        ell = cfgmod.gaussian_length(cfg.xi.ell, "xi.ell")
    else:
        model = cfg.correlation.build()
        V, ell = model.V_rms, model.ell
    xi = xi_ratio(V, ell)
    normalized = V * V * ell * ell / xi_reference_scale()
    print(f"xi = {_fmt(xi)}")
    print(f"V^2/(40 mV)^2 * l^2/(100 nm)^2 = {_fmt(normalized)}")
    if args.out:
        _write_json(_outdir(cfg, args) / f"{_stem(cfg, 'xi')}.json", cfg,
                    {"xi": xi, "normalized_40mV_100nm": normalized,
                     "V_rms_statvolt": V, "ell_cm": ell})
    return EXIT_OK


def cmd_sweep(cfg, args):
    traj = cfg.trajectory.build()
    model = cfg.correlation.build()
    if not isinstance(model, GaussianQuasilocal):
        raise CliError("schema", EXIT_SCHEMA, "sweep requires a gaussian correlation model",
                       "correlation.kind")
    lo = cfgmod.gaussian_length(cfg.sweep.ell_min, "sweep.ell_min")
    hi = cfgmod.gaussian_length(cfg.sweep.ell_max, "sweep.ell_max")
    if not 0 < lo < hi:
        raise CliError("schema", EXIT_SCHEMA, "need 0 < ell_min < ell_max", "sweep.ell_max")
    res = sweep_correlation_length(model.V_rms, traj, np.geomspace(lo, hi, cfg.sweep.count),
                                   cfg.tolerance.rel, model.image)
    scale = U_TO_SI if cfg.units == "si" else 1.0
    ucol = "U_J_per_m2" if cfg.units == "si" else "U_erg_per_cm2"
    out = _outdir(cfg, args)
    stem = _stem(cfg, "sweep")
    _write_csv(out / f"{stem}.csv", cfg, ["ell_cm", ucol], zip(res.ell, res.energy * scale))
    _write_json(out / f"{stem}.json", cfg, {
        "ell_star_cm": res.ell_star, "on_boundary": res.on_boundary,
        "energy_star": None if res.energy_star is None else res.energy_star * scale,
        "table": {"ell_cm": res.ell, ucol: res.energy * scale}})
    if res.on_boundary:
        raise CliError("numerical", EXIT_NUMERIC,
                       "maximum of U_rad(ell) lies on the boundary of the swept range",
                       "sweep")
    print(f"ell* = {_fmt(res.ell_star)} cm")
    return EXIT_OK


def cmd_ensemble(cfg, args):
    traj = cfg.trajectory.build()
    model = cfg.correlation.build()
    e = cfg.ensemble
    cell = cfgmod.gaussian_length(e.cell, "ensemble.cell")
    res = ensemble_spectrum(model, traj, cfg.omega_grid.values(), e.realizations, cfg.seed,
                            e.N, cell, min(cfg.tolerance.rel, 1e-8))
    sP, sK = (P_TO_SI, K_TO_SI) if cfg.units == "si" else (1.0, 1.0)
    cols = spectrum_columns(cfg.units, False)
    cols.insert(2, cols[1] + "_stderr")
    s = res.spectrum
    rows = list(zip(s.omega, s.P * sP, res.stderr * sP, s.K * sK))
    out = _outdir(cfg, args)
    stem = _stem(cfg, "ensemble")
    _write_csv(out / f"{stem}.csv", cfg, cols, rows)
    _write_json(out / f"{stem}.json", cfg, {
        "metadata": s.metadata, "columns": cols, "data": [list(r) for r in rows],
        "radial": {"k_per_cm": res.radial_k, "mean_omega_tilde_erg_cm": res.mean_radial,
                   "modes": res.radial_counts}})
    print(f"wrote {out / stem}.csv and .json ({e.realizations} realizations)")
    return EXIT_OK


def cmd_validate(cfg, args):
    v = cfg.validate_ or cfgmod.ValidateConfig()
    rep = run_validation(cfg.seed, v.ensemble_realizations, v.ensemble_N,
                         metadata={"config_sha256": cfg.digest()})
    out = _outdir(cfg, args)
    path = out / f"{_stem(cfg, 'validation_report')}.json"
    path.write_text(rep.to_json())
    for c in rep.checks:
        print(f"{c.status.upper():13s} {c.name}: value={c.value:.10g} oracle={c.oracle:.10g} "
              f"tol={c.tolerance:g}")
    print(f"report: {path}")
    return EXIT_OK if rep.passed else EXIT_FAILED


COMMANDS = {
    "spectrum": cmd_spectrum,
    "energy": cmd_energy,
    "compare-dce": cmd_compare_dce,
    "xi": cmd_xi,
    "sweep": cmd_sweep,
    "ensemble": cmd_ensemble,
    "validate": cmd_validate,
}


def load_config(args) -> RunConfig:
    raw: dict = {}
    if args.config:
        try:
            raw = json.loads(Path(args.config).read_text())
        except OSError as exc:
            raise CliError("io", EXIT_IO, f"cannot read config: {exc}", "--config") from exc
        except json.JSONDecodeError as exc:
            raise CliError("schema", EXIT_SCHEMA, f"config is not valid JSON: {exc}",
                           "--config") from exc
        if not isinstance(raw, dict):
            raise CliError("schema", EXIT_SCHEMA, "config must be a JSON object", "--config")
    if args.seed is not None:
        raw["seed"] = args.seed
    if args.tol is not None:
        raw.setdefault("tolerance", {})["rel"] = args.tol
    if args.units is not None:
        raw["units"] = args.units
    try:
        return RunConfig.model_validate(raw)
    except ValidationError as exc:
        errs = exc.errors()
        # for number-or-{value,unit} fields prefer the structured branch's message
        # when the input was an object
        err = errs[0]
        if isinstance(err.get("input"), dict) and err["loc"][-1:] == ("float",):
            err = next((e for e in errs if e["loc"][-1:] != ("float",)), err)
        field = ".".join(str(p) for p in err["loc"])
        raise CliError("schema", EXIT_SCHEMA, err["msg"], field) from exc


def _common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="JSON run configuration")
    p.add_argument("--out", help="output directory (overrides output.dir)")
    p.add_argument("--seed", type=int, help="RNG seed (unsigned 64-bit)")
    p.add_argument("--tol", type=float, help="relative quadrature tolerance")
    p.add_argument("--units", choices=("si", "gauss"), help="units of output columns")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="patchrad", description=__doc__.split("\n")[0])
    parser.add_argument("--version", action="version", version=f"patchrad {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in SUBCOMMANDS:
        _common(sub.add_parser(name, help=f"run the {name} computation"))
    d = sub.add_parser("describe", help="print the config schema for a subcommand")
    d.add_argument("subcommand")
    return parser


def _fail(err: CliError) -> int:
    doc = {"error": {"type": err.kind, "message": str(err), "field": err.field,
                     "exit_code": err.code}}
    print(json.dumps(doc, sort_keys=True), file=sys.stderr)
    return err.code


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        if args.command == "describe":
            if args.subcommand not in SUBCOMMANDS:
                raise CliError("schema", EXIT_SCHEMA,
                               f"unknown subcommand {args.subcommand!r}", "subcommand")
            print(json.dumps(cfgmod.schema(args.subcommand), indent=2, sort_keys=True))
            return EXIT_OK
        cfg = load_config(args)
        try:
            cfgmod.require(cfg, args.command)
        except cfgmod.MissingSection as exc:
            raise CliError("schema", EXIT_SCHEMA, str(exc), exc.field) from exc
        try:
            return COMMANDS[args.command](cfg, args)
        except QuadratureError as exc:
            raise CliError("numerical", EXIT_NUMERIC, str(exc)) from exc
        except OSError as exc:
            raise CliError("io", EXIT_IO, str(exc)) from exc
        except ValueError as exc:
            raise CliError("schema", EXIT_SCHEMA, str(exc), getattr(exc, "field", None)) from exc
    except CliError as err:
        return _fail(err)


if __name__ == "__main__":
    sys.exit(main())
