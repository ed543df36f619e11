import json
from pathlib import Path

import pytest

from patchrad import __version__
from patchrad.cli import main
from patchrad.config import RunConfig

CONFIGS = Path(__file__).resolve().parents[1] / "configs"

SPECTRUM_CFG = {
    "trajectory": {"kind": "gaussian_pulse", "q0": {"value": 10, "unit": "nm"}, "tau": 1e-10},
    "correlation": {"kind": "gaussian", "V_rms": {"value": 0.04, "unit": "V"},
                    "ell": {"value": 100, "unit": "nm"}},
    "omega_grid": {"min": 1e9, "max": 1e11, "count": 5, "spacing": "log"},
}


def write(tmp_path, cfg, name="cfg.json"):
    p = tmp_path / name
    p.write_text(json.dumps(cfg))
    return str(p)


def run(argv, capsys):
    code = main(argv)
    out, err = capsys.readouterr()
    return code, out, err


def error_doc(err):
    return json.loads(err.strip().splitlines()[-1])["error"]


def read_csv(path):
    lines = Path(path).read_text().splitlines()
    comments = [l for l in lines if l.startswith("#")]
    body = [l for l in lines if not l.startswith("#")]
    return comments, body[0].split(","), [list(map(float, l.split(","))) for l in body[1:]]


def test_spectrum_outputs(tmp_path, capsys):
    cfg = write(tmp_path, SPECTRUM_CFG)
    code, out, _ = run(["spectrum", "--config", cfg, "--out", str(tmp_path / "o")], capsys)
    assert code == 0
    comments, header, rows = read_csv(tmp_path / "o" / "spectrum.csv")
    assert header == ["omega_rad_per_s", "P_erg_s_per_cm2", "K_erg_per_cm4_s"]
    assert len(rows) == 5
    text = "\n".join(comments)
    assert __version__ in text and "config_sha256" in text and "gaussian-cgs" in text
    doc = json.loads((tmp_path / "o" / "spectrum.json").read_text())
    assert doc["provenance"]["version"] == __version__
    assert doc["metadata"]["image_factor"] is False
    for omega, P, K in rows:
        assert P >= 0


def test_csv_seventeen_digits(tmp_path, capsys):
    cfg = write(tmp_path, SPECTRUM_CFG)
    run(["spectrum", "--config", cfg, "--out", str(tmp_path)], capsys)
    _, _, rows = read_csv(tmp_path / "spectrum.csv")
    doc = json.loads((tmp_path / "spectrum.json").read_text())
    assert [r[1] for r in rows] == [r[1] for r in doc["data"]]


def test_compare_dce_column(tmp_path, capsys):
    cfg = write(tmp_path, SPECTRUM_CFG)
    code, _, _ = run(["compare-dce", "--config", cfg, "--out", str(tmp_path)], capsys)
    assert code == 0
    _, header, rows = read_csv(tmp_path / "compare_dce.csv")
    assert header[-1] == "P_over_PDCE"
    doc = json.loads((tmp_path / "compare_dce.json").read_text())
    assert doc["xi"] == pytest.approx(0.8729740528328693, rel=1e-12)


def test_si_units(tmp_path, capsys):
    cfg = write(tmp_path, SPECTRUM_CFG)
    run(["spectrum", "--config", cfg, "--out", str(tmp_path / "g")], capsys)
    run(["spectrum", "--config", cfg, "--out", str(tmp_path / "s"), "--units", "si"], capsys)
    _, hg, g = read_csv(tmp_path / "g" / "spectrum.csv")
    _, hs, s = read_csv(tmp_path / "s" / "spectrum.csv")
    assert hs == ["omega_rad_per_s", "P_J_s_per_m2", "K_J_per_m4_s"]
    for rg, rs in zip(g, s):
        assert rs[0] == rg[0]
        assert rs[1] == pytest.approx(rg[1] * 1e-7 / 1e-4, rel=1e-14)
        assert rs[2] == pytest.approx(rg[2] * 1e-7 / 1e-8, rel=1e-14)


def test_energy(tmp_path, capsys):
    cfg = write(tmp_path, SPECTRUM_CFG)
    code, out, _ = run(["energy", "--config", cfg, "--out", str(tmp_path)], capsys)
    assert code == 0 and out.startswith("U_rad = ")
    doc = json.loads((tmp_path / "energy.json").read_text())
    assert doc["total_energy"]["value_erg_per_cm2"] > 0
    assert "short_correlation_estimates" in doc


def test_xi_prints_pinned_value(tmp_path, capsys):
    cfg = write(tmp_path, {"xi": {"V_rms": {"value": 40, "unit": "mV"},
                                  "ell": {"value": 100, "unit": "nm"}}})
    code, out, _ = run(["xi", "--config", cfg], capsys)
    assert code == 0
    lines = out.splitlines()
    assert float(lines[0].split("=")[1]) == pytest.approx(0.8729740528328693, rel=1e-12)
    assert float(lines[1].split("=")[1]) == pytest.approx(1.0, rel=1e-12)


def test_xi_from_correlation(tmp_path, capsys):
    cfg = write(tmp_path, {"correlation": SPECTRUM_CFG["correlation"]})
    code, out, _ = run(["xi", "--config", cfg, "--out", str(tmp_path)], capsys)
    assert code == 0
    assert json.loads((tmp_path / "xi.json").read_text())["xi"] == pytest.approx(0.87297405283, rel=1e-10)


def test_sweep(tmp_path, capsys):
    code, out, _ = run(["sweep", "--config", str(CONFIGS / "sweep.json"), "--out", str(tmp_path)],
                       capsys)
    assert code == 0
    star = float(out.split("=")[1].split()[0])
    assert 5 <= star / 3.0 <= 7  # c / omega0 = 2.998 cm
    doc = json.loads((tmp_path / "sweep.json").read_text())
    assert doc["on_boundary"] is False


def test_sweep_boundary_exit_3(tmp_path, capsys):
    cfg = json.loads((CONFIGS / "sweep.json").read_text())
    cfg["sweep"] = {"ell_min": 30.0, "ell_max": 300.0, "count": 5}
    code, _, err = run(["sweep", "--config", write(tmp_path, cfg), "--out", str(tmp_path)],
                       capsys)
    assert code == 3
    assert error_doc(err)["type"] == "numerical"


def test_sweep_needs_gaussian(tmp_path, capsys):
    cfg = json.loads((CONFIGS / "sweep.json").read_text())
    cfg["correlation"] = {"kind": "constant", "omega_tilde0": 1.0}
    code, _, err = run(["sweep", "--config", write(tmp_path, cfg), "--out", str(tmp_path)],
                       capsys)
    assert code == 2 and error_doc(err)["field"] == "correlation.kind"


def test_ensemble(tmp_path, capsys):
    cfg = json.loads((CONFIGS / "ensemble.json").read_text())
    cfg["ensemble"] = {"N": 32, "cell": 2.5e-5, "realizations": 3}
    code, _, _ = run(["ensemble", "--config", write(tmp_path, cfg), "--out", str(tmp_path)],
                     capsys)
    assert code == 0
    _, header, rows = read_csv(tmp_path / "ensemble.csv")
    assert header[2] == "P_erg_s_per_cm2_stderr" and len(rows) == 3


def test_kmin_above_kmax_names_field(tmp_path, capsys):
    cfg = dict(SPECTRUM_CFG, correlation={"kind": "sharp_cutoff", "V_rms": 1.0,
                                          "k_min": 5.0, "k_max": 2.0})
    code, _, err = run(["spectrum", "--config", write(tmp_path, cfg)], capsys)
    assert code == 2
    doc = error_doc(err)
    assert doc["exit_code"] == 2 and "k_max" in doc["field"]


def test_unknown_key_rejected(tmp_path, capsys):
    cfg = dict(SPECTRUM_CFG, colour="blue")
    code, _, err = run(["spectrum", "--config", write(tmp_path, cfg)], capsys)
    assert code == 2 and error_doc(err)["field"] == "colour"


def test_wrong_dimension(tmp_path, capsys):
    cfg = {"xi": {"V_rms": {"value": 1, "unit": "cm"}, "ell": 1e-5}}
    code, _, err = run(["xi", "--config", write(tmp_path, cfg)], capsys)
    assert code == 2 and error_doc(err)["field"] == "xi.V_rms"


def test_missing_section(tmp_path, capsys):
    code, _, err = run(["spectrum", "--config", write(tmp_path, {"seed": 1})], capsys)
    assert code == 2 and error_doc(err)["type"] == "schema"


def test_bad_json_and_missing_file(tmp_path, capsys):
    p = tmp_path / "broken.json"
    p.write_text("{not json")
    assert run(["spectrum", "--config", str(p)], capsys)[0] == 2
    code, _, err = run(["spectrum", "--config", str(tmp_path / "nope.json")], capsys)
    assert code == 4 and error_doc(err)["type"] == "io"


def test_unwritable_output(tmp_path, capsys):
    blocker = tmp_path / "file"
    blocker.write_text("x")
    code, _, _ = run(["spectrum", "--config", write(tmp_path, SPECTRUM_CFG),
                      "--out", str(blocker / "sub")], capsys)
    assert code == 4


def test_describe(capsys):
    code, out, _ = run(["describe", "spectrum"], capsys)
    assert code == 0 and "omega_grid" in out
    json.loads(out)
    code, _, err = run(["describe", "bogus"], capsys)
    assert code == 2 and error_doc(err)["field"] == "subcommand"


@pytest.mark.parametrize("path", sorted(CONFIGS.glob("*.json")), ids=lambda p: p.name)
def test_example_configs_validate(path):
    RunConfig.model_validate(json.loads(path.read_text()))


def test_spectrum_deterministic_bytes(tmp_path, capsys):
    cfg = write(tmp_path, SPECTRUM_CFG)
    for d in ("a", "b"):
        run(["compare-dce", "--config", cfg, "--out", str(tmp_path / d)], capsys)
    for name in ("compare_dce.csv", "compare_dce.json"):
        assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()


def test_validate_small_deterministic(tmp_path, capsys):
    cfg = write(tmp_path, {"seed": 7, "validate": {"ensemble_realizations": 4,
                                                   "ensemble_N": 32}})
    codes = [run(["validate", "--config", cfg, "--out", str(tmp_path / d)], capsys)[0]
             for d in ("a", "b")]
    a = (tmp_path / "a" / "validation_report.json").read_bytes()
    assert a == (tmp_path / "b" / "validation_report.json").read_bytes()
    assert codes[0] == codes[1] == (0 if json.loads(a)["passed"] else 1)
    assert json.loads(a)["metadata"]["config_sha256"]


def test_lorentzian_config(tmp_path, capsys):
    code, _, _ = run(["spectrum", "--config", str(CONFIGS / "lorentzian.json"),
                      "--out", str(tmp_path)], capsys)
    assert code == 0
    doc = json.loads((tmp_path / "lorentzian.json").read_text())
    assert doc["metadata"]["temporal"]["kind"] == "lorentzian"
