import json
import math

import pytest

from optical_magnus import __version__
from optical_magnus.cli import (
    ConfigError,
    RunConfig,
    main,
    parse_quantity,
    read_table,
)


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_deflect_record(capsys):
    code, out, _ = run(capsys, "deflect", "--width", "0.6", "--detuning", "1", "--format", "json", "--grid", "256")
    assert code == 0
    doc = json.loads(out)
    row = dict(zip(doc["columns"], doc["rows"][0]))
    assert row["delta_theta_analytic [rad]"] == pytest.approx(0.0486)
    assert row["force_x_numeric [P/c]"] == -row["delta_theta_numeric [rad]"]
    assert doc["meta"]["version"] == __version__
    assert doc["meta"]["config.width"] == 0.6 and doc["meta"]["config.sigma"] == 1


def test_deflect_tophat(capsys):
    code, out, _ = run(capsys, "deflect", "--shape", "tophat", "--width", "0.6", "--format", "csv")
    cols, rows = read_table(out, "csv")
    assert code == 0
    assert rows[0][cols.index("delta_theta_analytic [rad]")] == pytest.approx(0.01215)


def test_invalid_width_exit_2(capsys):
    code, _, err = run(capsys, "deflect", "--width", "2.0")
    assert code == 2 and "width" in err and "pi/2" in err


def test_argparse_errors_exit_2(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["deflect", "--sigma", "3"])
    assert exc.value.code == 2
    with pytest.raises(SystemExit) as exc:
        main(["teleport"])
    assert exc.value.code == 2


def test_no_convergence_exit_3(capsys):
    code, _, err = run(capsys, "deflect", "--width", "0.05", "--grid", "16")
    assert code == 3 and "NoConvergence" in err


def test_csv_json_same_numbers_and_deterministic(capsys, tmp_path):
    args = ["scan", "--width", "0.1", "--start", "-1", "--stop", "1", "--points", "3"]
    _, csv_out, _ = run(capsys, *args, "--format", "csv")
    _, json_out, _ = run(capsys, *args, "--format", "json")
    c_cols, c_rows = read_table(csv_out, "csv")
    j_cols, j_rows = read_table(json_out, "json")
    assert c_cols == j_cols and c_rows == j_rows
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    main(args + ["--format", "csv", "--out", str(a)])
    main(args + ["--format", "csv", "--out", str(b)])
    assert a.read_bytes() == b.read_bytes() == csv_out.encode()


def test_csv_layout(capsys):
    _, out, _ = run(capsys, "scan", "--width", "0.1", "--points", "2", "--format", "csv")
    lines = out.splitlines()
    meta = [ln for ln in lines if ln.startswith("#")]
    assert f"# version={__version__}" in meta and "# config.width=0.1" in meta
    header = lines[len(meta)]
    assert all("[" in c for c in header.split(","))
    # 17 significant digits round-trip
    value = lines[len(meta) + 1].split(",")[3]
    assert float(value) == float(format(float(value), ".17g"))


def test_displacement_scan_crosses_once(capsys):
    _, out, _ = run(
        capsys, "scan", "--axis", "displacement", "--width", "0.2", "--start", "0.8",
        "--stop", "1.2", "--points", "5", "--format", "csv",
    )
    cols, rows = read_table(out, "csv")
    f = [r[cols.index("force_x_numeric [P/c]")] for r in rows]
    flips = [i for i in range(len(f) - 1) if (f[i] > 0) != (f[i + 1] > 0)]
    assert len(flips) == 1


def test_theta_scan_is_profile(capsys):
    code, out, _ = run(capsys, "scan", "--axis", "theta", "--width", "0.6", "--points", "16", "--format", "csv")
    cols, rows = read_table(out, "csv")
    assert code == 0 and cols[0] == "theta [rad]" and len(rows) == 31


def test_equilibrium(capsys):
    code, out, _ = run(capsys, "equilibrium", "--width", "0.2", "--detuning", "-1", "--sigma", "-1")
    doc = json.loads(out)
    assert code == 0
    assert doc["rows"][0][0] == pytest.approx(-1.01, abs=0.003)
    assert doc["rows"][0][1] == pytest.approx(-1.0)


def test_equilibrium_on_resonance_invalid(capsys):
    code, _, err = run(capsys, "equilibrium", "--detuning", "0")
    assert code == 2 and "resonance" in err


def test_profile(capsys):
    code, out, _ = run(capsys, "profile", "--width", "0.6", "--points", "20")
    doc = json.loads(out)
    assert code == 0 and len(doc["rows"]) == 39


def test_focal(capsys):
    code, out, _ = run(capsys, "focal", "--shape", "tophat", "--width", "0.3")
    row = json.loads(out)["rows"][0]
    assert code == 0 and row[0] == pytest.approx(row[1], rel=0.02)


def test_shake_harmonic(capsys, tmp_path):
    traj = tmp_path / "traj.csv"
    code, out, _ = run(capsys, "shake", "--potential", "harmonic", "--out", str(traj), "--format", "csv")
    summary = json.loads(out)
    assert code == 0
    assert summary["n_cycles_estimate"] == pytest.approx(3.5355, abs=1e-4)
    assert summary["n_cycles_simulated"] == pytest.approx(3.5, abs=0.2)
    assert summary["escape_criterion"] == "energy > U0"
    cols, rows = read_table(traj.read_text(), "csv")
    assert cols == ["t [s]", "x [m]", "v [m/s]", "E [J]"]
    assert rows[-1][0] == pytest.approx(summary["escape_time_s"])


def test_shake_off_resonance(capsys):
    omega = 2 * math.pi * 6918.48 * 0.5
    code, out, _ = run(capsys, "shake", "--omega-b", f"{omega}rad/s", "--t-max", "2ms")
    summary = json.loads(out)
    assert code == 0 and summary["escape_time_s"] is None and summary["n_cycles_simulated"] is None


def test_shake_gaussian_reports_criterion(capsys):
    code, out, _ = run(capsys, "shake", "--t-max", "3ms")
    summary = json.loads(out)
    assert code == 0 and summary["escape_criterion"]
    assert 0 < summary["max_energy_over_depth"]


def test_shake_step_too_large_exit_3(capsys):
    code, _, err = run(capsys, "shake", "--dt", "5us")
    assert code == 3 and "StepTooLarge" in err


def test_shake_units_validated(capsys):
    code, _, err = run(capsys, "shake", "--depth", "20furlongs")
    assert code == 2 and "unit" in err


def test_config_file_and_override(capsys, tmp_path):
    cfg = tmp_path / "run.json"
    cfg.write_text(json.dumps({"shape": "tophat", "width": 0.6, "detuning": 1}))
    _, out, _ = run(capsys, "deflect", "--config", str(cfg), "--grid", "512")
    meta = json.loads(out)["meta"]
    assert meta["config.shape"] == "tophat" and meta["config.width"] == 0.6
    _, out, _ = run(capsys, "deflect", "--config", str(cfg), "--width", "0.3")
    assert json.loads(out)["meta"]["config.width"] == 0.3


def test_config_unknown_key(capsys, tmp_path):
    cfg = tmp_path / "run.json"
    cfg.write_text(json.dumps({"widht": 0.6}))
    code, _, err = run(capsys, "deflect", "--config", str(cfg))
    assert code == 2 and "widht" in err


def test_config_bad_value(capsys, tmp_path):
    cfg = tmp_path / "run.json"
    cfg.write_text(json.dumps({"sigma": 0.5}))
    code, _, err = run(capsys, "deflect", "--config", str(cfg))
    assert code == 2 and "sigma" in err


def test_selfcheck_ok(capsys):
    code, out, _ = run(capsys, "selfcheck")
    assert code == 0 and "FAIL" not in out


def test_selfcheck_mutation(capsys):
    code, out, err = run(capsys, "selfcheck", "--inject-sign-flip")
    assert code == 1
    assert "FAIL  energy_conservation" in out
    assert err.startswith("selfcheck failed: ")


def test_selfcheck_starved_grid(capsys):
    code, _, err = run(capsys, "selfcheck", "--grid", "8")
    assert code == 1 and "NoConvergence" in err


@pytest.mark.parametrize(
    "text,kind,expected",
    [
        ("0.8um", "length", 0.8e-6),
        ("800nm", "length", 0.8e-6),
        ("2G", "field", 2e-4),
        ("0.2mT", "field", 2e-4),
        ("7kHz", "angular_rate", 2 * math.pi * 7e3),
        ("1e3 rad/s", "angular_rate", 1e3),
        ("88u", "mass", 88 * 1.66053906660e-27),
        ("1.5", "time", 1.5),
        ("250us", "time", 2.5e-4),
    ],
)
def test_parse_quantity(text, kind, expected):
    assert parse_quantity(text, kind) == pytest.approx(expected, rel=1e-9)


def test_parse_quantity_rejects():
    with pytest.raises(ConfigError):
        parse_quantity("fast", "time")
    with pytest.raises(ConfigError):
        parse_quantity("3 parsecs", "length")


def test_runconfig_validate():
    RunConfig().validate()
    with pytest.raises(ConfigError):
        RunConfig(format="xml").validate()
    with pytest.raises(ConfigError):
        RunConfig(grid=2).validate()
