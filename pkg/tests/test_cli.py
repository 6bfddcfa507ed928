import csv
import io
import json
import math

import numpy as np
import pytest

from qubitmaps.cli import STEADY_COLUMNS, fmt, main

HEADER = ("omega0,model,rho_pp,rho_mm,rho_pm_re,rho_pm_im,vx,vy,vz,min_eig,g0,n0,D0,"
          "Delta,Delta_plus,Delta_minus,error")


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def rows(text):
    return list(csv.DictReader(io.StringIO(text)))


def test_fmt():
    assert fmt(-0.0, 6) == "0.00000e+00"
    assert fmt(1234.5, 6) == "1.23450e+03"
    assert fmt(1 / 3, 17) == "3.3333333333333331e-01"
    assert fmt(math.inf, 8) == "inf" and fmt(None, 8) == ""


def test_steady_default(capsys):
    code, out, _ = run(capsys, "steady")
    assert code == 0
    assert out.splitlines()[0] == HEADER
    r = rows(out)
    assert [x["model"] for x in r] == ["redfield", "lindblad"]
    assert float(r[0]["rho_pp"]) == pytest.approx(0.2364719564917368, rel=1e-11)
    assert float(r[1]["rho_pm_re"]) == 0.0
    assert all(len(line.split(",")) == len(STEADY_COLUMNS) for line in out.splitlines())


def test_steady_json_and_precision(capsys):
    code, out, _ = run(capsys, "steady", "--model", "lindblad", "--format", "json")
    data = json.loads(out)
    assert code == 0 and data[0]["model"] == "lindblad" and data[0]["D0"] == 10.0
    code, out, _ = run(capsys, "steady", "--model", "lindblad", "--precision", "6")
    assert rows(out)[0]["omega0"] == "5.00000e+00"


def test_sweep_header_and_determinism(capsys, tmp_path):
    args = ["sweep", "--from", "1", "--to", "50", "--steps", "7", "--spacing", "log"]
    code, a, _ = run(capsys, *args)
    code2, b, _ = run(capsys, *args)
    assert code == code2 == 0 and a == b
    assert a.splitlines()[0] == HEADER
    r = rows(a)
    assert len(r) == 14
    w = sorted({float(x["omega0"]) for x in r})
    assert np.allclose(w, np.geomspace(1, 50, 7), rtol=1e-11)
    out = tmp_path / "sweep.csv"
    assert main(args + ["--out", str(out)]) == 0
    assert out.read_text() == a


def test_sweep_reports_point_errors(capsys):
    code, out, _ = run(capsys, "sweep", "--from", "1000", "--to", "4000", "--steps", "2",
                       "--model", "redfield")
    r = rows(out)
    assert code == 0
    assert r[0]["error"] == "" and r[1]["error"].startswith("DomainError")
    assert r[1]["rho_pp"] == ""


def test_config_file_and_flag_precedence(capsys, tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("# reference run\nbath.T = 20\nqubit.omega0 = 8\nmodel = lindblad\n")
    code, out, _ = run(capsys, "steady", "--config", str(cfg))
    r = rows(out)[0]
    assert code == 0 and r["model"] == "lindblad"
    assert float(r["D0"]) == 20.0 and float(r["omega0"]) == 8.0
    code, out, _ = run(capsys, "steady", "--config", str(cfg), "--T", "5")
    assert float(rows(out)[0]["D0"]) == 5.0


@pytest.mark.parametrize("argv", [
    ["steady", "--s", "0"],
    ["steady", "--T", "-1"],
    ["steady", "--precision", "30"],
    ["steady", "--model", "secular"],
    ["steady", "--format", "xml"],
    ["steady", "--omega0", "0"],
    ["sweep", "--steps", "1"],
    ["sweep", "--from", "5", "--to", "1"],
    ["evolve", "--rho0", "1,0"],
    ["threshold", "--bracket", "40,10"],
    ["bogus"],
    [],
])
def test_usage_errors(capsys, argv):
    code, _, err = run(capsys, *argv)
    assert code == 2
    assert "error" in err


def test_bad_config_file(capsys, tmp_path):
    cfg = tmp_path / "bad.cfg"
    cfg.write_text("bath.temperature = 3\n")
    assert run(capsys, "steady", "--config", str(cfg))[0] == 2
    assert run(capsys, "steady", "--config", str(tmp_path / "missing.cfg"))[0] == 2


def test_error_json(capsys):
    code, out, _ = run(capsys, "steady", "--s", "-1", "--error-json")
    assert code == 2
    assert json.loads(out)["status"] == 2


def test_evolve_zero_time(capsys):
    code, out, _ = run(capsys, "evolve", "--t-max", "0", "--rho0", "0.2,0.1,0.5")
    r = rows(out)
    assert code == 0 and len(r) == 2
    for x in r:
        assert float(x["t"]) == 0.0
        assert float(x["vx"]) == pytest.approx(0.2) and float(x["vy"]) == pytest.approx(0.1)
        assert float(x["vz"]) == pytest.approx(0.5)


def test_evolve_coherence_decays_at_gamma1(capsys):
    code, out, _ = run(capsys, "evolve", "--model", "lindblad", "--f1", "0", "--rho0", "1,0,0",
                       "--t-max", "0.5", "--samples", "11", "--precision", "17")
    r = rows(out)
    t = np.array([float(x["t"]) for x in r])
    amp = np.array([float(x["abs_rho_pm"]) for x in r])
    rate = -np.polyfit(t, np.log(amp), 1)[0]
    assert rate == pytest.approx(9.709646206265457, rel=1e-8)
    assert r[-1]["dist_to_steady"] != ""


def test_evolve_dephasing_conserves_vz(capsys):
    code, out, _ = run(capsys, "evolve", "--f2", "0", "--rho0", "0,0,1", "--t-max", "2",
                       "--samples", "5")
    r = rows(out)
    assert code == 0
    assert all(float(x["vz"]) == 1.0 for x in r)
    assert r[-1]["dist_to_steady"] == "no-unique-steady-state"


def test_threshold(capsys, tmp_path):
    code, out, _ = run(capsys, "threshold", "--model", "lindblad")
    assert code == 0 and "no crossing: quantum map preserved" in out
    golden = tmp_path / "golden.json"
    golden.write_text(json.dumps({"omega0_star": 8.879430451284364, "tol": 1e-5}))
    code, out, _ = run(capsys, "threshold", "--model", "redfield", "--golden", str(golden),
                       "--format", "json")
    data = json.loads(out)
    assert code == 0 and data["golden"]["match"]
    golden.write_text(json.dumps({"omega0_star": 25.0}))
    code, out, _ = run(capsys, "threshold", "--model", "redfield", "--golden", str(golden))
    assert code == 1 and "MISMATCH" in out


def test_threshold_no_bracket_is_failure(capsys):
    code, out, _ = run(capsys, "threshold", "--model", "redfield", "--bracket", "10,40")
    assert code == 1 and "do not bracket" in out


def test_validate(capsys):
    code, out, _ = run(capsys, "validate")
    assert code == 0
    lines = out.splitlines()
    assert len(lines) == 9 and all(line.split()[0] in ("PASS", "SKIPPED") for line in lines)
    assert all(line.split()[2].endswith("s") for line in lines)


def test_validate_injected_tolerance(capsys):
    code, out, err = run(capsys, "validate", "--tolerance", "1e-20")
    assert code == 1
    assert "FAIL" in out and "failed checks:" in err


def test_validate_sub_ohmic_routing(capsys):
    code, out, _ = run(capsys, "validate", "--s", "0.5", "--format", "json")
    data = {r["name"]: r["status"] for r in json.loads(out)}
    assert code == 0
    assert data["sub_ohmic_limits"] == "pass"
    assert data["shift_identity"] == "skipped" and data["generator_oracle"] == "skipped"
