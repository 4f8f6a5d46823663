import csv
import io
import json
import math

import pytest
from hypothesis import given, strategies as st

from multicopy.cli import SweepConfig, main
from multicopy.collective import ocm_error_pure


def run_cli(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def rows_of(text):
    return list(csv.DictReader(io.StringIO(text)))


def test_error_curve_ocm_pure(capsys):
    code, out, _ = run_cli(capsys, "error-curve", "-q", "--schemes", "ocm", "--nu", "0", "--n-max", "3")
    assert code == 0
    rows = rows_of(out)
    c = math.cos(math.pi / 6)
    assert [int(r["N"]) for r in rows] == [1, 2, 3]
    for r in rows:
        assert float(r["error"]) == pytest.approx(ocm_error_pure(c, 0.5, int(r["N"])), abs=1e-12)


def test_error_curve_lof_steps_and_goa_equals_loa(capsys):
    code, out, _ = run_cli(capsys, "error-curve", "-q", "--schemes", "lof,loa,goa", "--nu", "0",
                           "--n-max", "6", "--grid", "2501")
    assert code == 0
    by = {}
    for r in rows_of(out):
        by.setdefault(r["scheme"], {})[int(r["N"])] = float(r["error"])
    for k in (1, 2, 3):
        assert by["lof"][2 * k] == by["lof"][2 * k - 1]
    for n in range(1, 7):
        assert by["goa"][n] == pytest.approx(by["loa"][n], abs=1e-6)


def test_angles_command(capsys):
    code, out, _ = run_cli(capsys, "angles", "-q", "--nu", "0.1", "--n-max", "3", "--grid", "21",
                           "--format", "json")
    assert code == 0
    data = json.loads(out)["data"]
    gof = [r for r in data if r["scheme"] == "gof"]
    assert gof[0]["N"] == 1 and gof[0]["angle"] == pytest.approx(math.pi / 4)
    goa = [r for r in data if r["scheme"] == "goa"]
    last = {round(r["credulity"], 12): r["angle"] for r in goa if r["stage"] == 3}
    for p, phi in last.items():
        if 0 < p < 1:
            assert phi + last[round(1 - p, 12)] == pytest.approx(math.pi / 2, abs=1e-9)
    assert last[0.5] == pytest.approx(math.pi / 4)


def test_chernoff_command(capsys):
    code, out, _ = run_cli(capsys, "chernoff", "-q", "--schemes", "ocm,lof,gof", "--nu", "0",
                           "--grid", "101", "--asymptotic-n", "100")
    assert code == 0
    rows = rows_of(out)
    xi = {(r["scheme"], r["method"]): float(r["xi"]) for r in rows}
    c = math.cos(math.pi / 6)
    assert xi[("ocm", "analytic")] == pytest.approx(-2 * math.log(c), abs=1e-12)
    assert xi[("lof", "analytic")] == pytest.approx(-math.log(c), abs=1e-12)
    assert xi[("lof", "numeric")] > 0
    assert rows[-1]["s"] == "" and all(float(r["xi"]) >= 0 for r in rows)


def test_critical_endpoints(capsys):
    code, out, _ = run_cli(capsys, "critical", "-q", "--alpha", "0,90", "--degrees")
    assert code == 0
    assert [float(r["nu_crit"]) for r in rows_of(out)] == [0.0, 0.0]


def test_simulate_writes_identical_files(tmp_path, capsys):
    outs = []
    path = tmp_path / "run.csv"
    for _ in range(2):
        code = main(["simulate", "-q", "--schemes", "loa", "--nu", "0.1", "--n-max", "4",
                     "--trials", "20000", "--seed", "9", "--out", str(path)])
        assert code == 0
        outs.append((path.read_bytes(), (tmp_path / "run.csv.summary.json").read_bytes()))
    assert outs[0] == outs[1]
    summary = json.loads(outs[0][1])["data"][0]
    assert abs(summary["rate"] - summary["predicted"]) <= 3 * summary["standard_error"]
    header = outs[0][0].decode().splitlines()[0]
    assert header == "scheme,alpha,nu,trial,stage,credulity_before,angle,outcome,credulity_after"


def test_simulate_fully_mixed(capsys):
    code, out, _ = run_cli(capsys, "simulate", "-q", "--schemes", "lof", "--nu", "1", "--n-max", "3",
                           "--trials", "40000")
    assert code == 0
    row = json.loads(out)["data"][0]
    assert abs(row["rate"] - 0.5) <= 3 * row["standard_error"]


def test_config_file_and_flag_override(tmp_path, capsys):
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({"schemes": ["lof"], "nu": [0.1], "n_max": 2, "format": "json"}))
    code, out, _ = run_cli(capsys, "error-curve", "-q", "--config", str(cfg), "--n-max", "3")
    assert code == 0
    doc = json.loads(out)
    assert doc["meta"]["config"]["n_max"] == 3
    assert len(doc["data"]) == 3


@pytest.mark.parametrize("argv,code", [
    (["error-curve", "--nu", "2"], 2),
    (["error-curve", "--grid", "100"], 2),
    (["angles", "--schemes", "lof"], 2),
    (["error-curve", "--q", "0.3"], 2),
    (["error-curve", "--schemes", "ocm", "--n-max", "13", "--nu", "0.1"], 3),
])
def test_exit_codes(argv, code, capsys):
    assert main([*argv, "-q"]) == code
    assert capsys.readouterr().err


def test_bad_config_reports_position(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text('{"nu": [0.1,\n  ]}')
    assert main(["error-curve", "-q", "--config", str(bad)]) == 2
    assert "line 2" in capsys.readouterr().err
    unknown = tmp_path / "u.json"
    unknown.write_text('{"nuu": [0.1]}')
    assert main(["error-curve", "-q", "--config", str(unknown)]) == 2
    assert "nuu" in capsys.readouterr().err


@given(st.lists(st.floats(0, 1), min_size=1, max_size=4), st.integers(1, 30),
       st.sampled_from(["csv", "json"]), st.booleans())
def test_config_roundtrip(nu, n_max, fmt, extrapolate):
    cfg = SweepConfig(nu=nu, n_max=n_max, format=fmt, extrapolate=extrapolate)
    again = SweepConfig.from_dict(json.loads(json.dumps(cfg.to_dict())))
    assert again == cfg
