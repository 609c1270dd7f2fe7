import csv
import io
import json
import subprocess
import sys

import pytest

from qxform import cli
from qxform.output import csv_text, emit_csv

KERR = {"chi": 0.5, "gamma": 0.1, "n_fock": 8, "steps": 2000, "initial": {"type": "coherent", "alpha": 0.8}}
ION = {"nu0": 1.0, "Omega": 1.0, "eta0": 0.1, "n_fock": 16, "t_final": 1.0, "steps": 100, "samples": 3}
SLOW = {"grid": {"points": 16, "length": 6.283185307179586}, "mode": {"kind": "sinusoidal", "g0": 0.5},
        "n_fock": 4}


def run(argv, capsys):
    code = cli.main(argv)
    out = capsys.readouterr()
    return code, out.out, out.err


def header(text):
    return next(csv.reader(io.StringIO(text)))


def test_kerr_compare_golden_header(capsys):
    code, out, _ = run(["kerr", "compare", "--config", json.dumps(KERR), "--t1", "1", "--samples", "3"], capsys)
    assert code == 0
    assert out.splitlines()[0] == "t,max_abs_diff,trace_analytic,trace_rk4,min_eig_analytic"
    assert len(out.splitlines()) == 4


def test_ion_dynamics_golden_header(capsys):
    code, out, _ = run(["ion", "dynamics", "--config", json.dumps(ION)], capsys)
    assert code == 0
    assert header(out) == ["t", "infidelity", "leakage"]


def test_ermakov_solve_flags_and_config_agree(capsys):
    sched = '{"type": "quench", "nu1": 1, "nu2": 2, "t_switch": 0.5}'
    code, a, _ = run(["ermakov", "solve", "--schedule", sched, "--t1", "2", "--samples", "5"], capsys)
    assert code == 0
    cfg = {"schedule": json.loads(sched), "t1": 2, "samples": 5}
    code, b, _ = run(["ermakov", "solve", "--config", json.dumps(cfg)], capsys)
    assert code == 0 and a == b
    assert header(a) == ["t", "rho", "rho_dot", "omega_tilde", "eta", "beta_re", "beta_im"]


def test_flag_overrides_config(capsys):
    cfg = {"schedule": {"type": "constant", "nu0": 1}, "t1": 2, "samples": 5}
    _, out, _ = run(["ermakov", "solve", "--config", json.dumps(cfg), "--samples", "3"], capsys)
    assert len(out.splitlines()) == 4


def test_missing_required_is_validation_error(capsys):
    code, _, err = run(["ermakov", "solve", "--schedule", '{"type": "constant", "nu0": 1}'], capsys)
    assert code == 3 and "t1" in err


def test_negative_gamma_exit_3(capsys):
    bad = dict(KERR, gamma=-0.1)
    code, _, err = run(["kerr", "evolve", "--config", json.dumps(bad), "--t", "1"], capsys)
    assert code == 3 and "gamma" in err


def test_parse_error_exit_2(capsys, tmp_path):
    code, _, _ = run(["kerr", "evolve", "--config", "{not json", "--t", "1"], capsys)
    assert code == 2
    code, _, _ = run(["kerr", "evolve", "--config", str(tmp_path / "missing.json"), "--t", "1"], capsys)
    assert code == 2


def test_step_guard_exit_4(capsys):
    cfg = dict(KERR, chi=5.0, n_fock=16, steps=100)
    code, _, err = run(["kerr", "compare", "--config", json.dumps(cfg), "--t1", "1"], capsys)
    assert code == 4 and "step" in err


def test_slow_atom_leaky_initial_exit_4(capsys):
    cfg = dict(SLOW, initial={"internal": "e", "fock": 3})
    code, _, err = run(["slow-atom", "propagate", "--config", json.dumps(cfg), "--t", "1"], capsys)
    assert code == 4 and "top Fock level" in err


def test_ion_linearize_json(capsys):
    cfg = {"nu0": 1.0, "Omega": 1.0, "eta0": 0.1, "n_fock": 12}
    code, out, _ = run(["ion", "linearize-check", "--system", "single", "--config", json.dumps(cfg)], capsys)
    assert code == 0
    rep = json.loads(out)
    assert rep["max_residual"] < 1e-8 and rep["fitted_dipole_coefficient"] is None


def test_kerr_evolve_matrix_json(capsys):
    code, out, _ = run(["kerr", "evolve", "--config", json.dumps(KERR), "--t", "0"], capsys)
    assert code == 0
    rho = json.loads(out)["rho"]
    assert rho["dim"] == 8 and len(rho["entries"]) == 64


def test_qxform_out_directory(capsys, tmp_path, monkeypatch):
    monkeypatch.setenv("QXFORM_OUT", str(tmp_path))
    code, out, _ = run(["kerr", "compare", "--config", json.dumps(KERR), "--t1", "1", "--samples", "2"], capsys)
    assert code == 0 and out == ""
    assert tuple(header((tmp_path / "kerr_compare.csv").read_text())) == cli.scenarios.KERR_HEADER
    code, _, _ = run(["slow-atom", "propagate", "--config", json.dumps(SLOW), "--t", "0.5", "--samples", "2",
                      "--out", "sa.json"], capsys)
    assert code == 0
    assert (tmp_path / "sa.json").exists() and (tmp_path / "slow_atom.csv").exists()


def test_empty_series_header_only(tmp_path):
    assert csv_text(("t", "x"), []) == "t,x\n"
    path = tmp_path / "e.csv"
    emit_csv(("t", "x"), [], path)
    assert path.read_text(encoding="utf-8") == "t,x\n"


def scenario(**kw):
    cfg = {"system": "kerr", "params": KERR, "time": {"t0": 0, "t1": 1, "samples": 3},
           "output": {"format": "csv"}}
    cfg.update(kw)
    return cfg


def test_run_scenario_report(capsys, tmp_path):
    cfg = scenario(output={"format": "csv", "path": str(tmp_path / "k.csv")})
    code, _, _ = run(["run", "--config", json.dumps(cfg), "--report", str(tmp_path / "r.json")], capsys)
    assert code == 0
    rep = json.loads((tmp_path / "r.json").read_text())
    assert rep["outputs"] == [str(tmp_path / "k.csv")]
    assert {c["name"] for c in rep["checks"]} == {"kerr.max_abs_diff", "kerr.trace"}
    assert all("value" in c for c in rep["checks"])
    assert len(rep["scenario_hash"]) == 64 and rep["wall_time_s"] >= 0


def test_run_check_failure_exit_1(capsys):
    code, _, _ = run(["run", "--config", json.dumps(scenario(checks={"kerr.trace": 0.0}))], capsys)
    assert code == 1


@pytest.mark.parametrize("bad", [
    {"system": "laser"},
    {"time": {"t0": 0, "t1": 1, "samples": 1}},
    {"time": {"t0": 2, "t1": 1, "samples": 3}},
    {"output": {"format": "xml"}},
    {"params": dict(KERR, n_fock=1)},
])
def test_run_validation_exit_3(capsys, bad):
    code, _, _ = run(["run", "--config", json.dumps(scenario(**bad))], capsys)
    assert code == 3


@pytest.mark.parametrize("system,params,fmt", [
    ("ermakov", {"schedule": {"type": "constant", "nu0": 1.0}}, "csv"),
    # t_final and samples come from the time block
    ("ion-single", {k: v for k, v in ION.items() if k not in ("t_final", "samples")}, "csv"),
    ("ion-many", {"nu": 1, "Omegas": [1, 1], "etas": [0.1, 0.1], "n_fock": 6}, "json"),
    ("ion-2d", {"nu_x": 1, "nu_y": 1.3, "Omega": 1, "eta_x": 0.1, "eta_y": 0.05, "n_x": 4, "n_y": 4}, "json"),
    ("slow-atom", SLOW, "json"),
    ("kerr", KERR, "csv"),
])
def test_every_system_round_trips(capsys, tmp_path, system, params, fmt):
    out = tmp_path / f"o.{fmt}"
    cfg = {"system": system, "params": params, "time": {"t0": 0, "t1": 0.5, "samples": 5},
           "output": {"format": fmt, "path": str(out)}}
    code, _, _ = run(["run", "--config", json.dumps(cfg), "--report", str(tmp_path / "r.json")], capsys)
    rep = json.loads((tmp_path / "r.json").read_text())
    assert code == 0, rep
    assert rep["outputs"] == [str(out)] and out.exists()
    assert rep["checks"]


def test_run_scenario_list_parallel(capsys, tmp_path):
    cfg = {"scenarios": [scenario(output={"format": "csv", "path": str(tmp_path / f"k{i}.csv")})
                         for i in range(2)]}
    code, _, _ = run(["run", "--config", json.dumps(cfg), "--jobs", "2",
                      "--report", str(tmp_path / "r.json")], capsys)
    assert code == 0
    assert (tmp_path / "k0.csv").read_bytes() == (tmp_path / "k1.csv").read_bytes()
    dup = {"scenarios": [scenario(output={"path": "same.csv"}), scenario(output={"path": "same.csv"})]}
    code, _, _ = run(["run", "--config", json.dumps(dup)], capsys)
    assert code == 3


def test_outputs_byte_identical(capsys, tmp_path):
    argv = ["kerr", "compare", "--config", json.dumps(KERR), "--t1", "1", "--samples", "3"]
    _, a, _ = run(argv, capsys)
    _, b, _ = run(argv, capsys)
    assert a == b


def test_describe(capsys):
    code, out, _ = run(["--describe"], capsys)
    assert code == 0 and "scenario" in json.loads(out)


def test_console_script_selftest_section(tmp_path):
    p = subprocess.run([sys.executable, "-m", "qxform.cli", "selftest", "--section", "fock",
                        "--out", str(tmp_path / "s.json")], capture_output=True, text=True)
    assert p.returncode == 0, p.stderr
    assert json.loads((tmp_path / "s.json").read_text())["passed"] is True
