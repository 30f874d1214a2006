import csv
import json

import numpy as np
import pytest

from cflab.cli import run
from cflab.config import DEFAULTS, merge, resolve
from cflab.linalg import matrix_to_json
from cflab.poly import A_V


def _run(capsys, *argv):
    code = run(list(argv))
    out = capsys.readouterr().out
    return code, (json.loads(out) if out.strip() else None)


def test_cf1_success(capsys):
    code, rep = _run(capsys, "cf1", "--a1", "0.6", "--a2", "0.3+0.2i")
    assert code == 0
    assert rep["schema"] == "cf-lab/1"
    assert rep["tolerance"] == {"algebraic": 1e-10, "spectral": 1e-8, "grid": 1e-3}
    res = rep["result"]
    assert res["feasible"] and res["certificates"]["sup_norm"] <= 1 + 1e-9
    assert res["certificates"]["taylor_residual"] < 1e-12


def test_cf1_infeasible_exit_2(capsys):
    code, rep = _run(capsys, "cf1", "--a1", "0.9", "--a2", "0.5")
    assert code == 2 and rep["result"]["feasible"] is False
    assert rep["result"]["toeplitz_norm"] > 1


def test_cf2_counterexample(capsys, tmp_path):
    out = tmp_path / "r.json"
    table = tmp_path / "r.csv"
    code = run(["cf2", "--coeffs", f"{float(1 / np.sqrt(2))!r},0,0,0,0.5", "--window", "12",
                "--out", str(out), "--csv", str(table)])
    assert code == 2
    res = json.loads(out.read_text())["result"]
    assert res["status"] == "DegreeViolation" and res["violation_k"] == 3
    assert res["forced_symbol"] == "-0.3535533906 z^4"
    rows = list(csv.DictReader(table.open()))
    assert [r["k"] for r in rows] == ["1", "2"]


def test_cf2_extended(capsys):
    code, rep = _run(capsys, "cf2", "--coeffs", "0.5,0,0,0.3,0", "--max-degree", "5")
    assert code == 0 and rep["result"]["status"] == "Extended"
    assert len(rep["result"]["blocks"]) == 5


def test_usage_errors(capsys):
    assert run(["nope"]) == 64
    assert run(["cf1", "--a1", "x", "--a2", "0"]) == 64
    assert run(["cf2", "--coeffs", "1,2"]) == 64
    assert run(["cf2", "--coeffs", "1,2,x,0,0"]) == 64
    assert run(["bounds", "l1norm"]) == 64
    capsys.readouterr()


def test_runtime_error_exit_1(capsys):
    code, rep = _run(capsys, "cf2", "--coeffs", "0.1,0,0,0,0", "--window", "4")
    assert code == 1 and rep["result"]["error"] == "WindowTooSmall"


def test_norm_and_l1(capsys, tmp_path):
    f = tmp_path / "a.json"
    f.write_text(json.dumps(matrix_to_json(A_V())))
    code, rep = _run(capsys, "norm", "--matrix", str(f))
    assert code == 0 and rep["result"]["operator_norm"] == pytest.approx(2.0)
    code, rep = _run(capsys, "bounds", "l1norm", "--matrix", str(f))
    assert rep["result"]["value"] == pytest.approx(6.0, abs=1e-9)


def test_nehari_and_opspace(capsys, tmp_path):
    s = tmp_path / "s.json"
    s.write_text(json.dumps({"terms": [{"exp": [-1, 0], "re": 1.0}]}))
    code, rep = _run(capsys, "nehari", "--symbol", str(s), "--window", "8", "--budget", "1")
    assert code == 0 and rep["result"]["lower"] == pytest.approx(1.0)
    assert rep["config"]["budget"] == 1
    th = tmp_path / "t.json"
    th.write_text("[0.0, 1.0, 2.5]")
    code, rep = _run(capsys, "opspace", "refute", "--thetas", str(th))
    assert code == 0 and rep["result"]["gap"] > 0


def test_minips_and_verify(capsys):
    code, rep = _run(capsys, "bounds", "minips", "--m", "4", "--n", "3", "--restarts", "2")
    assert rep["result"]["minimum"] == pytest.approx(-2.0, abs=1e-6)
    code, rep = _run(capsys, "verify-vn", "--instances", "5", "--grid", "48")
    assert code == 0 and rep["result"]["violations"] == 0


def test_repro_subset(capsys, tmp_path):
    table = tmp_path / "r.csv"
    code, rep = _run(capsys, "repro", "--criteria", "1,2,4", "--csv", str(table))
    assert code == 0
    res = rep["result"]
    assert res["pV_supnorm"] == pytest.approx(5.0)
    assert res["AV_l1norm"] == pytest.approx(6.0)
    assert res["vk_value"] == pytest.approx(3 * np.sqrt(3))
    assert set(res["criteria"]) == {"1", "2", "4"}
    assert len(list(csv.DictReader(table.open()))) == 3


def test_config_precedence(tmp_path, capsys):
    cfg = tmp_path / "c.toml"
    cfg.write_text("window = 12\nseed = 7\n[tolerance]\ngrid = 0.01\n")
    merged = resolve(str(cfg), {"seed": 9, "tolerance": {"grid": None}})
    assert merged["window"] == 12 and merged["seed"] == 9
    assert merged["tolerance"]["grid"] == 0.01 and merged["tolerance"]["spectral"] == 1e-8
    code, rep = _run(capsys, "cf1", "--a1", "0.1", "--a2", "0.1", "--config", str(cfg),
                     "--tol-grid", "0.005")
    assert rep["config"]["window"] == 12 and rep["seed"] == 7
    assert rep["tolerance"]["grid"] == 0.005
    assert merge(DEFAULTS, {})["grid"] == 360


def test_bad_config(tmp_path, capsys):
    cfg = tmp_path / "c.toml"
    cfg.write_text("colour = 'red'\n")
    code, rep = _run(capsys, "cf1", "--a1", "0.1", "--a2", "0.1", "--config", str(cfg))
    assert code == 1 and "unknown config keys" in rep["result"]["message"]
    assert rep["tolerance"] is None
