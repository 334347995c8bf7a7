import csv
import io
import json
import subprocess
import sys

import numpy as np
import pytest

from qdarboux.classic import rosen_morse
from qdarboux.cli import main

POWER_LAW = {
    "grid": {"base": 1.0, "q": 0.5, "depth": 128},
    "potentials": {
        "R": "0", "S": "1", "T": "0",
        "V": "a*(1-q^alpha)/(1-q)*x^(alpha-1) + a^2*q^alpha*x^(2*alpha)",
    },
    "seed": "a*x^alpha",
    "params": {"a": 1, "alpha": 1},
    "t": [0.5],
}


@pytest.fixture
def job(tmp_path):
    def write(obj=None, **changes):
        body = json.loads(json.dumps(POWER_LAW if obj is None else obj))
        body.update(changes)
        path = tmp_path / "job.json"
        path.write_text(json.dumps(body))
        return str(path)

    return write


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def rows(text):
    return list(csv.DictReader(io.StringIO(text)))


def test_zero_potentials_give_constant_columns(capsys, job):
    path = job({"grid": {"base": 1.0, "q": 0.5, "depth": 20}, "initial": [1.0, 0.0]})
    code, out, _ = run(capsys, "solve-linear", path)
    assert code == 0
    table = rows(out)
    assert len(table) == 21
    assert {r["psi"] for r in table} == {"1"} and {r["phi"] for r in table} == {"0"}
    assert list(table[0]) == ["x", "psi", "phi", "u", "residual_psi", "residual_phi", "closed_form_delta"]


def test_zero_V_reports_closed_form_delta(capsys, job):
    body = {"grid": {"base": 1.0, "q": 0.5, "depth": 64},
            "potentials": {"R": "0.1*x", "S": "1 - x/3", "T": "-0.2"}, "initial": [1.0, 0.4]}
    code, out, err = run(capsys, "solve-linear", job(body))
    assert code == 0
    summary = json.loads(err.strip().splitlines()[-1])
    assert summary["closed_form_max_delta"] < 1e-12
    assert summary["max_residual"] < 1e-12
    assert "closed_form_delta" in rows(out)[0]


def test_malformed_expression_reports_offset(capsys, job):
    code, out, err = run(capsys, "solve-linear", job(), "--V", "1 + * x")
    assert code == 2 and out == ""
    assert "offset 4" in err


def test_unbound_parameter_is_config_error(capsys, job):
    code, _, err = run(capsys, "solve-linear", job(), "--V", "b*x")
    assert code == 2 and "b" in err


def test_unknown_field_is_config_error(capsys, job):
    assert run(capsys, "solve-linear", job(colour="red"))[0] == 2


def test_missing_file_is_config_error(capsys, tmp_path):
    assert run(capsys, "solve-linear", str(tmp_path / "nope.json"))[0] == 2


def test_bad_flag_is_config_error(capsys):
    assert run(capsys, "solve-linear", "--grid-q", "abc")[0] == 2


def test_domain_error_reports_index(capsys, job):
    body = {"grid": {"base": 1.0, "q": 0.5, "depth": 20}, "potentials": {"S": "1", "V": "-5"},
            "seed": "3", "t": [1.0]}
    code, _, err = run(capsys, "backlund", job(body))
    assert code == 3
    assert "lattice index" in err


def test_zero_parameter_keeps_seed(capsys, job):
    code, out, _ = run(capsys, "backlund", job(), "--t", "0")
    assert code == 0
    assert all(r["u"] == r["u0"] for r in rows(out))


def test_backlund_columns_and_residual(capsys, job):
    code, out, err = run(capsys, "backlund", job())
    assert code == 0
    assert list(rows(out)[0]) == ["x", "u0", "u", "V_before", "V_after", "residual", "pole"]
    assert json.loads(err)["max_residual"] < 1e-60


def test_four_parameters_emit_cross_ratio(capsys, job):
    code, out, _ = run(capsys, "backlund", job(), "--t", "0,0.3,0.7,1", "--format", "json")
    assert code == 0
    body = json.loads(out)
    assert body["summary"]["cross_ratio_target"] == pytest.approx(0.09 / 0.49)
    assert body["summary"]["cross_ratio_max_deviation"] < 1e-8
    k = body["columns"].index("cross_ratio")
    assert body["rows"][3][k] == pytest.approx(0.09 / 0.49)


def test_group_law_flag(capsys, job):
    code, _, err = run(capsys, "backlund", job(), "--t", "0.3,0.4", "--group-law")
    assert code == 0 and json.loads(err)["group_law_passed"]
    code, _, _ = run(capsys, "backlund", job(), "--t", "0.3,0.4", "--group-law", "--tolerance", "0")
    assert code == 4


def test_pole_rows_are_marked(capsys, job):
    code, out, err = run(capsys, "backlund", job(), "--t", "-5")
    assert code == 0 and "movable pole" in err
    assert any(r["pole"] == "1" for r in rows(out))


def test_chain_mode(capsys, job):
    code, out, err = run(capsys, "backlund", job(), "--mode", "chain", "--t", "0.4,0.2")
    assert code == 0
    assert json.loads(err)["max_residual_minus"] < 1e-60
    assert "residual_minus" in rows(out)[0]


def test_minus_mode_residuals(capsys, job):
    code, out, err = run(capsys, "backlund", job(), "--mode", "minus", "--t", "1")
    assert code == 0
    assert json.loads(err)["max_residual"] < 1e-60
    assert max(abs(float(r["residual_minus"])) for r in rows(out) if r["residual_minus"]) < 1e-60


def test_rosen_morse_column(capsys, job):
    body = {"grid": {"base": 1.0, "q": 0.9999, "depth": "auto"},
            "potentials": {"S": "1", "V": "a^2"}, "seed": "a", "params": {"a": 1}, "t": [1.0], "mode": "minus"}
    code, out, _ = run(capsys, "backlund", job(body), "--format", "json")
    assert code == 0
    body = json.loads(out)
    cols = body["columns"]
    x = np.array([r[cols.index("x")] for r in body["rows"]], dtype=float)
    V = np.array([np.nan if r[cols.index("V_after")] is None else r[cols.index("V_after")] for r in body["rows"]])
    m = (x >= 0.1) & (x <= 1.0)
    assert np.max(np.abs(V[m] - rosen_morse(1.0, x[m]))) < 1e-2


def test_classic_backlund(capsys, job):
    body = {"potentials": {"S": "1", "V": "1"}, "seed": "1", "t": [0.5], "classic": True, "grid": {"q": 1}}
    code, out, err = run(capsys, "backlund", job(body))
    assert code == 0
    assert json.loads(err)["max_residual"] < 1e-5


def test_classic_minus(capsys, job):
    body = {"potentials": {"S": "1", "V": "1"}, "seed": "1", "t": [1.0], "mode": "minus", "classic": True}
    code, out, _ = run(capsys, "backlund", job(body))
    assert code == 0
    V = np.array([float(r["V_after"]) for r in rows(out)])
    x = np.array([float(r["x"]) for r in rows(out)])
    assert np.max(np.abs(V - rosen_morse(1.0, x))) < 1e-5


def test_q_one_requires_classic(capsys, job):
    code, _, err = run(capsys, "verify", job(), "--grid-q", "1")
    assert code == 2 and "--classic" in err


def test_verify_power_law_passes(capsys, job):
    code, out, _ = run(capsys, "verify", job())
    report = json.loads(out)
    assert code == 0 and report["passed"]
    names = {c["name"] for c in report["checks"]}
    assert {"seed_validation", "group_law", "cross_ratio", "quadratic_reconstruction"} <= names


def test_verify_corrupted_potential_fails_seed_validation(capsys, job):
    corrupt = dict(POWER_LAW["potentials"])
    corrupt["V"] += " + 1e-3"
    code, out, _ = run(capsys, "verify", job(potentials=corrupt))
    report = json.loads(out)
    assert code == 4 and not report["passed"]
    assert report["checks"][0]["name"] == "seed_validation" and not report["checks"][0]["passed"]


def test_output_is_deterministic(capsys, job):
    path = job()
    first = run(capsys, "backlund", path, "--t", "0.2,0.6")
    second = run(capsys, "backlund", path, "--t", "0.2,0.6")
    assert first == second


def test_module_entry_point(job):
    proc = subprocess.run([sys.executable, "-m", "qdarboux", "verify", job(), "--grid-depth", "40"],
                          capture_output=True, text=True, check=False)
    assert proc.returncode == 0, proc.stderr
    assert json.loads(proc.stdout)["passed"]
