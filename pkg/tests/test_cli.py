"""CLI behavior: exit codes, determinism, trace/summary formats."""

import json

import numpy as np
import pytest

from qsimplex.cli import main
from qsimplex.instances import random_bounded_lp
from qsimplex.io import write_lp_json
from qsimplex.lp import LpInstance


@pytest.fixture()
def demo(tmp_path):
    inst = random_bounded_lp(3, 7, seed=11)
    path = tmp_path / "demo.json"
    write_lp_json(inst, path)
    return str(path)


@pytest.fixture()
def unbounded(tmp_path):
    A = np.array([[1.0, 0.0, -0.7], [0.0, 1.0, -0.4]])
    inst = LpInstance.from_dense(A, [1.0, 1.0], [0.0, 0.0, -1.0])
    path = tmp_path / "unbounded.json"
    write_lp_json(inst, path)
    return str(path)


def test_solve_optimal_exit_zero(demo, tmp_path, capsys):
    trace = tmp_path / "t.csv"
    summary = tmp_path / "s.json"
    code = main(["solve", "--instance", demo, "--out-trace", str(trace),
                 "--out-summary", str(summary)])
    assert code == 0
    out = capsys.readouterr().out
    assert "optimal" in out
    doc = json.loads(summary.read_text())
    assert doc["status"] == "optimal"
    assert doc["schema_version"] == 1
    header = trace.read_text().splitlines()[0]
    assert header.startswith("iteration,status,entering")


def test_solve_trace_byte_identical(demo, tmp_path):
    args = ["solve", "--instance", demo, "--mode", "sampling", "--seed", "5"]
    t1, t2 = tmp_path / "a.csv", tmp_path / "b.csv"
    assert main(args + ["--out-trace", str(t1)]) == 0
    assert main(args + ["--out-trace", str(t2)]) == 0
    assert t1.read_bytes() == t2.read_bytes()


def test_solve_unbounded_exit_zero(unbounded):
    assert main(["solve", "--instance", unbounded]) == 0


def test_solve_env_seed(demo, tmp_path, monkeypatch):
    monkeypatch.setenv("QSIMPLEX_SEED", "5")
    t1 = tmp_path / "env.csv"
    assert main(["solve", "--instance", demo, "--mode", "sampling",
                 "--out-trace", str(t1)]) == 0
    t2 = tmp_path / "flag.csv"
    monkeypatch.delenv("QSIMPLEX_SEED")
    assert main(["solve", "--instance", demo, "--mode", "sampling",
                 "--seed", "5", "--out-trace", str(t2)]) == 0
    assert t1.read_bytes() == t2.read_bytes()


def test_malformed_json_exit_two(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text('{"m": 1,\n "n": }')
    code = main(["solve", "--instance", str(bad)])
    assert code == 2
    err = capsys.readouterr().err
    assert "line 2" in err


def test_missing_instance_exit_two(tmp_path):
    assert main(["analyze", "--instance", str(tmp_path / "nope.json")]) == 2


def test_out_of_range_epsilon_rejected(demo):
    assert main(["solve", "--instance", demo, "--epsilon", "0.6"]) == 2


def test_classical_command(demo, tmp_path, capsys):
    trace = tmp_path / "c.csv"
    code = main(["classical", "--instance", demo, "--out-trace", str(trace)])
    assert code == 0
    out = capsys.readouterr().out
    # objective printed to 12 significant digits
    obj = out.split("objective:")[1].strip()
    assert len(obj.replace("-", "").replace(".", "").lstrip("0")) >= 10
    lines = trace.read_text().splitlines()
    assert lines[0].startswith("iteration,entering,leaving_row")
    assert len(lines) >= 2


def test_classical_unbounded(unbounded, capsys):
    assert main(["classical", "--instance", unbounded]) == 0
    assert "unbounded" in capsys.readouterr().out


def test_analyze_report_round_trips(demo, tmp_path):
    import jsonschema

    from qsimplex.costmodel import COST_REPORT_SCHEMA

    summary = tmp_path / "report.json"
    assert main(["analyze", "--instance", demo,
                 "--out-summary", str(summary)]) == 0
    doc = json.loads(summary.read_text())
    jsonschema.validate(doc, COST_REPORT_SCHEMA)
    assert any(e["name"] == "quantum_pricing" for e in doc["formulas"])


def test_analyze_with_trace_measured(demo, tmp_path):
    trace = tmp_path / "t.csv"
    main(["solve", "--instance", demo, "--out-trace", str(trace)])
    summary = tmp_path / "report.json"
    assert main(["analyze", "--instance", demo, "--trace", str(trace),
                 "--out-summary", str(summary)]) == 0
    doc = json.loads(summary.read_text())
    assert doc["measured"] is not None
    assert doc["measured"]["qlsa_invocations"] > 0


def test_start_basis_flag(tmp_path):
    # instance without an identity start: supply the basis explicitly
    A = np.array([[2.0, 0.0, 1.0], [0.0, 2.0, 1.0]])
    inst = LpInstance.from_dense(A, [2.0, 2.0], [1.0, 1.0, -1.0])
    path = tmp_path / "nb.json"
    write_lp_json(inst, path)
    assert main(["solve", "--instance", str(path)]) == 2  # no slack start
    assert main(["solve", "--instance", str(path), "--start-basis", "0,1"]) == 0


def test_verify_quick_passes(capsys):
    code = main(["verify", "--quick", "--seed", "1"])
    out = capsys.readouterr().out
    assert "sign_estimation_classifier" in out
    assert code == 0


def test_verify_threshold_mutation_fails(capsys):
    # deliberately mis-set sign-estimation thresholds: the classifier
    # suite must catch the mutation
    code = main(["verify", "--quick", "--nfn-threshold-shift", "0.08",
                 "--seed", "1"])
    out = capsys.readouterr().out
    assert code == 1
    assert "sign_estimation_classifier: FAIL" in out


def test_solve_summary_matches_classical_within_bound(demo, tmp_path, capsys):
    # analytic-mode summary objective vs the exact classical optimum, within
    # the per-instance duality bound max_k(-c_bar_k)+ * |x*|_1 computed from
    # the classical certificate
    from qsimplex.classical import (reduced_cost, scaled_pricing_norm,
                                    solve_classical)
    from qsimplex.io import read_lp_json
    from qsimplex.lp import slack_identity_basis

    summary = tmp_path / "s.json"
    assert main(["solve", "--instance", demo, "--epsilon", "0.1",
                 "--out-summary", str(summary)]) == 0
    doc = json.loads(summary.read_text())
    inst = read_lp_json(demo)
    basis = slack_identity_basis(inst)
    classical = solve_classical(inst, basis, rule="dantzig")
    worst = max(max(0.0, -reduced_cost(inst, doc["basis"], k))
                for k in range(inst.n) if k not in doc["basis"])
    bound = worst * float(np.abs(classical.x).sum()) + 1e-9
    assert doc["objective"] - classical.objective <= bound
    assert doc["objective"] >= classical.objective - 1e-9


def test_analyze_identity_basis_mu_one(tmp_path):
    # identity basis: mu(A_B) = matrix_scale ~ 1 in the report
    A = np.hstack([np.eye(3), np.ones((3, 1))])
    inst = LpInstance.from_dense(A, np.ones(3), [0.0, 0.0, 0.0, -1.0])
    path = tmp_path / "id.json"
    write_lp_json(inst, path)
    summary = tmp_path / "r.json"
    assert main(["analyze", "--instance", str(path),
                 "--out-summary", str(summary)]) == 0
    doc = json.loads(summary.read_text())
    assert doc["instance"]["mu_ab"] == pytest.approx(1.0, abs=1e-3)


def test_verify_rejects_out_of_range_epsilon():
    assert main(["verify", "--epsilon", "0.6"]) == 2


def test_verify_summary_json_serializable(tmp_path, capsys):
    summary = tmp_path / "verify.json"
    code = main(["verify", "--quick", "--seed", "1",
                 "--out-summary", str(summary)])
    capsys.readouterr()
    assert code == 0
    doc = json.loads(summary.read_text())
    assert all(isinstance(s["passed"], bool) for s in doc["suites"])
