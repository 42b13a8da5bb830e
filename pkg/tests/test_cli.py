import json

import pytest

from shiftlab import serialize
from shiftlab.cli import explain, grid_points, main, sweep
from shiftlab.scenario import ScenarioError, run_scenario, validate


def _write(tmp_path, name, obj):
    p = tmp_path / name
    p.write_text(obj if isinstance(obj, str) else json.dumps(obj))
    return str(p)


PROP15 = {"mode": "verify_prop15", "group": {"kind": "cyclic", "n": 6}, "params": {"H": [0, 3], "k": 2}}


def test_run_exit_zero_and_report(tmp_path):
    sc = _write(tmp_path, "s.json", PROP15)
    out = tmp_path / "r.json"
    assert main(["run", "--scenario", sc, "--out", str(out)]) == 0
    rep = serialize.load(out)
    assert rep["status"] == "pass" and rep["payload"]["stabilizer"] == [0, 3]


def test_malformed_json_reports_location(tmp_path, capsys):
    sc = _write(tmp_path, "bad.json", '{"mode": "verify_prop15",\n  "group": }')
    assert main(["run", "--scenario", sc]) == 2
    err = capsys.readouterr().err
    assert f"{sc}:2:" in err and "malformed JSON" in err


def test_missing_seed_for_stochastic_mode(tmp_path, capsys):
    sc = _write(tmp_path, "s.json", {"mode": "free_image", "group": {"kind": "cyclic", "n": 8}})
    assert main(["run", "--scenario", sc]) == 2
    assert "seed" in capsys.readouterr().err


@pytest.mark.parametrize("bad", [
    {"mode": "nope"},
    {"mode": "verify_prop15"},
    {"mode": "lemma16", "group": {"kind": "cyclic", "n": 12}, "seed": 0, "params": {}},
    {"mode": "bound_report", "extra": 1},
])
def test_schema_rejects(bad):
    with pytest.raises(ScenarioError):
        validate(bad)


def test_seed_flag_satisfies_schema(tmp_path):
    sc = _write(tmp_path, "s.json", {"mode": "free_image", "group": {"kind": "cyclic", "n": 5}})
    assert main(["run", "--scenario", sc, "--seed", "3", "--out", str(tmp_path / "o.json")]) == 0


def test_byte_identical_reruns(tmp_path):
    sc = _write(tmp_path, "s.json", {"mode": "free_image", "group": {"kind": "cyclic", "n": 8}, "seed": 7})
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    assert main(["run", "--scenario", sc, "--out", str(a)]) == 0
    assert main(["run", "--scenario", sc, "--out", str(b)]) == 0
    assert a.read_bytes() == b.read_bytes()


def test_failing_audit_exits_one_and_writes(tmp_path):
    sc = _write(tmp_path, "s.json", {"mode": "lemma16", "group": {"kind": "cyclic", "n": 12}, "seed": 0,
                                     "params": {"rule": {"window": [0]}}})
    out = tmp_path / "r.json"
    assert main(["run", "--scenario", sc, "--out", str(out)]) == 1
    rep = serialize.load(out)
    assert rep["status"] == "fail"
    assert main(["explain", "--report", str(out), "--audit", "stage_failure"]) == 0


def test_explain_stage_failure_text():
    rep = run_scenario({"mode": "lemma16", "group": {"kind": "cyclic", "n": 12}, "seed": 0,
                        "params": {"rule": {"window": [0]}}})
    txt = explain(rep, "stage_failure")
    assert "status: fail" in txt and "stage 2" in txt and "stage2.T1_large" in txt


def test_explain_moser_tardos():
    csp = {"variables": [0, 1], "colors": 2, "constraints": [{"domain": [0, 1], "forbidden": [[0, 0]]}]}
    rep = run_scenario({"mode": "solve_csp", "seed": 5, "params": {"csp": csp}})
    assert rep["status"] == "pass"
    txt = explain(rep, "moser_tardos")
    assert "resamples:" in txt and "seed: 5" in txt


def test_explain_split_witness():
    rep = run_scenario({"mode": "split", "group": {"kind": "cyclic", "n": 16},
                        "params": {"R": [0, 1, 15], "S": [0, 1, 2, 14, 15], "T": [0],
                                   "T_next": [0, 1, 2, 14, 15]}})
    assert rep["status"] == "pass"
    txt = explain(rep, "split_syndetic_plain")
    assert "U_prime:" in txt and "predicates:" in txt


def test_explain_unknown_audit(tmp_path):
    out = tmp_path / "r.json"
    serialize.dump(run_scenario(PROP15), out)
    assert main(["explain", "--report", str(out), "--audit", "no_such"]) == 2


def test_empty_grid():
    assert grid_points({}) == []
    assert sweep({"mode": "bound_report", "params": {"ell": 2, "D": 1, "R": 1}}, {}) == []


def test_sweep_bound_threshold(tmp_path):
    tmpl = _write(tmp_path, "t.json", {"mode": "bound_report", "params": {"ell": 2, "D": 1, "R": 1}})
    grid = _write(tmp_path, "g.json", {"params.M": [1286, 1284, 1285]})
    out = tmp_path / "sweep.json"
    assert main(["sweep", "--template", tmpl, "--grid", grid, "--out", str(out), "--jobs", "2"]) == 0
    rows = serialize.load(out)["rows"]
    assert [r["key"]["params.M"] for r in rows] == [1284, 1285, 1286]
    assert [r["metrics"]["product_below_one"] for r in rows] == [False, True, True]


def test_sweep_row_errors_are_isolated():
    rows = sweep({"mode": "verify_prop15", "group": {"kind": "cyclic", "n": 6}, "params": {"k": 2}},
                 {"params.H": [[0, 3], [0, 1]]})
    assert len(rows) == 2 and {r["status"] for r in rows} <= {"pass", "fail", "error"}


def test_bad_grid(tmp_path):
    tmpl = _write(tmp_path, "t.json", PROP15)
    grid = _write(tmp_path, "g.json", {"params.k": 2})
    assert main(["sweep", "--template", tmpl, "--grid", grid]) == 2
