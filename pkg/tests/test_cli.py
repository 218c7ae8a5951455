import io
import json
import subprocess
import sys
import time

import numpy as np

from opineq import cli
from opineq.matrix_io import dumps_matrix, load_matrix, loads_matrix
from opineq.means import geometric_mean


def run(*argv):
    out = io.StringIO()
    code = cli.main(list(argv), out=out)
    return code, out.getvalue()


def test_check_emits_json_lines():
    code, text = run("check", "T1.1", "--dim", "4", "--trials", "50", "--seed", "7")
    lines = text.splitlines()
    assert code == 0 and len(lines) == 50
    recs = [json.loads(line) for line in lines]
    assert all(r["holds"] and r["digest"]["dim"] == 4 for r in recs)


def test_check_kwong_specialization():
    code, text = run("check", "F3.4", "--p", "2", "--r", "2", "--q", "2", "--trials", "5")
    assert code == 0
    assert all(json.loads(line)["digest"]["exponents"] == {"p": 2.0, "r": 2.0, "q": 2.0} for line in text.splitlines())


def test_unknown_case_is_usage_error(capsys):
    code, _ = run("check", "T9.9")
    assert code == 2
    assert "usage" in capsys.readouterr().err


def test_bad_flags_are_usage_errors(capsys):
    assert run("suite", "--trials", "0")[0] == 2
    assert run("suite", "--dims", "0..3")[0] == 2
    assert run("suite", "--tol", "tau_psd=1")[0] == 2
    assert run("frobnicate")[0] == 2


def test_suite_smoke_mode_is_fast():
    t = time.perf_counter()
    code, text = run("suite", "--trials", "1", "--dims", "2", "--no-timestamp")
    assert code == 0
    assert time.perf_counter() - t <= 2.0
    assert "no-unitary" in text and "F3.4" in text


def test_suite_formats_and_out_file(tmp_path):
    out = tmp_path / "recs.jsonl"
    code, text = run("suite", "--trials", "1", "--dims", "2", "--cases", "BK,kadison", "--format", "csv",
                     "--out", str(out), "--no-timestamp")
    assert code == 0
    assert text.splitlines()[0].startswith("case_id,holds")
    assert len(out.read_text().splitlines()) == 2


def test_timestamp_flag():
    _, with_ts = run("check", "BK", "--format", "json")
    _, without = run("check", "BK", "--format", "json", "--no-timestamp")
    assert "timestamp" in json.loads(with_ts) and "timestamp" not in json.loads(without)


def test_env_overrides(monkeypatch):
    monkeypatch.setenv("OPINEQ_TRIALS", "3")
    monkeypatch.setenv("OPINEQ_SEED", "99")
    code, text = run("check", "kadison", "--no-timestamp")
    recs = [json.loads(line) for line in text.splitlines()]
    assert code == 0 and len(recs) == 3 and recs[0]["digest"]["seed"] == 99


def write(path, M):
    path.write_text(dumps_matrix(np.asarray(M, dtype=complex)))
    return str(path)


def test_mean_command(tmp_path):
    a = write(tmp_path / "a.json", np.eye(2))
    b = write(tmp_path / "b.json", 4 * np.eye(2))
    code, text = run("mean", a, b, "--alpha", "0.5")
    assert code == 0 and np.allclose(loads_matrix(text), 2 * np.eye(2))
    code, text = run("mean", a, b, "--alpha", "0")
    assert np.allclose(loads_matrix(text), np.eye(2))


def test_mean_round_trip(tmp_path):
    A = np.array([[2.0, 0.5j], [-0.5j, 1.0]])
    B = np.array([[1.0, 0.3], [0.3, 3.0]])
    code, text = run("mean", write(tmp_path / "a.json", A), write(tmp_path / "b.json", B), "--alpha", "0.3")
    assert code == 0
    assert np.array_equal(loads_matrix(text), geometric_mean(load_matrix(tmp_path / "a.json"),
                                                             load_matrix(tmp_path / "b.json"), 0.3))


def test_mean_errors(tmp_path):
    (tmp_path / "bad.json").write_text("{not json")
    good = write(tmp_path / "g.json", np.eye(2))
    assert run("mean", str(tmp_path / "bad.json"), good)[0] == 2
    sing = write(tmp_path / "s.json", np.diag([1.0, 0.0]))
    assert run("mean", sing, good)[0] == 3


def test_eig_command(tmp_path):
    code, text = run("eig", write(tmp_path / "m.json", [[0, 1], [1, 0]]))
    assert code == 0 and np.allclose(json.loads(text)["values"], [1, -1])


def test_counterexample_bundle_and_replay(tmp_path):
    bundle = tmp_path / "bundle.json"
    code, text = run("counterexample", "--out", str(bundle))
    assert code == 0
    data = json.loads(bundle.read_text())
    assert data["gap"] < 0 and data["refined_gap"] < 0
    code, text = run("counterexample", "--replay", str(bundle))
    assert code == 0 and json.loads(text)["difference"] <= 1e-12


def test_counterexample_exhausted():
    code, text = run("counterexample", "--eps", "0")
    assert code == 4 and json.loads(text)["found"] is False


def test_boundary_command():
    code, text = run("boundary", "--samples", "200")
    res = json.loads(text)
    assert code == 0 and res["violations"] > 0 and res["best_gap"] < 0


def test_console_script_entry_point():
    res = subprocess.run([sys.executable, "-m", "opineq.cli", "check", "nope"], capture_output=True, text=True)
    assert res.returncode == 2


def test_check_with_map_file(tmp_path):
    from opineq.posmaps import counterexample_map

    path = tmp_path / "map.json"
    path.write_text(json.dumps(counterexample_map().to_json()))
    code, text = run("check", "C1.2", "--map", str(path), "--trials", "3", "--no-timestamp")
    recs = [json.loads(line) for line in text.splitlines()]
    assert code == 0 and len(recs) == 3
    assert {r["digest"]["map_hash"] for r in recs} == {counterexample_map().digest()}
    assert run("check", "C1.2", "--map", str(path), "--dim", "4")[0] == 2
