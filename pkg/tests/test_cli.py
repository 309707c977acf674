import csv
import io
import json
import math
import subprocess
import sys

import numpy as np
import pytest

from groth_lhv import cli, inn22
from groth_lhv.bell_engine import format_matrix_csv


def run(*argv):
    out = io.StringIO()
    code = cli.main(list(argv), out=out)
    return code, out.getvalue()


@pytest.fixture
def settings_file(tmp_path):
    p = tmp_path / "pairs.json"
    p.write_text(json.dumps([{"a": [0, 0, 1], "b": [0, 0, 1]},
                             {"a": [1, 0, 0], "b": [0.6, 0.8, 0]}]))
    return str(p)


def test_thresholds_json():
    code, out = run("thresholds")
    assert code == 0
    doc = json.loads(out)
    vals = [t["p"] for t in doc["thresholds"]]
    assert len(vals) == 5 and vals == sorted(vals) and len(set(vals)) == 5
    assert vals[0] == pytest.approx(1 / 3) and vals[1] == pytest.approx(5 / 12)
    assert vals[3] == pytest.approx(0.6595, abs=2e-4)
    assert vals[4] == pytest.approx(0.7071, abs=1e-4)
    assert all(t["provenance"] for t in doc["thresholds"])
    assert doc["invocation"]["command"] == "thresholds"


def test_thresholds_csv():
    code, out = run("thresholds", "--format", "csv")
    rows = list(csv.DictReader(io.StringIO(out)))
    assert code == 0 and len(rows) == 5
    vals = [float(r["p"]) for r in rows]
    assert vals == sorted(vals)


def test_thresholds_general_window():
    doc = json.loads(run("thresholds", "--state", "general")[1])
    lo, hi = doc["window"]
    assert lo == pytest.approx(0.5611, abs=1e-4) and hi == pytest.approx(0.5963, abs=1e-4)


def test_simulate_werner_deterministic(settings_file):
    args = ("simulate", "--model", "werner", "--settings", settings_file, "--samples", "2e5",
            "--seed", "7", "--check")
    c1, o1 = run(*args)
    c2, o2 = run(*args)
    assert c1 == c2 == 0 and o1 == o2
    doc = json.loads(o1)
    e = doc["estimates"]
    assert abs(e[0]["joint"]["mean"] + 0.5) <= 4 * e[0]["joint"]["stderr"]
    assert abs(e[1]["joint"]["mean"] + 0.3) <= 4 * e[1]["joint"]["stderr"]
    assert doc["invocation"]["samples"] == 200_000 and e[0]["N"] == 200_000
    # threads change the work split, not the numbers
    _, o3 = run(*args, "--threads", "3")
    d3 = json.loads(o3)
    assert d3["estimates"] == doc["estimates"]


def test_simulate_krivine3d(settings_file):
    code, out = run("simulate", "--model", "krivine3d", "--settings", settings_file,
                    "--samples", "1e5", "--seed", "1", "--check")
    assert code == 0
    doc = json.loads(out)
    assert doc["model_visibility"] == pytest.approx(0.6595, abs=2e-4)
    e = doc["estimates"][0]
    assert abs(e["joint"]["mean"] + 0.6595) <= 4 * e["joint"]["stderr"] + 2e-4


def test_simulate_planar_and_visibility(tmp_path, settings_file):
    code, _ = run("simulate", "--model", "krivine2d", "--settings", settings_file, "--samples", "1e3")
    assert code == 2
    p = tmp_path / "planar.json"
    p.write_text(json.dumps([{"a": [1, 0], "b": [0, 1]}]))
    assert run("simulate", "--model", "krivine2d", "--settings", str(p), "--samples", "1e4", "--check")[0] == 0
    code, out = run("simulate", "--model", "werner", "--settings", settings_file,
                    "--samples", "1e5", "--visibility", "0.25", "--check")
    assert code == 0 and json.loads(out)["estimates"][0]["predicted"]["joint"] == pytest.approx(-0.25)
    assert run("simulate", "--model", "werner", "--settings", settings_file, "--visibility", "0.6")[0] == 2


def test_simulate_taylor_any_dimension(tmp_path):
    p = tmp_path / "five.json"
    p.write_text(json.dumps([{"a": [1, 0, 0, 0, 0], "b": [0, 0, 0, 0.6, 0.8]}]))
    code, out = run("simulate", "--model", "taylor", "--settings", str(p), "--samples", "2e4", "--check")
    assert code == 0
    assert json.loads(out)["model_visibility"] == pytest.approx(0.5611, abs=1e-4)


def test_simulate_normalizes_with_warning(tmp_path, caplog):
    p = tmp_path / "raw.json"
    p.write_text(json.dumps([{"a": [0, 0, 2], "b": [0, 0, 1.0000001]}]))
    with caplog.at_level("WARNING", logger="groth_lhv"):
        code, out = run("simulate", "--model", "werner", "--settings", str(p), "--samples", "1e3")
    assert code == 0
    assert json.loads(out)["estimates"][0]["settings"]["a"] == [0, 0, 1.0]
    assert len([r for r in caplog.records if "normalizing" in r.getMessage()]) == 1


@pytest.mark.parametrize("argv", [
    ("simulate", "--model", "nope", "--settings", "x.json"),
    ("simulate", "--model", "werner", "--settings", "/nonexistent.json"),
    ("simulate", "--model", "werner", "--settings", "x.json", "--samples", "1.5"),
    ("simulate", "--model", "werner", "--settings", "x.json", "--threads", "0"),
    ("bound", "/nonexistent.csv"),
    ("inn22", "--n", "13"),
    ("krivine", "--order", "4"),
    (),
])
def test_usage_errors_exit_2(argv):
    assert run(*argv)[0] == 2


def test_bad_settings_content(tmp_path):
    p = tmp_path / "bad.json"
    for content in ("{}", "[]", '[{"a": [0, 0, 0], "b": [0, 0, 1]}]', '[{"a": [1, 0, 0]}]', "not json"):
        p.write_text(content)
        assert run("simulate", "--model", "werner", "--settings", str(p))[0] == 2


def test_bound_chsh(tmp_path):
    p = tmp_path / "chsh.csv"
    p.write_text("1,1\n1,-1\n")
    code, out = run("bound", str(p), "--dim", "2")
    doc = json.loads(out)
    assert code == 0
    assert doc["ratio"] == pytest.approx(math.sqrt(2), abs=1e-5)
    assert doc["threshold"] == pytest.approx(0.70711, abs=1e-5)
    assert doc["raw_local"] == 2.0 and doc["local"] == 1.0
    doc1 = json.loads(run("bound", str(p), "--dim", "1")[1])
    assert doc1["ratio"] == pytest.approx(1.0, abs=1e-12) and not doc1["violation"]
    p.write_text("1,a\n")
    assert run("bound", str(p))[0] == 2


def test_bound_random_envelope(tmp_path):
    M = np.random.default_rng(5).standard_normal((5, 5))
    p = tmp_path / "m.csv"
    p.write_text(format_matrix_csv(M))
    doc = json.loads(run("bound", str(p), "--dim", "3", "--seed", "3")[1])
    assert 1 - 1e-9 <= doc["ratio"] <= 1.5163 + 1e-6


def test_krivine_orders():
    doc = json.loads(run("krivine", "--order", "3")[1])
    assert doc["c"] == pytest.approx(1.0360, abs=1e-3)
    for k in ("order", "c", "upper_bound", "model_visibility", "truncation_order", "tail_bound"):
        assert k in doc
    assert doc["ok"] and doc["c_agreement"] <= 1e-6
    doc2 = json.loads(run("krivine", "--order", "2")[1])
    assert doc2["planar_gap"]["gap"] > 0 and doc2["model_visibility"] >= 0.70
    doct = json.loads(run("krivine", "--order", "taylor", "--source-dim", "4")[1])
    assert doct["c"] == pytest.approx(math.log(1 + math.sqrt(2)), abs=1e-10)


def test_inn22_commands():
    code, out = run("inn22", "--n", "4", "--verify-decomposition")
    doc = json.loads(out)
    assert code == 0
    assert (doc["s1"], doc["s2"], doc["identity_exact"], doc["counterexamples"]) == (10, 1, True, 0)
    doc2 = json.loads(run("inn22", "--n", "2")[1])
    assert "CHSH" in doc2["note"] and doc2["s1"] == 1 and doc2["s2"] == 0
    code, out = run("inn22", "--n", "3", "--trials", "300", "--seed", "4")
    assert code == 0 and json.loads(out)["implication_search"]["trials"] == 300


def test_inn22_counterexample_exit_1(monkeypatch):
    fake = inn22.ImplicationReport(10, {3: 1}, 1, 0.1)
    monkeypatch.setattr(cli.inn22, "check_chsh_implication", lambda *a, **k: fake)
    code, out = run("inn22", "--n", "3", "--trials", "10")
    assert code == 1 and json.loads(out)["counterexamples"] == 1


def test_simulate_check_failure_exit_1(settings_file, monkeypatch):
    real = cli.build_model

    def skewed(*a):
        m = real(*a)
        m.predicted = lambda a, b: (0.9, 0.0, 0.0)
        return m
    monkeypatch.setattr(cli, "build_model", skewed)
    code, _ = run("simulate", "--model", "werner", "--settings", settings_file,
                  "--samples", "1e4", "--check")
    assert code == 1


def test_console_entry_point():
    r = subprocess.run([sys.executable, "-m", "groth_lhv", "thresholds", "--format", "csv"],
                       capture_output=True, text=True)
    assert r.returncode == 0 and r.stdout.count("\n") == 6
    r = subprocess.run([sys.executable, "-m", "groth_lhv", "inn22"], capture_output=True, text=True)
    assert r.returncode == 2
