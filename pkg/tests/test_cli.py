from __future__ import annotations

import json
import os
import subprocess
import sys

import pytest

from grassrec import cli
from grassrec.cli import EXIT_OK, EXIT_REFUSAL, EXIT_RESOURCE, EXIT_VIOLATION, main, render_text


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def run_json(capsys, *argv):
    code, out, err = run(capsys, *argv)
    return code, json.loads(out), err


def test_enumerate(capsys):
    code, rep, _ = run_json(capsys, "enumerate", "--n", "4", "--d", "2", "--q", "3")
    assert code == EXIT_OK
    assert rep["count"] == rep["gaussian_binomial"] == 130
    assert rep["degenerate"] + rep["nondegenerate"] == 130


@pytest.mark.parametrize("argv", [
    ["recover", "--n", "5", "--k", "3", "--q", "2"],                  # q <= n-k
    ["recover", "--n", "5", "--k", "3", "--q", "3", "--route", "tops"],  # k > n-3
    ["recover", "--n", "5", "--k", "3", "--q", "6"],                  # no field of order 6
    ["recover", "--n", "5", "--k", "1", "--q", "3"],                  # outside 1 < k < n-1
    ["counterexample", "--which", "2", "--n", "5", "--k", "2", "--q", "4"],
    ["graph", "--n", "4", "--k", "2", "--q", "3", "--threads", "0"],
])
def test_refusals(capsys, argv):
    code, rep, _ = run_json(capsys, *argv)
    assert code == EXIT_REFUSAL and rep["error"] == "refusal"


def test_exploratory_exits_refusal_but_reports(capsys):
    code, rep, _ = run_json(capsys, "recover", "--n", "5", "--k", "3", "--q", "2", "--exploratory")
    assert code == EXIT_REFUSAL and rep["asserted"] is False


def test_resource_abort(capsys):
    code, rep, _ = run_json(capsys, "graph", "--n", "5", "--k", "2", "--q", "3", "--cap", "10", "--no-cache")
    assert code == EXIT_RESOURCE and rep["error"] == "resource"
    code, rep, _ = run_json(capsys, "cliques", "--n", "4", "--k", "2", "--q", "3", "--limit", "5")
    assert code == EXIT_RESOURCE


def test_violation_exit(capsys, monkeypatch):
    from grassrec import recovery

    def broken(*a, **kw):
        return {"asserted": True, "isomorphic": False, "violations": ["forced"]}

    monkeypatch.setattr(recovery, "recover_and_verify", broken)
    code, rep, _ = run_json(capsys, "recover", "--n", "4", "--k", "2", "--q", "3")
    assert code == EXIT_VIOLATION and rep["violations"] == ["forced"]


def test_recover_pass_and_thread_determinism(capsys):
    outs = []
    for threads in ("1", "2"):
        code, out, _ = run(capsys, "recover", "--n", "5", "--k", "3", "--q", "3", "--threads", threads)
        assert code == EXIT_OK
        outs.append(out)
    assert outs[0] == outs[1]
    rep = json.loads(outs[0])
    assert rep["isomorphic"] and "runtime" not in json.dumps(rep)


def test_timings_opt_in(capsys):
    code, rep, _ = run_json(capsys, "recover", "--n", "4", "--k", "2", "--q", "3", "--timings")
    assert code == EXIT_OK and "runtime" in rep


def test_text_is_rendering_of_json(capsys):
    code, rep, _ = run_json(capsys, "cliques", "--n", "4", "--k", "2", "--q", "3")
    code2, text, _ = run(capsys, "cliques", "--n", "4", "--k", "2", "--q", "3", "--format", "text")
    assert code == code2 == EXIT_OK
    assert text == render_text(rep)


def test_cache_round_trip(capsys, tmp_path, monkeypatch):
    monkeypatch.setenv(cli.CACHE_ENV, str(tmp_path))
    argv = ["graph", "--n", "4", "--k", "2", "--q", "3", "--kind", "gamma"]
    code, first, err = run_json(capsys, *argv)
    assert code == EXIT_OK and "miss" in err
    code, second, err = run_json(capsys, *argv, "--check-cache")
    assert code == EXIT_OK and "hit" in err
    assert second["cache_matches_fresh_build"]
    assert first["structure_hash"] == second["structure_hash"]
    # stdout never mentions the cache
    assert {k: v for k, v in second.items() if k != "cache_matches_fresh_build"} == first


def test_stale_cache_is_rebuilt(capsys, tmp_path):
    argv = ["graph", "--n", "4", "--k", "2", "--q", "3", "--cache-dir", str(tmp_path)]
    _, first, _ = run_json(capsys, *argv)
    path = next(tmp_path.glob("delta-*.json"))
    data = json.loads(path.read_text())
    data["header"]["modulus_table_version"] += 1
    data["graph"]["edges"] = []
    path.write_text(json.dumps(data))
    code, again, err = run_json(capsys, *argv)
    assert code == EXIT_OK and "miss" in err
    assert again == first


def test_corrupt_cache_is_rebuilt(capsys, tmp_path):
    argv = ["graph", "--n", "4", "--k", "2", "--q", "3", "--cache-dir", str(tmp_path)]
    _, first, _ = run_json(capsys, *argv)
    next(tmp_path.glob("delta-*.json")).write_text("{not json")
    code, again, err = run_json(capsys, *argv)
    assert code == EXIT_OK and "miss" in err and again == first


def test_n4_censuses(capsys):
    code, rep, _ = run_json(capsys, "cliques", "--which", "delta-t-prime", "--n", "4", "--k", "2", "--q", "3")
    assert code == EXIT_OK and rep["checks"]["linear_count"] == 46
    code, rep, _ = run_json(capsys, "cliques", "--which", "delta-s-prime", "--n", "4", "--k", "2", "--q", "3")
    assert code == EXIT_OK and rep["kinds"]["isolated_maximal_star"] == 8
    code, rep, _ = run_json(capsys, "cliques", "--which", "delta-t-prime", "--n", "5", "--k", "2", "--q", "4")
    assert code == EXIT_REFUSAL


def test_counterexample_and_verify(capsys):
    code, rep, _ = run_json(capsys, "counterexample", "--which", "3", "--n", "5", "--k", "2", "--q", "3",
                            "--sweep-completions")
    assert code == EXIT_OK and rep["sweep"]["completion_independent"]
    code, rep, _ = run_json(capsys, "verify", "--suite", "index", "--n", "5", "--k", "3", "--q", "3")
    assert code == EXIT_OK and rep["index"] == 3
    code, rep, _ = run_json(capsys, "verify", "--suite", "props", "--n", "4", "--k", "2", "--q", "3",
                            "--samples", "300")
    assert code == EXIT_OK and rep["ok"]


def test_module_entry_point():
    env = {**os.environ, "GRASSREC_CACHE_DIR": ""}
    proc = subprocess.run([sys.executable, "-m", "grassrec", "enumerate", "--n", "3", "--d", "1", "--q", "2"],
                          capture_output=True, text=True, env=env)
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["count"] == 7
