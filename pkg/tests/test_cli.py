import json

import pytest

from chroma.cli import main
from chroma.graph import cycle


@pytest.fixture
def c6(tmp_path):
    p = tmp_path / "c6.edges"
    p.write_text(cycle(6).to_text())
    return str(p)


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_sample_equitable(capsys, c6):
    code, out, _ = run(capsys, "sample", "--graph", c6, "--q", "3", "--target", "equitable", "--seed", "1")
    assert code == 0
    doc = json.loads(out)
    assert doc["counts"] == [2, 2, 2] and doc["seed"] == 1
    assert {"coloring", "counts", "lambda", "iterations", "inside_proven_radius", "version", "config"} <= set(doc)


def test_missing_file_is_usage_error(capsys):
    code, _, err = run(capsys, "sample", "--graph", "nope.edges", "--q", "3")
    assert code == 1 and "not found" in err


def test_malformed_file(capsys, tmp_path):
    p = tmp_path / "bad.edges"
    p.write_text("3 2\n0 1\n")
    code, _, err = run(capsys, "scan", "--graph", str(p), "--q", "3")
    assert code == 1 and "line" in err


def test_infeasible_target_exit_2(capsys, c6):
    code, out, _ = run(capsys, "sample", "--graph", c6, "--q", "3", "--target", "6,0,0", "--max-iters", "40")
    assert code == 2 and json.loads(out)["success"] is False


def test_bad_arguments(capsys):
    assert run(capsys, "sample")[0] == 1
    assert run(capsys, "verify", "--suite", "bogus")[0] == 1


def test_outputs_are_byte_identical(capsys, tmp_path):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    main(["scan", "--graph", "clique:4", "--q", "8", "--samples", "500", "--seed", "3", "--out", str(a)])
    main(["scan", "--graph", "clique:4", "--q", "8", "--samples", "500", "--seed", "3", "--out", str(b)])
    assert a.read_bytes() == b.read_bytes()


def test_thread_count_does_not_change_results(capsys, monkeypatch):
    _, one, _ = run(capsys, "scan", "--graph", "petersen", "--q", "6", "--samples", "300", "--threads", "1")
    monkeypatch.setenv("CHROMA_THREADS", "4")
    _, env, _ = run(capsys, "scan", "--graph", "petersen", "--q", "6", "--samples", "300")
    d1, d2 = json.loads(one), json.loads(env)
    d1["config"].pop("threads"), d2["config"].pop("threads")
    assert d1 == d2 and d1["violations"] == []


def test_timing_flag(capsys):
    _, out, _ = run(capsys, "solve", "--graph", "cycle:12", "--q", "3", "--target", "4,4", "--timing")
    assert "wall_clock_s" in json.loads(out)
    _, out, _ = run(capsys, "solve", "--graph", "cycle:12", "--q", "3", "--target", "4,4")
    assert "wall_clock_s" not in json.loads(out)


def test_solve_reports_flags(capsys):
    code, out, _ = run(capsys, "solve", "--graph", "cycle:24", "--q", "3", "--target", "10,8", "--ball", "0.2")
    doc = json.loads(out)
    assert code == 2 and doc["inside_proven_radius"] is False and not doc["converged"]
    code, out, _ = run(capsys, "solve-lambda", "--graph", "cycle:12", "--q", "3", "--target", "4,4")
    assert code == 0


def test_mix_contraction(capsys):
    code, out, _ = run(capsys, "mix", "--graph", "cycle:8", "--q", "5", "--trials", "5000")
    doc = json.loads(out)
    assert code == 0 and doc["mean_change"] < 0 and doc["mixing_regime"] == "path-coupling"


def test_mix_tv(capsys):
    code, out, _ = run(capsys, "mix", "--graph", "cycle:6", "--q", "5", "--kind", "tv", "--trials", "5000")
    assert code == 0 and json.loads(out)["tv"] < 0.1


def test_lclt_verify_csv(capsys, tmp_path):
    dest = tmp_path / "l.csv"
    assert main(["lclt-verify", "--ns", "30", "--out", str(dest)]) == 0
    lines = dest.read_text().splitlines()
    assert lines[0] == "family,n,q,counts,exact,gaussian,relerr"
    assert len(lines) > 10


def test_verify_moments(capsys):
    code, out, err = run(capsys, "verify", "--suite", "moments")
    assert code == 0 and "PASS moments" in err
    assert json.loads(out)["passed"] is True


def test_verify_zerofree_petersen(capsys):
    code, _, _ = run(capsys, "verify", "--suite", "zerofree", "--graph", "petersen", "--q", "6", "--samples", "2000")
    assert code == 0
