"""Acceptance gate: one test per criterion, at the stated tolerance and budget.

A PASS/FAIL line per criterion is printed in the terminal summary
(and directly when run as ``python tests/test_acceptance.py``).
"""

import time

import pytest

from chroma import suites

RESULTS: dict = {}


def _run(key, desc, budget_s, fn, **kw):
    t0 = time.perf_counter()
    res = fn(**kw)
    elapsed = time.perf_counter() - t0
    ok = res.passed and elapsed < budget_s
    RESULTS[key] = f"{'PASS' if ok else 'FAIL'}  {key:>2}. {desc}  [{elapsed:.1f}s / {budget_s:.0f}s]"
    print(RESULTS[key])
    return res, elapsed


def test_01_moment_identities():
    res, t = _run(1, "finite-difference vs exact moments, rel err <= 1e-5", 30, suites.moments, tol=1e-5, h=1e-4)
    assert res.metrics["max_rel_error"] <= 1e-5 and len(res.metrics["instances"]) == 20
    assert t < 30


def test_02_recurrence():
    res, t = _run(2, "recurrence residual <= 1e-10 (1+|LHS|) on K4 q=8, C5 q=4", 10, suites.recurrence, tol=1e-10)
    assert res.metrics["max_scaled_residual"] <= 1e-10
    assert t < 10


def test_03_zero_freeness_scan():
    res, t = _run(3, "Petersen q=6, 1e4 polydisc samples at R(3): no violations", 60,
                  suites.zerofree, q=6, samples=10_000)
    assert res.metrics["violation_count"] == 0 and res.metrics["theorem_applies"]
    assert t < 60


def test_04_glauber_stationarity():
    res, t = _run(4, "Glauber C6 q=5 T=200, 1e5 samples: TV <= 0.02", 60,
                  suites.tv, n=6, q=5, T=200, samples=100_000, tol=0.02)
    assert res.metrics["tv"] <= 0.02
    assert t < 60


def test_05_path_coupling_contraction():
    res, t = _run(5, "C8 q=5 coupling, 1e5 trials: E[dd] <= -1/(10n) + 3 se", 60,
                  suites.contraction, n=8, q=5, trials=100_000)
    for r in res.metrics["runs"]:
        assert r["mean_change"] <= -1 / 80 + 3 * r["stderr"]
    assert [round(r["dist_inf"], 12) for r in res.metrics["runs"]] == [0.0, 0.09]
    assert t < 60


def test_06_rejection_correctness():
    res, t = _run(6, "rejection C6 q=3 equitable T=500, 1e4 acceptances: chi-square p > 1e-3", 300,
                  suites.rejection_gof, n=6, q=3, T=500, n_accept=10_000, alpha=1e-3)
    assert res.metrics["accepted"] == 10_000
    assert res.metrics["p_value"] > 1e-3
    assert t < 300


def test_07_acceptance_exponent():
    res, t = _run(7, "cycles q=3 n=12..48: slope of log P(equitable) = -1 +- 0.2", 60,
                  suites.exponent, q=3, ns=(12, 18, 24, 30, 36, 42, 48), slope_tol=0.2)
    assert abs(res.metrics["slope"] + 1) <= 0.2
    assert t < 60


def test_08_determinant_scaling():
    res, t = _run(8, "det Sigma slope 2 +- 0.2 (q=3), 3 +- 0.25 (q=4); min eig/n bounded below", 300,
                  suites.detscaling, ns=(16, 24, 32, 48, 64), tolerances=((3, 0.2), (4, 0.25)))
    q3, q4 = res.metrics["fits"]
    assert abs(q3["slope"] - 2) <= 0.2 and abs(q4["slope"] - 3) <= 0.25
    assert min(q3["min_eig_over_n"]) > 0.01 and min(q4["min_eig_over_n"]) > 0.01
    assert t < 300


def test_09_lclt_pointwise():
    res, t = _run(9, "LCLT cycles q=3 n=30,60,90: max rel err decreasing, <= 0.15 at n=90", 300,
                  suites.lclt_suite, family="cycle", q=3, ns=(30, 60, 90), window=1.0, guard=0.15)
    errs = res.metrics["max_rel_errors"]
    assert errs[0] > errs[1] > errs[2], f"max relative errors {errs}"
    assert errs[2] <= 0.15, f"max relative errors {errs}"
    assert t < 300


def test_10_characteristic_function_bound():
    res, t = _run(10, "c* > 0 on C5 q=4 and C6 q=3 (1e3-point grids); Taylor halving ratio >= 6", 60,
                  suites.charbound, min_ratio=6.0)
    rows = {(r["n"], r["q"]): r for r in res.metrics["instances"]}
    for key in ((5, 4), (6, 3)):
        assert rows[key]["c_star"] > 0 and rows[key]["points"] >= 1000
    assert all(min(r["taylor_ratios"]) >= 6 for r in rows.values())
    assert t < 60


def test_11_solver_round_trip():
    res, t = _run(11, "C12 q=3, 20 lambda* in the 0.2 ball: round trip and Jacobian within 1e-4", 60,
                  suites.solver_suite, n=12, q=3, count=20, ball=0.2, tol=1e-4)
    assert res.metrics["max_lambda_error"] <= 1e-4
    assert res.metrics["max_jacobian_rel_error"] <= 1e-4
    assert t < 60


def test_12_skewed_sampling():
    res, t = _run(12, "C24 q=3 target (10,8,6), newton, ball 0.2: proper n-coloring, outside proven radius", 300,
                  suites.skewed, n=24, q=3, target=(10, 8, 6), ball=0.2)
    m = res.metrics
    assert m["success"] and m["counts"] == [10, 8, 6]
    assert m["inside_proven_radius"] is False
    assert res.passed
    assert t < 300


if __name__ == "__main__":
    import sys

    sys.exit(pytest.main([__file__, "-q", "-p", "no:cacheprovider"]))
