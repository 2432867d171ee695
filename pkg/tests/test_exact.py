import json
import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from chroma.exact import (
    EnumerationCapExceeded, IllDefinedError, char_function, count_table, cycle_count_dp, exact_moments,
    exact_pmf, finite_diff_moments, marginal_ratio, partition_function, pseudo_probability,
    recurrence_sides, restricted_partition, verify_recurrence,
)
from chroma.graph import Graph, PartialColoring, clique, cycle, path, petersen

import oracle
from strategies import fugacities, small_graphs

# Frozen from the brute-force oracle (tests/oracle.py) and chromatic polynomials.
PETERSEN_6 = 3868080
C4_Q4 = 84


def test_closed_forms():
    assert partition_function(clique(3), np.ones(3)) == 6
    assert partition_function(cycle(4), np.ones(4)) == C4_Q4
    assert partition_function(Graph.from_edges(1, []), [2.0, 3.0]) == 5
    assert count_table(petersen(), 6).total == PETERSEN_6


def test_empty_graph_and_infeasible():
    assert partition_function(Graph.from_edges(0, []), [1.0, 2.0]) == 1
    assert partition_function(clique(4), np.ones(3)) == 0
    with pytest.raises(ValueError, match="no proper"):
        exact_pmf(clique(4), 3, np.ones(3))


@given(small_graphs(max_n=6), fugacities(3))
def test_partition_matches_bruteforce(G, lam):
    assert partition_function(G, lam) == pytest.approx(oracle.Z(G, lam), rel=1e-10)


@given(small_graphs(max_n=5), st.lists(st.complex_numbers(max_magnitude=2, allow_nan=False, allow_infinity=False),
                                       min_size=3, max_size=3))
def test_complex_partition_matches_bruteforce(G, lam):
    assert partition_function(G, lam) == pytest.approx(oracle.Z(G, lam), rel=1e-9, abs=1e-9)


@given(small_graphs(max_n=5), st.integers(0, 4), st.integers(0, 2))
def test_pinned_partition_matches_bruteforce(G, v, c):
    v %= G.n
    tau = PartialColoring.from_dict(G.n, 3, {v: c})
    lam = [1.2, 0.8, 1.0]
    assert partition_function(G, lam, tau) == pytest.approx(oracle.Z(G, lam, {v: c}), rel=1e-10)


def test_compensated_agrees():
    lam = np.array([1.1, 0.95, 1.0, 1.02])
    G = cycle(7)
    assert partition_function(G, lam, compensated=True) == pytest.approx(partition_function(G, lam), rel=1e-13)


def test_cap():
    with pytest.raises(EnumerationCapExceeded, match="DP"):
        count_table(cycle(30), 4)


@pytest.mark.parametrize("n", [3, 4, 7])
@pytest.mark.parametrize("q", [3, 4])
def test_chromatic_counts(n, q):
    assert count_table(cycle(n), q).total == oracle.chromatic_cycle(n, q)
    assert count_table(path(n), q).total == oracle.chromatic_path(n, q)


def test_dp_matches_enumeration():
    lam = np.array([1.2, 0.9, 1.0])
    for G, kind in ((cycle(6), "cycle"), (path(7), "path")):
        a = exact_pmf(G, 3, lam, method="enumerate")
        b = cycle_count_dp(G.n, 3, lam, kind)
        assert a.as_dict().keys() == b.as_dict().keys()
        for k, p in a.as_dict().items():
            assert b[k] == pytest.approx(p, rel=1e-12)
        assert b.log_z == pytest.approx(a.log_z, rel=1e-13)


def test_pmf_matches_bruteforce():
    G = cycle(5)
    lam = [1.3, 1.0, 0.8, 1.0]
    ref = oracle.class_pmf(G, lam)
    pmf = exact_pmf(G, 4, lam)
    assert sum(pmf.probs) == pytest.approx(1.0)
    for k, p in ref.items():
        assert pmf[k] == pytest.approx(p, rel=1e-12)


def test_pmf_json_schema():
    doc = exact_pmf(cycle(4), 3, np.ones(3)).to_json()
    assert set(doc) == {"n", "q", "lambda", "pmf", "mu", "sigma"}
    json.dumps(doc)
    assert sum(e["p"] for e in doc["pmf"]) == pytest.approx(1)


def test_dp_large_n():
    pmf = cycle_count_dp(64, 4, np.ones(4))
    assert np.allclose(pmf.moments().mu, 16)
    assert math.isfinite(pmf.log_z)


def test_symmetric_moments():
    m = exact_moments(cycle(6), 3, np.ones(3))
    assert np.allclose(m.mu, 2)
    assert np.allclose(m.sigma, m.sigma.T)
    assert np.allclose(m.full_sigma().sum(axis=1), 0)


@given(small_graphs(max_n=6, min_n=2), st.sampled_from([4, 5]))
def test_finite_differences_match_moments(G, q):
    lam = np.linspace(0.9, 1.2, q)
    ex = exact_moments(G, q, lam)
    fd = finite_diff_moments(G, q, lam)
    assert np.allclose(fd.mu, ex.mu, rtol=1e-6, atol=1e-8)
    assert np.allclose(fd.sigma, ex.sigma, rtol=1e-5, atol=1e-6)


def test_finite_difference_step_validation():
    with pytest.raises(ValueError):
        finite_diff_moments(cycle(4), 3, np.ones(3), h=0.5)


def test_marginal_ratio_and_bad_colors():
    G = path(2)
    lam = [2.0, 1.0, 1.0]
    # σ(0)=0 forces σ(1)∈{1,2}; σ(0)=1 forces σ(1)∈{0,2}
    assert marginal_ratio(G, 0, 0, 1, lam) == pytest.approx(2 * 2 / 3)
    tau = PartialColoring.from_dict(2, 3, {1: 0})
    assert restricted_partition(G, 0, 0, lam, tau) == 0
    with pytest.raises(IllDefinedError):
        marginal_ratio(G, 0, 1, 0, lam, tau)


def test_pseudo_probability_pinned_indicator():
    tau = PartialColoring.from_dict(3, 3, {2: 1})
    assert pseudo_probability(path(3), 2, 1, np.ones(3), tau) == 1
    assert pseudo_probability(path(3), 2, 0, np.ones(3), tau) == 0


@pytest.mark.parametrize("G, q", [(clique(4), 8), (cycle(5), 4), (petersen(), 6)])
def test_recurrence_holds(G, q):
    lam = np.linspace(0.9, 1.1, q)
    for i, j in ((0, 1), (2, q - 1)):
        lhs, rhs = recurrence_sides(G, 0, i, j, lam)
        assert abs(lhs - rhs) <= 1e-10 * (1 + abs(lhs))


def test_recurrence_with_pins_and_ordering():
    G = cycle(5)
    tau = PartialColoring.from_dict(5, 4, {2: 3})
    lam = np.array([1.1, 1.0, 0.9, 1.05])
    assert verify_recurrence(G, 0, 0, 1, lam, tau, ordering=[4, 1]) < 1e-12


def test_recurrence_complex():
    lam = 1 + 0.01 * np.exp(1j * np.arange(4))
    assert verify_recurrence(cycle(5), 1, 0, 2, lam) < 1e-12


def test_char_function():
    G = cycle(5)
    lam = np.ones(4)
    assert char_function(G, 4, lam, np.zeros(4)) == pytest.approx(1)
    s = 0.37
    assert char_function(G, 4, lam, np.full(4, s)) == pytest.approx(np.exp(1j * s * 5))
    pmf = exact_pmf(G, 4, lam)
    t = np.array([0.3, -1.1, 2.0])
    assert char_function(G, 4, lam, t) == pytest.approx(pmf.characteristic(t), abs=1e-12)
    single = Graph.from_edges(1, [])
    assert abs(char_function(single, 2, [1.0, 1.0], [math.pi, 0.0])) < 1e-15


@given(st.lists(st.floats(-math.pi, math.pi), min_size=2, max_size=2))
def test_char_function_bounded(t):
    assert abs(char_function(cycle(5), 3, np.ones(3), t)) <= 1 + 1e-12
