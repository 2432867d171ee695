import numpy as np
import pytest
from hypothesis import given, strategies as st

from chroma.exact import partition_function, restricted_partition
from chroma.graph import (
    Graph, GraphFormatError, PartialColoring, SurgeryError, ZeroFreeConstants, build_Gk, build_Hk,
    clique, clique_union, cycle, detect_chain, generate, load_graph, merge_copies, path, petersen,
    pin_vertex, random_regularish, separation_set, star,
)

from strategies import small_graphs


def test_load_graph_basic():
    G = load_graph("3 2\n0 1\n# comment\n\n1 2  # trailing\n")
    assert G.n == 3 and G.sorted_edges() == [(0, 1), (1, 2)]
    assert G.max_degree == 2


@pytest.mark.parametrize("text, fragment", [
    ("", "empty"),
    ("3\n", "header"),
    ("3 2\n0 1\n", "declares 2 edges"),
    ("3 1\n0 x\n", "non-integer"),
    ("3 1\n0 3\n", "out of range"),
    ("3 1\n1 1\n", "self-loop"),
])
def test_load_graph_errors(text, fragment):
    with pytest.raises(GraphFormatError, match=fragment):
        load_graph(text)


def test_error_carries_line_number():
    with pytest.raises(GraphFormatError, match="line 3"):
        load_graph("4 2\n0 1\n2 9\n")


@given(small_graphs(max_n=8))
def test_text_roundtrip(G):
    assert load_graph(G.to_text()) == G


def test_generators():
    assert len(cycle(6).edges) == 6 and cycle(6).max_degree == 2
    assert path(4).sorted_edges() == [(0, 1), (1, 2), (2, 3)]
    assert len(clique(4).edges) == 6
    assert star(3).degree(0) == 3
    P = petersen()
    assert P.n == 10 and len(P.edges) == 15 and all(P.degree(v) == 3 for v in range(10))
    U = clique_union([3, 2], 2)
    assert U.n == 7 and len(U.edges) == 4
    assert generate("cycle:6") == cycle(6)
    assert generate("clique_union:3,2:2") == U


def test_random_regularish_respects_degree():
    G = random_regularish(20, 3, seed=7)
    assert G.max_degree <= 3
    assert G == random_regularish(20, 3, seed=7)
    with pytest.raises(ValueError):
        random_regularish(3, 3)


def test_generate_rejects_unknown():
    with pytest.raises(ValueError, match="unknown generator"):
        generate("wheel:5")


def test_detect_chain():
    assert detect_chain(cycle(5))[0] == "cycle"
    kind, order = detect_chain(Graph.from_edges(4, [(2, 0), (0, 3), (3, 1)]))
    assert kind == "path" and order in ([2, 0, 3, 1], [1, 3, 0, 2])
    assert detect_chain(petersen()) is None


@given(small_graphs(max_n=9))
def test_separation_set_distances(G):
    S = separation_set(G)
    for a in S:
        d = G.distances_from(a)
        assert all(d[b] < 0 or d[b] >= 4 for b in S if b != a)


def test_separation_set_on_cycle():
    assert separation_set(cycle(12)) == [0, 4, 8]


def test_constants():
    c = ZeroFreeConstants(3)
    assert c.eps_R == pytest.approx(1e-2 / 9)
    assert c.eps_I == pytest.approx(1e-4 / 81)
    assert c.radius_R == pytest.approx(2.7777777e-7, rel=1e-6)
    assert ZeroFreeConstants(1).radius_R == pytest.approx(2.25e-5)


def test_pin_vertex_shape():
    G = cycle(4)
    G2, tau = pin_vertex(G, PartialColoring.empty(4, 3), 0, 1)
    assert G2.n == 5 and len(G2.edges) == 4
    assert tau.pinned() == {3: 1, 4: 1}
    assert all(G2.degree(v) == 1 for v in (3, 4))


def test_pin_rejects_bad_and_pinned():
    G = path(2)
    tau = PartialColoring.from_dict(2, 3, {1: 0})
    with pytest.raises(SurgeryError, match="bad color"):
        pin_vertex(G, tau, 0, 0)
    with pytest.raises(SurgeryError, match="already pinned"):
        pin_vertex(G, tau, 1, 2)


@given(small_graphs(max_n=5), st.integers(0, 4), st.integers(0, 3))
def test_pinning_preserves_restricted_partition(G, v, c):
    """Z of the pinned graph is Z^(c) times λ_c^(deg-1) for the extra copies."""
    v %= G.n
    lam = np.array([1.3, 0.7, 1.1, 0.9])
    tau = PartialColoring.empty(G.n, 4)
    G2, tau2 = pin_vertex(G, tau, v, c)
    d = G.degree(v)
    lhs = partition_function(G2, lam, tau2)
    rhs = restricted_partition(G, v, c, lam) * (lam[c] ** (d - 1) if d else 1 / lam[c])
    assert lhs == pytest.approx(rhs, rel=1e-12)


def test_gk_hk_structure():
    G = clique(4)
    tau = PartialColoring.empty(4, 5)
    Gk, tk, log = build_Gk(G, tau, 0, 1, 2, 2, return_log=True)
    assert Gk.n == 5
    assert log.copies[1] is None
    assert tk.pinned() == {log.copies[0]: 1, log.copies[2]: 2}
    H0, h0 = build_Hk(G, tau, 0, 1, 2, 0)
    H3, h3 = build_Hk(G, tau, 0, 1, 2, 3)
    assert set(h0.pinned().values()) == {2} and set(h3.pinned().values()) == {1}
    with pytest.raises(SurgeryError):
        build_Gk(G, tau, 0, 1, 2, 4)


@given(small_graphs(max_n=6, min_n=2), st.integers(0, 5))
def test_merge_copies_inverts_split(G, v):
    v %= G.n
    tau = PartialColoring.empty(G.n, 8)
    _, _, log = build_Hk(G, tau, v, 0, 1, G.degree(v) // 2, return_log=True)
    G2, _, _ = build_Hk(G, tau, v, 0, 1, G.degree(v) // 2, return_log=True)
    assert merge_copies(G2, log) == G
