"""Graphs, generators, the edge-list format, and pinning surgery.

Vertices are ``0..n-1`` and colors are ``0..q-1`` throughout the package.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence

import numpy as np

NU = 0.9


class GraphFormatError(ValueError):
    """Raised for malformed edge-list documents."""


@dataclass(frozen=True)
class Graph:
    n: int
    edges: frozenset
    adjacency: tuple = field(compare=False, repr=False)
    max_degree: int = field(compare=False)

    @classmethod
    def from_edges(cls, n: int, edges: Iterable[Sequence[int]]) -> "Graph":
        if n < 0:
            raise ValueError("vertex count must be nonnegative")
        es = set()
        for u, v in edges:
            u, v = int(u), int(v)
            if u == v:
                raise ValueError(f"self-loop at vertex {u}")
            if not (0 <= u < n and 0 <= v < n):
                raise ValueError(f"edge ({u}, {v}) out of range for n={n}")
            es.add((min(u, v), max(u, v)))
        adj = [[] for _ in range(n)]
        for u, v in es:
            adj[u].append(v)
            adj[v].append(u)
        adjacency = tuple(tuple(sorted(a)) for a in adj)
        max_degree = max((len(a) for a in adjacency), default=0)
        return cls(n, frozenset(es), adjacency, max_degree)

    def degree(self, v: int) -> int:
        return len(self.adjacency[v])

    def neighbors(self, v: int) -> tuple:
        return self.adjacency[v]

    def sorted_edges(self) -> list:
        return sorted(self.edges)

    def neighbor_table(self) -> np.ndarray:
        """(n, max(Δ,1)) neighbor indices, padded with ``n``."""
        width = max(self.max_degree, 1)
        table = np.full((self.n, width), self.n, dtype=np.int64)
        for v, nb in enumerate(self.adjacency):
            table[v, : len(nb)] = nb
        return table

    def distances_from(self, source: int) -> list:
        dist = [-1] * self.n
        dist[source] = 0
        queue = deque([source])
        while queue:
            u = queue.popleft()
            for w in self.adjacency[u]:
                if dist[w] < 0:
                    dist[w] = dist[u] + 1
                    queue.append(w)
        return dist

    def to_text(self) -> str:
        lines = [f"{self.n} {len(self.edges)}"]
        lines += [f"{u} {v}" for u, v in self.sorted_edges()]
        return "\n".join(lines) + "\n"


def load_graph(text: str) -> Graph:
    """Parse the ``n m`` header followed by ``m`` lines of ``u v``.

    Blank lines and ``#`` comments are ignored. Duplicate edges collapse.
    """
    rows = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if line:
            rows.append((lineno, line))
    if not rows:
        raise GraphFormatError("empty document: expected header 'n m'")
    lineno, header = rows[0]
    parts = header.split()
    if len(parts) != 2 or not all(p.isdigit() for p in parts):
        raise GraphFormatError(f"line {lineno}: expected header 'n m', got {header!r}")
    n, m = int(parts[0]), int(parts[1])
    if len(rows) - 1 != m:
        raise GraphFormatError(
            f"line {lineno}: header declares {m} edges but {len(rows) - 1} edge lines follow"
        )
    edges = []
    for lineno, line in rows[1:]:
        parts = line.split()
        if len(parts) != 2:
            raise GraphFormatError(f"line {lineno}: expected 'u v', got {line!r}")
        try:
            u, v = int(parts[0]), int(parts[1])
        except ValueError:
            raise GraphFormatError(f"line {lineno}: non-integer vertex in {line!r}") from None
        if not (0 <= u < n and 0 <= v < n):
            raise GraphFormatError(f"line {lineno}: vertex index out of range [0, {n})")
        if u == v:
            raise GraphFormatError(f"line {lineno}: self-loop at vertex {u}")
        edges.append((u, v))
    return Graph.from_edges(n, edges)


def read_graph(path) -> Graph:
    with open(path) as fh:
        return load_graph(fh.read())


# -- generators ---------------------------------------------------------------


def cycle(n: int) -> Graph:
    if n < 3:
        raise ValueError("cycle needs n >= 3")
    return Graph.from_edges(n, [(i, (i + 1) % n) for i in range(n)])


def path(n: int) -> Graph:
    if n < 1:
        raise ValueError("path needs n >= 1")
    return Graph.from_edges(n, [(i, i + 1) for i in range(n - 1)])


def clique(k: int) -> Graph:
    if k < 1:
        raise ValueError("clique needs k >= 1")
    return Graph.from_edges(k, [(i, j) for i in range(k) for j in range(i + 1, k)])


def star(leaves: int) -> Graph:
    """K_{1,leaves} with center 0."""
    if leaves < 1:
        raise ValueError("star needs at least one leaf")
    return Graph.from_edges(leaves + 1, [(0, i) for i in range(1, leaves + 1)])


def clique_union(sizes: Sequence[int], r_isolated: int = 0) -> Graph:
    if any(s < 1 for s in sizes) or r_isolated < 0:
        raise ValueError("clique sizes must be positive and r_isolated nonnegative")
    edges, offset = [], 0
    for s in sizes:
        edges += [(offset + i, offset + j) for i in range(s) for j in range(i + 1, s)]
        offset += s
    return Graph.from_edges(offset + r_isolated, edges)


def petersen() -> Graph:
    outer = [(i, (i + 1) % 5) for i in range(5)]
    spokes = [(i, i + 5) for i in range(5)]
    inner = [(5 + i, 5 + (i + 2) % 5) for i in range(5)]
    return Graph.from_edges(10, outer + spokes + inner)


def random_regularish(n: int, max_degree: int, seed: int = 0) -> Graph:
    """Random graph with degrees capped at ``max_degree``.

    All vertex pairs are visited in a seeded random order and an edge is kept
    whenever both endpoints still have spare degree.
    """
    if n < 1 or max_degree < 1:
        raise ValueError("n and max_degree must be positive")
    if max_degree >= n:
        raise ValueError(f"max_degree={max_degree} infeasible for n={n}")
    rng = np.random.default_rng(seed)
    pairs = [(i, j) for i in range(n) for j in range(i + 1, n)]
    order = rng.permutation(len(pairs))
    deg = [0] * n
    edges = []
    for idx in order:
        u, v = pairs[idx]
        if deg[u] < max_degree and deg[v] < max_degree:
            edges.append((u, v))
            deg[u] += 1
            deg[v] += 1
    return Graph.from_edges(n, edges)


def _ints(s: str) -> list:
    return [int(x) for x in s.split(",") if x.strip()]


GENERATORS = {
    "cycle": lambda a: cycle(*a[0]),
    "path": lambda a: path(*a[0]),
    "clique": lambda a: clique(*a[0]),
    "star": lambda a: star(*a[0]),
    "petersen": lambda a: petersen(),
    "clique_union": lambda a: clique_union(a[0], *(a[1] if len(a) > 1 else [])),
    "random_regularish": lambda a: random_regularish(*a[0]),
}


def generate(spec: str) -> Graph:
    """Build a graph from a generator spec such as ``cycle:6``,
    ``clique_union:4,4:2``, ``random_regularish:20,3,7`` or ``petersen``."""
    kind, _, rest = spec.partition(":")
    kind = kind.strip().lower()
    if kind not in GENERATORS:
        raise ValueError(f"unknown generator {kind!r}; choose from {sorted(GENERATORS)}")
    args = [_ints(part) for part in rest.split(":")] if rest else [[]]
    try:
        return GENERATORS[kind](args)
    except TypeError as exc:
        raise ValueError(f"bad parameters for generator {kind!r}: {rest!r}") from exc


def detect_chain(G: Graph) -> Optional[tuple]:
    """Return ("cycle"|"path", vertex order) if G is a cycle or a path."""
    n = G.n
    if n == 0:
        return None
    if n == 1:
        return ("path", [0])
    degs = [G.degree(v) for v in range(n)]
    if all(d == 2 for d in degs) and len(G.edges) == n:
        kind, start = "cycle", 0
    elif sorted(degs)[:2] == [1, 1] and all(d <= 2 for d in degs) and len(G.edges) == n - 1:
        kind, start = "path", degs.index(1)
    else:
        return None
    order, prev, cur = [start], -1, start
    while len(order) < n:
        nxt = [w for w in G.adjacency[cur] if w != prev]
        if not nxt or nxt[0] == start:
            return None
        prev, cur = cur, nxt[0]
        order.append(cur)
    return (kind, order)


# -- separation set -----------------------------------------------------------


def separation_set(G: Graph) -> list:
    """Greedy set of vertices at pairwise distance >= 4 (lowest index first)."""
    available = [True] * G.n
    chosen = []
    for v in range(G.n):
        if not available[v]:
            continue
        chosen.append(v)
        dist = {v: 0}
        queue = deque([v])
        while queue:
            u = queue.popleft()
            available[u] = False
            if dist[u] == 3:
                continue
            for w in G.adjacency[u]:
                if w not in dist:
                    dist[w] = dist[u] + 1
                    queue.append(w)
    return chosen


# -- zero-freeness constants --------------------------------------------------


@dataclass(frozen=True)
class ZeroFreeConstants:
    delta: int
    nu: float = NU

    def __post_init__(self):
        if self.delta < 1:
            raise ValueError("Δ must be >= 1")

    @property
    def eps_R(self) -> float:
        return 1e-2 * self.delta ** -2

    @property
    def eps_I(self) -> float:
        return 1e-4 * self.delta ** -4

    @property
    def radius_R(self) -> float:
        return self.nu * self.eps_I / 4


# -- partial colorings and surgery --------------------------------------------


@dataclass(frozen=True)
class PartialColoring:
    """Per-vertex color or ``None`` (unpinned)."""

    assignment: tuple
    q: int

    @classmethod
    def empty(cls, n: int, q: int) -> "PartialColoring":
        return cls((None,) * n, q)

    @classmethod
    def from_dict(cls, n: int, q: int, pins: dict) -> "PartialColoring":
        a = [None] * n
        for v, c in pins.items():
            a[v] = c
        return cls(tuple(a), q)

    def __post_init__(self):
        for c in self.assignment:
            if c is not None and not 0 <= c < self.q:
                raise ValueError(f"color {c} outside [0, {self.q})")

    def __len__(self):
        return len(self.assignment)

    def __getitem__(self, v):
        return self.assignment[v]

    def pinned(self) -> dict:
        return {v: c for v, c in enumerate(self.assignment) if c is not None}

    def unpinned(self) -> list:
        return [v for v, c in enumerate(self.assignment) if c is None]

    def is_proper_on(self, G: Graph) -> bool:
        a = self.assignment
        return all(a[u] is None or a[v] is None or a[u] != a[v] for u, v in G.edges)

    def good_colors(self, G: Graph, v: int) -> list:
        bad = {self.assignment[w] for w in G.adjacency[v]}
        return [c for c in range(self.q) if c not in bad]


@dataclass(frozen=True)
class SurgeryLog:
    """``vertex_map[old] = new`` for surviving vertices; ``copies[l]`` is the
    copy attached to the l-th neighbor in the ordering (``None`` if deleted)."""

    vertex_map: dict
    copies: tuple


class SurgeryError(ValueError):
    pass


def _split_vertex(G: Graph, tau: PartialColoring, v: int, ordering, pins):
    """Replace ``v`` by one copy per neighbor; ``pins[l]`` is the copy's color or
    ``"delete"`` to drop the l-th copy."""
    nbrs = G.adjacency[v]
    if ordering is None:
        ordering = list(nbrs)
    if sorted(ordering) != list(nbrs):
        raise SurgeryError("ordering must be a permutation of the neighbors of v")
    survivors = [u for u in range(G.n) if u != v]
    vmap = {u: i for i, u in enumerate(survivors)}
    edges = [(vmap[a], vmap[b]) for a, b in G.edges if v not in (a, b)]
    assignment = [tau.assignment[u] for u in survivors]
    copies = []
    for w, pin in zip(ordering, pins):
        if pin == "delete":
            copies.append(None)
            continue
        idx = len(assignment)
        assignment.append(pin)
        edges.append((idx, vmap[w]))
        copies.append(idx)
    G2 = Graph.from_edges(len(assignment), edges)
    return G2, PartialColoring(tuple(assignment), tau.q), SurgeryLog(vmap, tuple(copies))


def _check_pin(G, tau, v, colors):
    if tau.assignment[v] is not None:
        raise SurgeryError(f"vertex {v} is already pinned")
    good = set(tau.good_colors(G, v))
    for c in colors:
        if c not in good:
            raise SurgeryError(f"bad color {c} for vertex {v}")


def pin_vertex(G: Graph, tau: PartialColoring, v: int, c: int, return_log: bool = False):
    """Pin ``v`` to ``c`` by splitting it into deg(v) pinned degree-1 copies.

    A degree-0 vertex simply disappears; its λ_c factor is not carried.
    """
    _check_pin(G, tau, v, [c])
    G2, tau2, log = _split_vertex(G, tau, v, None, [c] * G.degree(v))
    return (G2, tau2, log) if return_log else (G2, tau2)


def build_Gk(G, tau, v, i, j, k, ordering=None, return_log=False):
    """Copies v_1..v_{k-1} pinned to i, v_k deleted, v_{k+1}..v_d pinned to j (k is 1-based)."""
    d = G.degree(v)
    _check_pin(G, tau, v, [i, j])
    if not 1 <= k <= d:
        raise SurgeryError(f"k={k} outside 1..{d}")
    pins = [i] * (k - 1) + ["delete"] + [j] * (d - k)
    G2, tau2, log = _split_vertex(G, tau, v, ordering, pins)
    return (G2, tau2, log) if return_log else (G2, tau2)


def build_Hk(G, tau, v, i, j, k, ordering=None, return_log=False):
    """Copies v_1..v_k pinned to i and v_{k+1}..v_d pinned to j (0 <= k <= d)."""
    d = G.degree(v)
    _check_pin(G, tau, v, [i, j])
    if not 0 <= k <= d:
        raise SurgeryError(f"k={k} outside 0..{d}")
    G2, tau2, log = _split_vertex(G, tau, v, ordering, [i] * k + [j] * (d - k))
    return (G2, tau2, log) if return_log else (G2, tau2)


def merge_copies(G: Graph, log: SurgeryLog) -> Graph:
    """Inverse of a full split: identify the copies back into one vertex ``v``.

    The restored vertex is placed at the index it had before surgery.
    """
    inv = {new: old for old, new in log.vertex_map.items()}
    n_old = len(log.vertex_map) + 1
    v = next(u for u in range(n_old) if u not in log.vertex_map)
    copy_set = {c for c in log.copies if c is not None}
    edges = []
    for a, b in G.edges:
        a2 = v if a in copy_set else inv[a]
        b2 = v if b in copy_set else inv[b]
        edges.append((a2, b2))
    return Graph.from_edges(n_old, edges)

