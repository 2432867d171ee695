"""Fugacity-weighted Glauber dynamics, path coupling and TV experiments.

Chains are advanced in blocks of up to ``BLOCK`` parallel copies. Block ``b``
of a run seeded with ``seed`` draws from ``numpy.random.default_rng([seed, b])``,
so every experiment is bit-reproducible for a given seed regardless of how
many blocks are needed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .exact import exact_pmf
from .graph import Graph

BLOCK = 4096


class InsufficientColors(ValueError):
    pass


def mixing_regime(q: int, delta: int) -> str:
    """Label the guarantee behind Glauber at (q, Δ).

    Path coupling covers q ≥ 2Δ+1. Between 11Δ/6 and 2Δ runs are allowed but
    flagged ``unproven``; below that there is ``no-guarantee``.
    """
    if q >= 2 * delta + 1:
        return "path-coupling"
    if 6 * q >= 11 * delta:
        return "unproven"
    return "no-guarantee"


def block_rng(seed: int, block: int) -> np.random.Generator:
    return np.random.default_rng([int(seed), int(block)])


def init_coloring(G: Graph, q: int, seed: int = 0) -> np.ndarray:
    """Greedy proper coloring in vertex order, lowest available color first."""
    col = np.full(G.n, -1, dtype=np.int64)
    for v in range(G.n):
        used = {int(col[w]) for w in G.adjacency[v]}
        c = next((c for c in range(q) if c not in used), None)
        if c is None:
            raise InsufficientColors("insufficient colors for greedy init")
        col[v] = c
    return col


def class_vector(coloring, q: int) -> np.ndarray:
    return np.bincount(np.asarray(coloring), minlength=q)


def is_proper(G: Graph, coloring) -> bool:
    c = np.asarray(coloring)
    return all(c[u] != c[v] for u, v in G.edges)


# -- single chain -------------------------------------------------------------


@dataclass
class ChainState:
    coloring: np.ndarray
    rng: np.random.Generator
    steps: int = 0


def available(G: Graph, q: int, coloring, v: int) -> np.ndarray:
    mask = np.ones(q, dtype=bool)
    for w in G.adjacency[v]:
        mask[coloring[w]] = False
    return mask


def step(G: Graph, lam, state: ChainState) -> ChainState:
    lam = np.asarray(lam, dtype=float)
    q = len(lam)
    v = int(state.rng.integers(G.n))
    w = lam * available(G, q, state.coloring, v)
    total = w.sum()
    assert total > 0, "empty list of available colors"
    c = int(state.rng.choice(q, p=w / total))
    coloring = state.coloring.copy()
    coloring[v] = c
    return ChainState(coloring, state.rng, state.steps + 1)


# -- vectorized chains --------------------------------------------------------


def _pick(cum: np.ndarray, u: np.ndarray, w: np.ndarray) -> np.ndarray:
    """Index of the first cumulative weight exceeding u, clamped to the last positive weight."""
    idx = (cum <= u[:, None]).sum(axis=1)
    last = w.shape[1] - 1 - np.argmax(w[:, ::-1] > 0, axis=1)
    return np.minimum(idx, last)


class _Kernel:
    def __init__(self, G: Graph, lam):
        self.G = G
        self.lam = np.asarray(lam, dtype=float)
        if np.any(self.lam <= 0):
            raise ValueError("Glauber dynamics needs strictly positive λ")
        self.q = len(self.lam)
        self.nbr = G.neighbor_table()

    def padded(self, X: np.ndarray) -> np.ndarray:
        C = len(X)
        out = np.empty((C, self.G.n + 1), dtype=np.int64)
        out[:, :-1] = X
        out[:, -1] = self.q
        return out

    def avail_mask(self, P: np.ndarray, v: np.ndarray) -> np.ndarray:
        C = len(P)
        rows = np.arange(C)[:, None]
        blocked = np.zeros((C, self.q + 1), dtype=bool)
        blocked[rows, P[rows, self.nbr[v]]] = True
        return ~blocked[:, : self.q]

    def advance(self, P: np.ndarray, T: int, rng: np.random.Generator) -> None:
        C = len(P)
        n = self.G.n
        rows = np.arange(C)
        for _ in range(T):
            v = rng.integers(n, size=C)
            u = rng.random(C)
            w = self.lam * self.avail_mask(P, v)
            cum = np.cumsum(w, axis=1)
            P[rows, v] = _pick(cum, u * cum[:, -1], w)


def run_chains(G: Graph, q: int, lam, T: int, n_chains: int, seed: int = 0, init=None) -> np.ndarray:
    """Final colorings of ``n_chains`` independent chains after T steps each."""
    lam = np.asarray(lam, dtype=float)
    if len(lam) != q:
        raise ValueError("λ must have length q")
    start = init_coloring(G, q) if init is None else np.asarray(init, dtype=np.int64)
    kernel = _Kernel(G, lam)
    out = np.empty((n_chains, G.n), dtype=np.int64)
    for b, s in enumerate(range(0, n_chains, BLOCK)):
        C = min(BLOCK, n_chains - s)
        P = kernel.padded(np.broadcast_to(start, (C, G.n)))
        if G.n:
            kernel.advance(P, T, block_rng(seed, b))
        out[s : s + C] = P[:, :-1]
    return out


def run(G: Graph, q: int, lam, T: int, seed: int = 0) -> np.ndarray:
    return run_chains(G, q, lam, T, 1, seed)[0]


# -- coupling -----------------------------------------------------------------

NEUTRAL, GOOD, BAD = 0, 1, 2
MOVE_NAMES = {NEUTRAL: "distance-fixing", GOOD: "good", BAD: "bad"}


@dataclass(frozen=True)
class CouplingRecord:
    distance_before: int
    distance_after: int
    move: str


def _coupled(kernel: _Kernel, PX, PY, rng):
    """One coupled transition for every row; returns move classes."""
    C = len(PX)
    n = kernel.G.n
    lam = kernel.lam
    rows = np.arange(C)
    v = rng.integers(n, size=C)
    u = rng.random(C)
    LX = kernel.avail_mask(PX, v)
    LY = kernel.avail_mask(PY, v)
    wX, wY = lam * LX, lam * LY
    SX, SY = wX.sum(axis=1), wY.sum(axis=1)
    shared = lam * (LX & LY) / np.maximum(SX, SY)[:, None]
    ps = shared.sum(axis=1)
    rX = np.clip(wX / SX[:, None] - shared, 0, None)
    rY = np.clip(wY / SY[:, None] - shared, 0, None)
    in_shared = u < ps
    cs = _pick(np.cumsum(shared, axis=1), u, np.where(in_shared[:, None], shared, 1.0))
    ur = u - ps
    cx = np.where(in_shared, cs, _pick(np.cumsum(rX, axis=1), ur, np.where(in_shared[:, None], 1.0, rX)))
    cy = np.where(in_shared, cs, _pick(np.cumsum(rY, axis=1), ur, np.where(in_shared[:, None], 1.0, rY)))

    differ = PX[:, :-1] != PY[:, :-1]
    nb = kernel.nbr[v]
    touches = np.zeros(C, dtype=bool)
    diff_pad = np.concatenate([differ, np.zeros((C, 1), bool)], axis=1)
    touches = diff_pad[rows[:, None], nb].any(axis=1)
    move = np.where(differ[rows, v], GOOD, np.where(touches, BAD, NEUTRAL))
    PX[rows, v] = cx
    PY[rows, v] = cy
    return move


def coupled_step(G: Graph, lam, X, Y, rng=None):
    """One coupled Glauber step from (X, Y) with the same vertex in both chains.

    Common colors are matched with probability λ_c / max(ΣL_X λ, ΣL_Y λ); the
    leftover mass of the two chains is paired through a single uniform over
    their residual distributions, with colors in ascending order.
    """
    rng = np.random.default_rng(rng) if not isinstance(rng, np.random.Generator) else rng
    X = np.asarray(X, dtype=np.int64)
    Y = np.asarray(Y, dtype=np.int64)
    d0 = int((X != Y).sum())
    if d0 == 0:
        st = step(G, lam, ChainState(X.copy(), rng))
        return st.coloring, st.coloring.copy(), CouplingRecord(0, 0, MOVE_NAMES[NEUTRAL])
    kernel = _Kernel(G, lam)
    PX, PY = kernel.padded(X[None, :]), kernel.padded(Y[None, :])
    move = _coupled(kernel, PX, PY, rng)[0]
    X1, Y1 = PX[0, :-1], PY[0, :-1]
    return X1, Y1, CouplingRecord(d0, int((X1 != Y1).sum()), MOVE_NAMES[int(move)])


def _adjacent_pairs(kernel: _Kernel, PX: np.ndarray, rng) -> np.ndarray:
    """Y differing from X at one vertex chosen among those with an alternative proper color;
    the new color is drawn from the alternatives with λ-weights."""
    C = len(PX)
    n, q = kernel.G.n, kernel.q
    alt = np.zeros((C, n, q), dtype=bool)
    for v in range(n):
        mask = kernel.avail_mask(PX, np.full(C, v))
        mask[np.arange(C), PX[:, v]] = False
        alt[:, v] = mask
    has_alt = alt.any(axis=2)
    if not has_alt.all(axis=1).any() and not has_alt.any():
        raise ValueError("no vertex admits an alternative color")
    u1 = rng.random(C)
    cnt = has_alt.sum(axis=1)
    k = np.minimum((u1 * cnt).astype(np.int64), cnt - 1)
    csum = np.cumsum(has_alt, axis=1)
    v0 = (csum <= k[:, None]).sum(axis=1)
    rows = np.arange(C)
    w = kernel.lam * alt[rows, v0]
    cum = np.cumsum(w, axis=1)
    c = _pick(cum, rng.random(C) * cum[:, -1], w)
    PY = PX.copy()
    PY[rows, v0] = c
    return PY


@dataclass
class ContractionEstimate:
    n: int
    trials: int
    mean_distance: float
    stderr: float
    mean_change: float
    bound: float
    move_counts: dict = field(default_factory=dict)

    @property
    def satisfied(self) -> bool:
        return self.mean_change <= self.bound + 3 * self.stderr

    def to_json(self) -> dict:
        return {
            "n": self.n, "trials": self.trials, "mean_distance": self.mean_distance,
            "stderr": self.stderr, "mean_change": self.mean_change,
            "bound": self.bound, "satisfied": self.satisfied, "move_counts": self.move_counts,
        }


def contraction_experiment(G: Graph, q: int, lam, trials: int, seed: int = 0,
                           burn_in: Optional[int] = None, c: float = 0.1) -> ContractionEstimate:
    """Estimate E[d(X₁, Y₁)] for adjacent pairs (d(X₀, Y₀) = 1) under one coupled step.

    X₀ is a Glauber sample after ``burn_in`` steps (default ⌈20 n ln n⌉).
    The bound compared against is E[d₁ - d₀] ≤ -c/n.
    """
    lam = np.asarray(lam, dtype=float)
    n = G.n
    if burn_in is None:
        burn_in = math.ceil(20 * n * math.log(max(n, 2)))
    kernel = _Kernel(G, lam)
    start = init_coloring(G, q)
    dists = np.empty(trials)
    moves = np.zeros(3, dtype=np.int64)
    for b, s in enumerate(range(0, trials, BLOCK)):
        C = min(BLOCK, trials - s)
        rng = block_rng(seed, b)
        PX = kernel.padded(np.broadcast_to(start, (C, n)))
        kernel.advance(PX, burn_in, rng)
        PY = _adjacent_pairs(kernel, PX, rng)
        mv = _coupled(kernel, PX, PY, rng)
        dists[s : s + C] = (PX[:, :-1] != PY[:, :-1]).sum(axis=1)
        moves += np.bincount(mv, minlength=3)
    mean = float(dists.mean())
    se = float(dists.std(ddof=1) / math.sqrt(trials)) if trials > 1 else math.inf
    return ContractionEstimate(n, trials, mean, se, mean - 1.0, -c / n,
                               {MOVE_NAMES[k]: int(moves[k]) for k in range(3)})


# -- total variation ----------------------------------------------------------


@dataclass
class TvEstimate:
    tv: float
    T: int
    n_samples: int
    support_size: int
    noise_scale: float

    def to_json(self) -> dict:
        return {"tv": self.tv, "T": self.T, "n_samples": self.n_samples,
                "support_size": self.support_size, "noise_scale": self.noise_scale,
                "note": "TV on the class-vector pushforward (a lower bound on coloring-space TV)"}


def empirical_class_pmf(colorings: np.ndarray, q: int) -> dict:
    counts = np.stack([class_vector(c, q) for c in colorings]) if len(colorings) else np.zeros((0, q), int)
    keys, freq = np.unique(counts[:, : q - 1], axis=0, return_counts=True)
    total = freq.sum()
    return {tuple(map(int, k)): f / total for k, f in zip(keys, freq)}


def tv_to_exact(empirical: dict, exact: dict) -> float:
    keys = set(empirical) | set(exact)
    return 0.5 * sum(abs(empirical.get(k, 0.0) - exact.get(k, 0.0)) for k in keys)


def tv_distance_experiment(G: Graph, q: int, lam, T: int, n_samples: int, seed: int = 0) -> TvEstimate:
    exact = exact_pmf(G, q, lam).as_dict()
    finals = run_chains(G, q, lam, T, n_samples, seed)
    emp = empirical_class_pmf(finals, q)
    noise = 0.5 * sum(math.sqrt(2 * p / (math.pi * n_samples)) for p in exact.values())
    return TvEstimate(tv_to_exact(emp, exact), T, n_samples, len(exact), noise)
