"""Exact partition functions, class-size distributions and moments.

Two exact backends are provided. Enumeration walks vertices in index order,
tries colors in increasing order, prunes improper extensions and keeps the
running class-count vector of every surviving partial coloring. Partial
colorings that agree on every vertex still adjacent to an uncolored one and
on their counts are merged with a multiplicity, so the work is bounded by the
number of distinct frontier states rather than by q^n. The result is
a :class:`CountTable` (number of proper colorings per class-count vector),
from which Z can be evaluated at any complex fugacity. Paths and cycles too
large to enumerate go through a transfer DP over (first color, last color,
class counts).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Optional

import numpy as np
from scipy.special import logsumexp

from .graph import Graph, PartialColoring, build_Gk, detect_chain

DEFAULT_CAP = 10 ** 8
ZERO_FLOOR = 1e-30
_DP_CELL_CAP = 3 * 10 ** 7


class EnumerationCapExceeded(RuntimeError):
    pass


class IllDefinedError(ArithmeticError):
    """A quotient of partition functions has a numerically zero denominator."""


# -- enumeration --------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class CountTable:
    """Proper colorings grouped by full class-count vector.

    ``counts[k]`` is a length-q count vector and ``mult[k]`` the number of
    proper colorings (agreeing with the pins) that realize it.
    """

    n: int
    q: int
    counts: np.ndarray
    mult: np.ndarray

    @property
    def total(self) -> int:
        return int(self.mult.sum())

    def evaluate(self, lam, compensated: bool = False) -> complex:
        lam = np.asarray(lam, dtype=complex)
        if compensated:
            terms = self.mult * np.prod(lam[None, :] ** self.counts, axis=1)
            return complex(math.fsum(terms.real), math.fsum(terms.imag))
        return complex(self.evaluate_many(lam[None, :])[0])

    def evaluate_many(self, lams, batch: int = 2048) -> np.ndarray:
        """Z at each row of ``lams`` (shape (S, q))."""
        lams = np.atleast_2d(np.asarray(lams, dtype=complex))
        out = np.empty(len(lams), dtype=complex)
        if len(self.mult) == 0:
            out[:] = 0.0
            return out
        mult = self.mult.astype(float)
        cnt = self.counts.astype(float)
        for s in range(0, len(lams), batch):
            block = lams[s : s + batch]
            if np.any(block == 0):
                terms = np.prod(block[:, None, :] ** self.counts[None, :, :], axis=2)
                out[s : s + batch] = terms @ mult
            else:
                out[s : s + batch] = mult @ np.exp(cnt @ np.log(block).T)
        return out

    def log_weights(self, lam) -> np.ndarray:
        lam = np.asarray(lam, dtype=float)
        return np.log(self.mult.astype(float)) + self.counts @ np.log(lam)

    def log_partition(self, lam) -> float:
        if len(self.mult) == 0:
            return -math.inf
        return float(logsumexp(self.log_weights(lam)))


def _check_cap(q: int, free: int, cap: float):
    if free * math.log(q) > math.log(cap) + 1e-12:
        raise EnumerationCapExceeded(
            f"q^unpinned = {q}^{free} exceeds the enumeration cap {cap:.3g}; "
            "use the path/cycle DP (exact_pmf on a path or cycle) or Glauber sampling"
        )


def _merge_rows(cols, cnts, mult, q, n):
    """Collapse rows with identical (frontier colors, counts), summing multiplicities."""
    f = cols.shape[1]
    if f * math.log(q) + q * math.log(n + 1) < 62 * math.log(2):
        key = np.zeros(len(cols), dtype=np.int64)
        for k in range(f):
            key = key * q + cols[:, k]
        for c in range(q):
            key = key * (n + 1) + cnts[:, c]
        _, first, inv = np.unique(key, return_index=True, return_inverse=True)
    else:
        rows = np.concatenate([cols.astype(np.int64), cnts.astype(np.int64)], axis=1)
        _, first, inv = np.unique(rows, axis=0, return_index=True, return_inverse=True)
        inv = inv.reshape(-1)
    merged = np.zeros(len(first), dtype=np.int64)
    np.add.at(merged, inv, mult)
    return cols[first], cnts[first], merged


@lru_cache(maxsize=4096)
def _count_table(G: Graph, q: int, assignment: tuple, cap: float) -> CountTable:
    n = G.n
    free = sum(1 for c in assignment if c is None)
    _check_cap(q, free, cap)
    # a vertex leaves the frontier once its last later neighbor is colored
    last_use = [max([w for w in G.adjacency[u] if w > u], default=-1) for u in range(n)]
    cols = np.zeros((1, 0), dtype=np.int8)
    cnts = np.zeros((1, q), dtype=np.int16)
    mult = np.ones(1, dtype=np.int64)
    frontier = ()
    for v in range(n):
        pos = {u: k for k, u in enumerate(frontier)}
        earlier = [pos[u] for u in G.adjacency[v] if u < v]
        choices = range(q) if assignment[v] is None else (assignment[v],)
        new_cols, new_cnts, new_mult = [], [], []
        for c in choices:
            ok = np.all(cols[:, earlier] != c, axis=1) if earlier else np.ones(len(cols), bool)
            if not ok.any():
                continue
            kn = cnts[ok].copy()
            kn[:, c] += 1
            kc = cols[ok]
            new_cols.append(np.concatenate([kc, np.full((len(kc), 1), c, np.int8)], axis=1))
            new_cnts.append(kn)
            new_mult.append(mult[ok])
        if not new_cols:
            return CountTable(n, q, np.zeros((0, q), dtype=np.int64), np.zeros(0, dtype=np.int64))
        cols = np.concatenate(new_cols)
        cnts = np.concatenate(new_cnts)
        mult = np.concatenate(new_mult)
        frontier = frontier + (v,)
        keep = [k for k, u in enumerate(frontier) if last_use[u] > v]
        frontier = tuple(frontier[k] for k in keep)
        cols = cols[:, keep]
        cols, cnts, mult = _merge_rows(cols, cnts, mult, q, n)
    order = np.lexsort(cnts.T[::-1])
    return CountTable(n, q, cnts[order].astype(np.int64), mult[order])


def count_table(G: Graph, q: int, tau: Optional[PartialColoring] = None, cap: float = DEFAULT_CAP) -> CountTable:
    assignment = tau.assignment if tau is not None else (None,) * G.n
    if len(assignment) != G.n:
        raise ValueError("partial coloring length does not match the graph")
    return _count_table(G, q, assignment, float(cap))


def _pinned(tau, n, q, v=None, c=None):
    a = list(tau.assignment) if tau is not None else [None] * n
    if v is not None:
        a[v] = c
    return PartialColoring(tuple(a), q)


def partition_function(G: Graph, lam, tau: Optional[PartialColoring] = None, *,
                       cap: float = DEFAULT_CAP, compensated: bool = False) -> complex:
    """Z_{G,τ}(λ): weighted sum over proper colorings agreeing with τ."""
    lam = np.asarray(lam, dtype=complex)
    return count_table(G, len(lam), tau, cap).evaluate(lam, compensated)


def restricted_partition(G: Graph, v: int, i: int, lam, tau: Optional[PartialColoring] = None, *,
                         cap: float = DEFAULT_CAP) -> complex:
    """Z^{(i)}_{G,v}(λ): the part of Z with σ(v) = i (0 for bad colors)."""
    lam = np.asarray(lam, dtype=complex)
    q = len(lam)
    if tau is not None and tau.assignment[v] is not None:
        raise ValueError(f"vertex {v} is pinned")
    return count_table(G, q, _pinned(tau, G.n, q, v, i), cap).evaluate(lam)


def _is_zero(z: complex, scale: float) -> bool:
    return abs(z) < ZERO_FLOOR * max(scale, 1.0)


def marginal_ratio(G: Graph, v: int, i: int, j: int, lam, tau=None, *, cap=DEFAULT_CAP) -> complex:
    """R^{(i,j)}_{G,v}(λ) = Z^{(i)} / Z^{(j)}."""
    zi = restricted_partition(G, v, i, lam, tau, cap=cap)
    zj = restricted_partition(G, v, j, lam, tau, cap=cap)
    z = partition_function(G, lam, tau, cap=cap)
    if zj == 0 or abs(zj) < ZERO_FLOOR * abs(z):
        raise IllDefinedError(f"Z^({j}) at vertex {v} is numerically zero")
    return zi / zj


def pseudo_probability(G: Graph, w: int, c: int, lam, tau=None, *, cap=DEFAULT_CAP) -> complex:
    """P_{G,λ}[σ(w) = c] = Z^{(c)}_{G,w} / Z_G; an indicator for pinned w."""
    if tau is not None and tau.assignment[w] is not None:
        return complex(tau.assignment[w] == c)
    table = count_table(G, len(lam), tau, cap)
    z = table.evaluate(lam)
    if _is_zero(z, table.total):
        raise IllDefinedError("Z of the interpolation graph is numerically zero")
    return restricted_partition(G, w, c, lam, tau, cap=cap) / z


def recurrence_sides(G: Graph, v: int, i: int, j: int, lam, tau=None, ordering=None, *, cap=DEFAULT_CAP):
    """Both sides of the telescoping recurrence for R^{(i,j)}_{G,v}."""
    lam = np.asarray(lam, dtype=complex)
    q = len(lam)
    tau = tau if tau is not None else PartialColoring.empty(G.n, q)
    ordering = list(G.adjacency[v]) if ordering is None else list(ordering)
    lhs = marginal_ratio(G, v, i, j, lam, tau, cap=cap)
    rhs = lam[i] / lam[j]
    for k, w in enumerate(ordering, start=1):
        Gk, tk, log = build_Gk(G, tau, v, i, j, k, ordering, return_log=True)
        wk = log.vertex_map[w]
        pi = pseudo_probability(Gk, wk, i, lam, tk, cap=cap)
        pj = pseudo_probability(Gk, wk, j, lam, tk, cap=cap)
        if abs(1 - pj) < 1e-14:
            raise IllDefinedError(f"P[σ(w_{k}) = {j}] = 1 in G_{k}")
        rhs *= (1 - pi) / (1 - pj)
    return complex(lhs), complex(rhs)


def verify_recurrence(G: Graph, v: int, i: int, j: int, lam, tau=None, ordering=None, *, cap=DEFAULT_CAP) -> float:
    lhs, rhs = recurrence_sides(G, v, i, j, lam, tau, ordering, cap=cap)
    return abs(lhs - rhs)


# -- class-size distributions -------------------------------------------------


@dataclass(frozen=True)
class MomentSummary:
    mu: np.ndarray
    sigma: np.ndarray

    def full_sigma(self, n: int = 0) -> np.ndarray:
        """q×q covariance with the dropped coordinate reconstituted (Σ X_i = n)."""
        s = self.sigma
        d = len(s)
        full = np.zeros((d + 1, d + 1))
        full[:d, :d] = s
        full[:d, d] = full[d, :d] = -s.sum(axis=1)
        full[d, d] = s.sum()
        return full

    def to_dict(self) -> dict:
        return {"mu": self.mu.tolist(), "sigma": self.sigma.tolist()}


@dataclass(frozen=True, eq=False)
class ClassPmf:
    """Distribution of the truncated class-size vector (X_1..X_{q-1})."""

    n: int
    q: int
    lam: tuple
    counts: np.ndarray
    probs: np.ndarray
    log_z: float = math.nan
    _index: dict = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "_index", {k: p for k, p in zip(map(tuple, self.counts.tolist()), self.probs)})

    def __getitem__(self, key) -> float:
        return float(self._index.get(tuple(int(x) for x in key), 0.0))

    def __len__(self):
        return len(self.probs)

    def as_dict(self) -> dict:
        return dict(self._index)

    def full_counts(self) -> np.ndarray:
        last = self.n - self.counts.sum(axis=1, keepdims=True)
        return np.concatenate([self.counts, last], axis=1)

    def moments(self) -> MomentSummary:
        p = self.probs
        mu = p @ self.counts
        dev = self.counts - mu
        sigma = (dev * p[:, None]).T @ dev
        return MomentSummary(mu, (sigma + sigma.T) / 2)

    def characteristic(self, t) -> complex:
        """E exp(i⟨t, X⟩) for t of length q (full vector) or q-1."""
        t = np.asarray(t, dtype=float)
        x = self.full_counts() if len(t) == self.q else self.counts
        return complex(self.probs @ np.exp(1j * (x @ t)))

    def restrict(self, vectors) -> "ClassPmf":
        """Conditional distribution on a set of (full or truncated) vectors."""
        keys = {tuple(v[: self.q - 1]) for v in vectors}
        mask = np.array([k in keys for k in map(tuple, self.counts.tolist())], dtype=bool)
        mass = self.probs[mask].sum()
        if mass <= 0:
            raise ValueError("target set has zero probability")
        return ClassPmf(self.n, self.q, self.lam, self.counts[mask], self.probs[mask] / mass)

    def to_json(self) -> dict:
        m = self.moments()
        return {
            "n": self.n,
            "q": self.q,
            "lambda": [float(x) for x in self.lam],
            "pmf": [{"counts": list(map(int, c)), "p": float(p)} for c, p in zip(self.counts, self.probs)],
            "mu": m.mu.tolist(),
            "sigma": m.sigma.tolist(),
        }


def _pmf_from_table(table: CountTable, lam) -> ClassPmf:
    lw = table.log_weights(lam)
    log_z = float(logsumexp(lw))
    probs = np.exp(lw - log_z)
    return ClassPmf(table.n, table.q, tuple(map(float, lam)), table.counts[:, :-1].copy(), probs, log_z)


def cycle_count_dp(n: int, q: int, lam, topology: str = "cycle", cell_cap: int = _DP_CELL_CAP) -> ClassPmf:
    """Exact class-vector distribution on P_n or C_n by transfer DP.

    State: (first color, last color, counts of colors 0..q-2); the weights are
    renormalized every step and the log normalizer accumulated into log Z.
    """
    lam = np.asarray(lam, dtype=float)
    if len(lam) != q or np.any(lam <= 0):
        raise ValueError("need q strictly positive fugacities")
    if topology not in ("path", "cycle"):
        raise ValueError("topology must be 'path' or 'cycle'")
    if topology == "cycle" and n < 3:
        raise ValueError("cycle needs n >= 3")
    if n < 1 or q < 1:
        raise ValueError("need n >= 1 and q >= 1")
    d = q - 1
    first_dim = q if topology == "cycle" else 1
    cells = first_dim * q * (n + 1) ** d
    if cells > cell_cap:
        raise OverflowError(f"DP state has {cells:.3g} cells (cap {cell_cap:.3g}); reduce n or q")

    shape = (first_dim, q) + (n + 1,) * d
    A = np.zeros(shape)
    for c in range(q):
        idx = [c if topology == "cycle" else 0, c] + [0] * d
        if c < d:
            idx[2 + c] = 1
        A[tuple(idx)] = lam[c]
    log_z = 0.0
    for _ in range(n - 1):
        S = A.sum(axis=1)
        B = np.zeros_like(A)
        for c in range(q):
            src = lam[c] * (S - A[:, c])
            if c < d:
                ax = 1 + c
                lo = [slice(None)] * src.ndim
                hi = [slice(None)] * src.ndim
                lo[ax], hi[ax] = slice(1, None), slice(None, -1)
                B[:, c][tuple(lo)] = src[tuple(hi)]
            else:
                B[:, c] = src
        tot = B.sum()
        if tot <= 0:
            A = B
            break
        log_z += math.log(tot)
        A = B / tot
    if topology == "cycle":
        mask = 1.0 - np.eye(q)
        P = np.tensordot(mask, A, axes=([0, 1], [0, 1]))
    else:
        P = A.sum(axis=(0, 1))
    tot = P.sum()
    if tot <= 0:
        raise ValueError("no proper coloring exists")
    log_z += math.log(tot)
    P = P / tot
    nz = np.nonzero(P > 0)
    counts = np.stack(nz, axis=1).astype(np.int64) if d else np.zeros((1, 0), dtype=np.int64)
    probs = P[nz] if d else np.array([1.0])
    return ClassPmf(n, q, tuple(map(float, lam)), counts, probs, log_z)


def exact_pmf(G: Graph, q: int, lam, *, method: str = "auto", cap: float = DEFAULT_CAP) -> ClassPmf:
    """Gibbs distribution of the truncated class vector at positive real λ."""
    lam = np.asarray(lam, dtype=float)
    if len(lam) != q:
        raise ValueError("λ must have length q")
    if np.any(lam <= 0):
        raise ValueError("the Gibbs measure needs strictly positive λ")
    if method not in ("auto", "enumerate", "dp"):
        raise ValueError(f"unknown method {method!r}")
    use_dp = method == "dp"
    if method == "auto":
        use_dp = G.n * math.log(q) > math.log(cap) and detect_chain(G) is not None
    if use_dp:
        chain = detect_chain(G)
        if chain is None:
            raise ValueError("DP backend needs a path or a cycle")
        return cycle_count_dp(G.n, q, lam, chain[0])
    table = count_table(G, q, None, cap)
    if len(table.mult) == 0:
        raise ValueError(f"G has no proper {q}-coloring")
    return _pmf_from_table(table, lam)


def log_partition(G: Graph, q: int, lam, *, cap: float = DEFAULT_CAP) -> float:
    lam = np.asarray(lam, dtype=float)
    if G.n * math.log(q) <= math.log(cap):
        return count_table(G, q, None, cap).log_partition(lam)
    return exact_pmf(G, q, lam, cap=cap).log_z


def exact_moments(G: Graph, q: int, lam, **kw) -> MomentSummary:
    return exact_pmf(G, q, lam, **kw).moments()


def finite_diff_moments(G: Graph, q: int, lam, h: float = 1e-4, **kw) -> MomentSummary:
    """Moments from central differences of log Z in λ.

    μ_i = λ_i ∂_i log Z and Σ_ij = λ_i λ_j ∂_ij log Z + δ_ij λ_i ∂_i log Z.
    """
    lam = np.asarray(lam, dtype=float)
    if not 0 < h <= 1e-2:
        raise ValueError("step h must lie in (0, 1e-2]")
    if np.any(lam - h <= 0):
        raise ValueError("λ - h must stay strictly positive")
    d = q - 1
    F = lambda x: log_partition(G, q, x, **kw)  # noqa: E731
    E = np.eye(q) * h
    f0 = F(lam)
    grad = np.zeros(d)
    hess = np.zeros((d, d))
    fp = [F(lam + E[i]) for i in range(d)]
    fm = [F(lam - E[i]) for i in range(d)]
    for i in range(d):
        grad[i] = (fp[i] - fm[i]) / (2 * h)
        hess[i, i] = (fp[i] - 2 * f0 + fm[i]) / h ** 2
        for j in range(i + 1, d):
            v = (F(lam + E[i] + E[j]) - F(lam + E[i] - E[j]) - F(lam - E[i] + E[j]) + F(lam - E[i] - E[j])) / (4 * h * h)
            hess[i, j] = hess[j, i] = v
    lt = lam[:d]
    mu = lt * grad
    sigma = np.outer(lt, lt) * hess + np.diag(mu)
    return MomentSummary(mu, sigma)


def char_function(G: Graph, q: int, lam, t, *, cap: float = DEFAULT_CAP):
    """Z(λ₁e^{it₁}, …, λ_q e^{it_q}) / Z(λ) for t of length q (or a stack of them)."""
    lam = np.asarray(lam, dtype=float)
    t = np.asarray(t, dtype=float)
    single = t.ndim == 1
    ts = np.atleast_2d(t)
    if ts.shape[1] == q - 1:
        ts = np.concatenate([ts, np.zeros((len(ts), 1))], axis=1)
    table = count_table(G, q, None, cap)
    z0 = table.evaluate(lam.astype(complex))
    vals = table.evaluate_many(lam[None, :] * np.exp(1j * ts)) / z0
    return complex(vals[0]) if single else vals
