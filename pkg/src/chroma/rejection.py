"""Rejection sampling of colorings with prescribed color-class sizes."""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .exact import cycle_count_dp, exact_pmf
from .glauber import class_vector, init_coloring, run_chains
from .graph import Graph, cycle, path
from .lclt import loglog_fit
from .solver import SolveResult, inside_proven_radius, solve_lambda

ITER_BATCH = 64


def equitable_targets(n: int, q: int) -> set:
    lo, r = divmod(n, q)
    out = set()
    for hi in itertools.combinations(range(q), r):
        v = [lo] * q
        for i in hi:
            v[i] += 1
        out.add(tuple(v))
    return out


@dataclass(frozen=True)
class TargetSpec:
    n: int
    q: int
    mode: str = "equitable"
    vector: Optional[tuple] = None

    def __post_init__(self):
        if self.mode not in ("equitable", "exact"):
            raise ValueError(f"unknown target mode {self.mode!r}")
        if self.mode == "exact":
            v = self.vector
            if v is None or len(v) != self.q or sum(v) != self.n or min(v) < 0:
                raise ValueError(f"target vector must have {self.q} non-negative entries summing to {self.n}")

    @classmethod
    def parse(cls, text: str, n: int, q: int) -> "TargetSpec":
        if text == "equitable":
            return cls(n, q)
        v = tuple(int(x) for x in text.split(","))
        if len(v) == q - 1:
            v = v + (n - sum(v),)
        return cls(n, q, "exact", v)

    def vectors(self) -> set:
        return equitable_targets(self.n, self.q) if self.mode == "equitable" else {tuple(self.vector)}


@dataclass
class RejectionConfig:
    K: float = 10.0
    eps: float = 0.01
    C: float = 20.0

    def max_iters(self, n: int, q: int) -> int:
        return math.ceil(self.K * max(n, 1) ** ((q - 1) / 2) * math.log(1 / self.eps))

    def steps(self, n: int) -> int:
        return max(1, math.ceil(self.C * n * math.log(max(n, 1))))


@dataclass
class RejectionOutcome:
    success: bool
    coloring: Optional[list]
    counts: Optional[list]
    iterations: int
    hits: list = field(default_factory=list)
    lam: Optional[list] = None
    T: int = 0

    def to_json(self) -> dict:
        return {"success": self.success, "coloring": self.coloring, "counts": self.counts,
                "iterations": self.iterations, "lambda": self.lam, "T": self.T}


def _batch_seed(seed: int, batch: int) -> int:
    return int(np.random.SeedSequence([int(seed), batch]).generate_state(1)[0])


def rejection_sample(G: Graph, q: int, lam, target: TargetSpec, max_iters: Optional[int] = None,
                     T_per_iter: Optional[int] = None, seed: int = 0,
                     config: RejectionConfig = RejectionConfig()) -> RejectionOutcome:
    """Run Glauber from a fresh greedy start, keep the result iff its class vector is a target."""
    lam = np.asarray(lam, float)
    n = G.n
    if target.n != n or target.q != q:
        raise ValueError("target does not match the graph")
    max_iters = config.max_iters(n, q) if max_iters is None else max_iters
    T = config.steps(n) if T_per_iter is None else T_per_iter
    wanted = target.vectors()
    start = init_coloring(G, q)
    hits: list = []
    for b, s in enumerate(range(0, max_iters, ITER_BATCH)):
        size = min(ITER_BATCH, max_iters - s)
        finals = run_chains(G, q, lam, T, size, _batch_seed(seed, b), init=start)
        for k, col in enumerate(finals):
            counts = tuple(int(x) for x in class_vector(col, q))
            hit = counts in wanted
            hits.append(hit)
            if hit:
                return RejectionOutcome(True, col.tolist(), list(counts), s + k + 1, hits, lam.tolist(), T)
    return RejectionOutcome(False, None, None, max_iters, hits, lam.tolist(), T)


@dataclass
class AcceptedSample:
    counts: np.ndarray
    trials: int
    hits: int

    @property
    def acceptance_rate(self) -> float:
        return self.hits / self.trials if self.trials else 0.0


def collect_accepted(G: Graph, q: int, lam, target: TargetSpec, n_accept: int, T: int,
                     seed: int = 0, max_trials: int = 10_000_000) -> AcceptedSample:
    """Independent rejection runs until ``n_accept`` acceptances; class vectors of the accepted ones."""
    wanted = np.array(sorted(target.vectors()))
    start = init_coloring(G, q)
    got, trials, b = [], 0, 0
    batch = 4096
    while sum(len(g) for g in got) < n_accept and trials < max_trials:
        finals = run_chains(G, q, lam, T, batch, _batch_seed(seed, b), init=start)
        cv = np.stack([np.bincount(f, minlength=q) for f in finals])
        ok = (cv[:, None, :] == wanted[None, :, :]).all(axis=2).any(axis=1)
        got.append(cv[ok])
        trials += batch
        b += 1
    allc = np.concatenate(got) if got else np.zeros((0, q), int)
    return AcceptedSample(allc[:n_accept], trials, len(allc))


@dataclass
class GofResult:
    statistic: float
    p_value: float
    dof: int
    accepted: int
    acceptance_rate: float
    target_mass: float
    degenerate: bool

    def to_json(self) -> dict:
        return dict(self.__dict__)


def rejection_gof(G: Graph, q: int, lam, target: TargetSpec, n_accept: int = 10_000, T: int = 500,
                  seed: int = 0) -> GofResult:
    """Chi-square test of accepted class vectors against the exact pmf conditioned on the target."""
    from scipy.stats import chisquare

    pmf = exact_pmf(G, q, lam)
    cond = pmf.restrict(target.vectors())
    sample = collect_accepted(G, q, lam, target, n_accept, T, seed)
    keys = [tuple(map(int, c)) for c in cond.counts]
    index = {k: i for i, k in enumerate(keys)}
    obs = np.zeros(len(keys))
    for c in sample.counts:
        obs[index[tuple(int(x) for x in c[: q - 1])]] += 1
    mass = float(sum(pmf[k] for k in keys))
    if len(keys) == 1:
        return GofResult(0.0, 1.0, 0, len(sample.counts), sample.acceptance_rate, mass, True)
    stat, p = chisquare(obs, cond.probs * obs.sum())
    return GofResult(float(stat), float(p), len(keys) - 1, len(sample.counts),
                     sample.acceptance_rate, mass, False)


# -- skewed targets -----------------------------------------------------------


def grid_candidates(n: int, q: int, radius: float) -> list:
    """λ_i = 1 + k_i/√n with |k_i| ≤ ⌊radius·√n⌋, λ_q = 1, ordered by ‖k‖₁ then lexicographically."""
    kmax = int(math.floor(radius * math.sqrt(n)))
    ks = list(itertools.product(range(-kmax, kmax + 1), repeat=q - 1))
    ks.sort(key=lambda k: (sum(map(abs, k)), k))
    root = math.sqrt(n)
    out = []
    for k in ks:
        lam = [1 + ki / root for ki in k] + [1.0]
        if min(lam) > 0:
            out.append((k, lam))
    return out


@dataclass
class SkewedOutcome:
    outcome: RejectionOutcome
    lam: Optional[list]
    mode: str
    candidates_tried: int
    inside_proven_radius: Optional[bool]
    solve: Optional[SolveResult] = None

    @property
    def success(self) -> bool:
        return self.outcome.success

    def to_json(self) -> dict:
        d = {
            "coloring": self.outcome.coloring,
            "counts": self.outcome.counts,
            "lambda": self.lam,
            "iterations": self.outcome.iterations,
            "inside_proven_radius": self.inside_proven_radius,
            "success": self.success,
            "mode": self.mode,
            "candidates_tried": self.candidates_tried,
        }
        if self.solve is not None:
            d["solver"] = self.solve.to_json()
        return d


def skewed_sample(G: Graph, q: int, nvec, mode: str = "newton", seed: int = 0, ball_radius: float = 0.2,
                  max_iters: Optional[int] = None, T_per_iter: Optional[int] = None,
                  config: RejectionConfig = RejectionConfig()) -> SkewedOutcome:
    """Sample an n⃗-coloring by rejection at a fugacity tilted toward n⃗.

    ``grid`` tries lattice fugacities in spiral order; ``newton`` solves
    Ψ(λ) = n⃗ inside the ball and samples at the solver's best iterate.
    """
    nvec = tuple(int(x) for x in nvec)
    target = TargetSpec(G.n, q, "exact", nvec)
    if mode == "newton":
        sol = solve_lambda(G, q, nvec[: q - 1], ball_radius=ball_radius)
        out = rejection_sample(G, q, sol.lam, target, max_iters, T_per_iter, seed, config)
        return SkewedOutcome(out, sol.lam, mode, 1, sol.inside_proven_radius, sol)
    if mode != "grid":
        raise ValueError(f"unknown mode {mode!r}")
    tried = 0
    out = None
    for k, (_, lam) in enumerate(grid_candidates(G.n, q, ball_radius)):
        tried += 1
        out = rejection_sample(G, q, lam, target, max_iters, T_per_iter, _batch_seed(seed, k), config)
        if out.success:
            return SkewedOutcome(out, lam, mode, tried, inside_proven_radius(lam, G.max_degree))
    fail = out if out is not None else RejectionOutcome(False, None, None, 0)
    return SkewedOutcome(fail, None, mode, tried, None)


# -- acceptance scaling -------------------------------------------------------


def nearest_equitable(n: int, q: int, mu) -> tuple:
    mu = np.asarray(mu, float)
    best = min(sorted(equitable_targets(n, q)), key=lambda v: float(np.linalg.norm(np.array(v[: q - 1]) - mu)))
    return best


@dataclass
class ScalingFit:
    ns: list
    probs: list
    vectors: list
    slope: float
    intercept: float
    residuals: list
    mode: str

    def to_json(self) -> dict:
        return dict(self.__dict__)


def acceptance_scaling_experiment(family: str, q: int, n_list, lam=None, mode: str = "exact",
                                  samples: int = 100_000, seed: int = 0) -> ScalingFit:
    """Fit log P(X⃗ = v_n) against log n, with v_n the equitable vector nearest μ."""
    if len(n_list) < 3:
        raise ValueError("need at least three values of n")
    if family not in ("cycle", "path"):
        raise ValueError(f"unsupported family {family!r}")
    lam = np.ones(q) if lam is None else np.asarray(lam, float)
    probs, vecs = [], []
    for n in n_list:
        pmf = cycle_count_dp(n, q, lam, family)
        v = nearest_equitable(n, q, pmf.moments().mu)
        vecs.append(list(v))
        if mode == "exact":
            probs.append(pmf[v[: q - 1]])
        elif mode == "empirical":
            G = cycle(n) if family == "cycle" else path(n)
            finals = run_chains(G, q, lam, RejectionConfig().steps(n), samples, _batch_seed(seed, n))
            cv = np.stack([class_vector(f, q) for f in finals])
            probs.append(float((cv == np.array(v)).all(axis=1).mean()))
        else:
            raise ValueError(f"unknown mode {mode!r}")
    slope, intercept, res = loglog_fit(n_list, probs)
    return ScalingFit(list(n_list), probs, vecs, slope, intercept, res, mode)
