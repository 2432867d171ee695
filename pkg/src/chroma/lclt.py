"""Gaussian predictions for class-size vectors and scaling diagnostics.

The local CLT comparison, determinant and eigenvalue scaling of Σ, the
Gaussian-decay fit of the characteristic function, and the cubic-remainder
check of log φ̃ all run on exact quantities from :mod:`chroma.exact`.
"""

from __future__ import annotations

import itertools
import math
import warnings
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .exact import MomentSummary, char_function, cycle_count_dp, exact_moments
from .graph import Graph, ZeroFreeConstants


class SingularCovariance(ValueError):
    pass


class BranchTrackingError(RuntimeError):
    pass


def loglog_fit(xs, ys):
    """Least-squares slope/intercept of log y against log x, with residuals."""
    lx, ly = np.log(np.asarray(xs, float)), np.log(np.asarray(ys, float))
    slope, intercept = np.polyfit(lx, ly, 1)
    return float(slope), float(intercept), (ly - (slope * lx + intercept)).tolist()


def _check_invertible(sigma: np.ndarray):
    sigma = np.atleast_2d(sigma)
    ev = np.linalg.eigvalsh(sigma)
    tr = float(np.trace(sigma))
    if tr <= 0 or ev.min() <= 1e-9 * tr:
        raise SingularCovariance("covariance is singular")
    return ev


def gaussian_prediction(m: MomentSummary, nvec) -> float:
    sigma = np.atleast_2d(m.sigma)
    _check_invertible(sigma)
    d = len(sigma)
    x = np.asarray(nvec, float)[:d] - np.asarray(m.mu)
    quad = float(x @ np.linalg.solve(sigma, x))
    return math.exp(-0.5 * quad) / ((2 * math.pi) ** (d / 2) * math.sqrt(np.linalg.det(sigma)))


@dataclass
class LcltComparison:
    family: str
    n: int
    q: int
    lam: tuple
    window: float
    rows: list = field(default_factory=list)
    singular: bool = False
    note: str = ""

    @property
    def max_rel_error(self) -> float:
        return max((r[3] for r in self.rows), default=math.nan)

    @property
    def mean_rel_error(self) -> float:
        return float(np.mean([r[3] for r in self.rows])) if self.rows else math.nan

    @property
    def window_mass(self) -> float:
        return float(sum(r[1] for r in self.rows))

    def to_json(self) -> dict:
        return {
            "family": self.family, "n": self.n, "q": self.q, "lambda": list(self.lam),
            "window": self.window, "singular": self.singular, "note": self.note,
            "max_rel_error": self.max_rel_error, "mean_rel_error": self.mean_rel_error,
            "window_mass": self.window_mass, "points": len(self.rows),
        }

    def csv_rows(self) -> list:
        return [
            (self.family, self.n, self.q, " ".join(map(str, nv)), f"{p:.12e}", f"{g:.12e}", f"{e:.6e}")
            for nv, p, g, e in self.rows
        ]


CSV_HEADER = ("family", "n", "q", "counts", "exact", "gaussian", "relerr")


def lclt_compare(family: str, q: int, n: int, window: float = 1.0, lam=None) -> LcltComparison:
    """Exact P(X⃗ = n⃗) against the Gaussian density on ‖n⃗ − μ‖₂ ≤ window·√n."""
    lam = np.ones(q) if lam is None else np.asarray(lam, float)
    pmf = cycle_count_dp(n, q, lam, family)
    m = pmf.moments()
    out = LcltComparison(family, n, q, tuple(map(float, lam)), window)
    try:
        _check_invertible(m.sigma)
    except SingularCovariance:
        out.singular = True
        out.note = "singular covariance; Gaussian prediction undefined"
        return out
    radius = window * math.sqrt(n)
    for counts, p in zip(pmf.counts, pmf.probs):
        if np.linalg.norm(counts - m.mu) > radius:
            continue
        g = gaussian_prediction(m, counts)
        # relative to the prediction, matching P = (1 + o(1)) g near μ
        out.rows.append((tuple(map(int, counts)), float(p), g, abs(p - g) / g))
    return out


@dataclass
class DetScalingFit:
    family: str
    q: int
    ns: list
    dets: list
    slope: float
    intercept: float
    residuals: list
    min_eig_over_n: list
    max_eig_over_n: list

    def to_json(self) -> dict:
        return dict(self.__dict__)


def det_scaling_fit(family: str, q: int, n_list: Sequence[int], lam=None) -> DetScalingFit:
    if len(n_list) < 4:
        raise ValueError("need at least four values of n")
    lam = np.ones(q) if lam is None else np.asarray(lam, float)
    dets, lo, hi = [], [], []
    for n in n_list:
        sigma = cycle_count_dp(n, q, lam, family).moments().sigma
        ev = np.linalg.eigvalsh(sigma)
        dets.append(float(np.prod(ev)))
        lo.append(float(ev.min() / n))
        hi.append(float(ev.max() / n))
    slope, intercept, res = loglog_fit(n_list, dets)
    return DetScalingFit(family, q, list(n_list), dets, slope, intercept, res, lo, hi)


# -- characteristic function --------------------------------------------------


def t_grid(q: int, per_axis: int) -> np.ndarray:
    """Midpoint grid on [−π, π]^{q−1}; an even ``per_axis`` keeps 0 off the grid."""
    ticks = -math.pi + (np.arange(per_axis) + 0.5) * (2 * math.pi / per_axis)
    pts = np.array(list(itertools.product(ticks, repeat=q - 1)))
    return pts[np.linalg.norm(pts, axis=1) > 0]


def default_grid_size(q: int, target: int = 1000) -> int:
    k = max(2, round(target ** (1 / (q - 1))))
    return k + (k % 2)


@dataclass
class CharBoundFit:
    n: int
    q: int
    points: int
    c_star: float
    argmin_t: list
    max_abs_phi: float
    small_t_limit: float
    violations: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return self.c_star > 0 and not self.violations

    def to_json(self) -> dict:
        d = dict(self.__dict__)
        d["ok"] = self.ok
        return d


def char_bound_fit(G: Graph, q: int, lam=None, grid: Optional[np.ndarray] = None) -> CharBoundFit:
    """Largest c with |φ(t)| ≤ exp(−c n ‖t‖²) over the grid (t_q = 0)."""
    lam = np.ones(q) if lam is None else np.asarray(lam, float)
    grid = t_grid(q, default_grid_size(q)) if grid is None else np.asarray(grid, float)
    phi = np.abs(char_function(G, q, lam, grid))
    norms2 = (grid ** 2).sum(axis=1)
    viol = [g.tolist() for g, a in zip(grid, phi) if a >= 1 - 1e-12]
    with np.errstate(divide="ignore"):
        ratios = -np.log(np.maximum(phi, 1e-300)) / (G.n * norms2)
    k = int(np.argmin(ratios))
    nu_min = float(np.linalg.eigvalsh(exact_moments(G, q, lam).sigma).min())
    return CharBoundFit(G.n, q, len(grid), float(ratios[k]), grid[k].tolist(),
                        float(phi.max()), nu_min / (2 * G.n), viol)


@dataclass
class TaylorCheck:
    t: list
    log_phi: complex
    expansion: complex
    remainder: float
    ratio: float
    steps: int
    within_hypothesis: bool


def taylor_limit(delta: int) -> float:
    R = ZeroFreeConstants(max(delta, 1)).radius_R
    return R / (4 + 2 * R)


def _tracked_log(G, q, lam, t, steps, max_steps):
    while steps <= max_steps:
        s = np.linspace(0.0, 1.0, steps + 1)
        vals = np.asarray(char_function(G, q, lam, s[:, None] * t[None, :]))
        if np.any(vals == 0):
            raise BranchTrackingError("φ̃ vanishes on the ray")
        jumps = np.angle(vals[1:] / vals[:-1])
        if np.abs(jumps).max(initial=0.0) <= math.pi / 2:
            return complex(math.log(abs(vals[-1])), float(jumps.sum())), steps
        steps *= 2
    raise BranchTrackingError("refine ray discretization")


def taylor_check(G: Graph, q: int, lam, t, steps: int = 16, max_steps: int = 4096) -> TaylorCheck:
    """Exact log φ̃(t) minus i⟨t, E X⃗⟩ − ½ tᵀ Cov t for a full length-q vector t."""
    lam = np.asarray(lam, float)
    t = np.asarray(t, float)
    if len(t) == q - 1:
        t = np.append(t, 0.0)
    tinf = float(np.abs(t).max(initial=0.0))
    limit = taylor_limit(G.max_degree)
    inside = tinf <= limit
    if not inside:
        warnings.warn(f"‖t‖∞ = {tinf:.3g} exceeds the hypothesis limit {limit:.3g}", stacklevel=2)
    m = exact_moments(G, q, lam)
    mu = np.append(m.mu, G.n - m.mu.sum())
    sigma = m.full_sigma()
    expansion = complex(-0.5 * t @ sigma @ t, t @ mu)
    if tinf == 0:
        return TaylorCheck(t.tolist(), 0j, 0j, 0.0, 0.0, 0, inside)
    log_phi, used = _tracked_log(G, q, lam, t, steps, max_steps)
    rem = abs(log_phi - expansion)
    return TaylorCheck(t.tolist(), log_phi, expansion, rem, rem / (G.n * tinf ** 3), used, inside)
