"""Validity of complex fugacities, polydisc scans of |Z|, and ratio audits."""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .exact import DEFAULT_CAP, ZERO_FLOOR, IllDefinedError, count_table, marginal_ratio
from .graph import Graph, PartialColoring, ZeroFreeConstants


def zero_free_radius(delta: int) -> float:
    return ZeroFreeConstants(delta).radius_R


@dataclass(frozen=True)
class AssumptionCheck:
    assumption: int
    worst_pair: tuple
    measured: float
    bound: float

    @property
    def ok(self) -> bool:
        return self.measured <= self.bound


@dataclass(frozen=True)
class ValidityReport:
    checks: tuple

    @property
    def valid(self) -> bool:
        return all(c.ok for c in self.checks)

    def failed(self) -> list:
        return [c.assumption for c in self.checks if not c.ok]


def check_valid(lam, delta: int) -> ValidityReport:
    """Check the three assumptions on λ ∈ ℂ^q for degree bound Δ.

    1. no coordinate on (-∞, 0]  (measured: number of offending coordinates)
    2. max |arg λ_i| ≤ ν ε_I / 2
    3. max |Re ln(λ_i/λ_j)| ≤ Δ ε_I
    """
    cst = ZeroFreeConstants(delta)
    lam = np.asarray(lam, dtype=complex)
    on_cut = (lam.imag == 0) & (lam.real <= 0)
    bad = np.flatnonzero(on_cut)
    c1 = AssumptionCheck(1, (int(bad[0]),) * 2 if len(bad) else (), float(len(bad)), 0.0)
    if len(bad):
        inf = math.inf
        return ValidityReport((c1, AssumptionCheck(2, (), inf, cst.nu * cst.eps_I / 2),
                               AssumptionCheck(3, (), inf, delta * cst.eps_I)))
    args = np.abs(np.angle(lam))
    i2 = int(np.argmax(args))
    c2 = AssumptionCheck(2, (i2, i2), float(args[i2]), cst.nu * cst.eps_I / 2)
    logmod = np.log(np.abs(lam))
    hi, lo = int(np.argmax(logmod)), int(np.argmin(logmod))
    c3 = AssumptionCheck(3, (hi, lo), float(logmod[hi] - logmod[lo]), delta * cst.eps_I)
    return ValidityReport((c1, c2, c3))


def lower_bound(lam, n: int, delta: int) -> float:
    """0.99^n (λ_min/λ_max)^{nΔ} with λ_min, λ_max clamped against 1."""
    mod = np.abs(np.asarray(lam, dtype=complex))
    lmin = min(1.0, float(mod.min()))
    lmax = max(1.0, float(mod.max()))
    return 0.99 ** n * (lmin / lmax) ** (n * delta)


@dataclass
class ScanReport:
    n: int
    q: int
    delta: int
    radius: float
    proven_radius: float
    samples: int
    min_abs_z: float
    argmin_lambda: list
    min_lower_bound: float
    theorem_applies: bool
    violations: list = field(default_factory=list)

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "q": self.q,
            "delta": self.delta,
            "radius": self.radius,
            "proven_radius": self.proven_radius,
            "inside_proven_radius": self.radius <= self.proven_radius,
            "samples": self.samples,
            "min_abs_z": self.min_abs_z,
            "argmin_lambda": self.argmin_lambda,
            "min_lower_bound": self.min_lower_bound,
            "theorem_applies": self.theorem_applies,
            "violations": self.violations,
        }


def polydisc_samples(q: int, n_samples: int, radius: float, seed: int = 0) -> np.ndarray:
    """First half uniform in the polydisc around 1⃗, second half on its distinguished boundary."""
    rng = np.random.default_rng(seed)
    n_in = n_samples - n_samples // 2
    r = radius * np.sqrt(rng.random((n_in, q)))
    phase = rng.uniform(0, 2 * np.pi, (n_in, q))
    inner = 1 + r * np.exp(1j * phase)
    phase_b = rng.uniform(0, 2 * np.pi, (n_samples // 2, q))
    boundary = 1 + radius * np.exp(1j * phase_b)
    return np.concatenate([inner, boundary])


def polydisc_scan(G: Graph, q: int, n_samples: int, seed: int = 0, delta: Optional[int] = None,
                  radius_override: Optional[float] = None, threads: int = 1,
                  cap: float = DEFAULT_CAP) -> ScanReport:
    delta = G.max_degree if delta is None else delta
    delta = max(delta, 1)
    proven = zero_free_radius(delta)
    radius = proven if radius_override is None else radius_override
    table = count_table(G, q, None, cap)
    lams = polydisc_samples(q, n_samples, radius, seed)
    chunks = np.array_split(np.arange(n_samples), max(threads, 1))
    with ThreadPoolExecutor(max_workers=max(threads, 1)) as pool:
        parts = list(pool.map(lambda idx: table.evaluate_many(lams[idx]), chunks))
    zs = np.abs(np.concatenate(parts))
    lbs = np.array([lower_bound(l, G.n, delta) for l in lams])
    zero_tol = ZERO_FLOOR * max(len(table.mult), 1)
    violations = []
    for k in np.flatnonzero((zs < zero_tol) | (zs < lbs)):
        violations.append({
            "index": int(k),
            "abs_z": float(zs[k]),
            "lower_bound": float(lbs[k]),
            "lambda": [[float(z.real), float(z.imag)] for z in lams[k]],
        })
    k = int(np.argmin(zs))
    return ScanReport(
        n=G.n, q=q, delta=delta, radius=radius, proven_radius=proven, samples=n_samples,
        min_abs_z=float(zs[k]), argmin_lambda=[[float(z.real), float(z.imag)] for z in lams[k]],
        min_lower_bound=float(lbs.min()),
        theorem_applies=q >= 2 * delta and radius <= proven,
        violations=violations,
    )


# slack lost to rounding when both sides of a bound are computed from the same ratio
SLACK_TOL = 1e-13


@dataclass
class AuditRecord:
    vertex: int
    unpinned_neighbors: int
    pairs: list
    worst_real_slack: float
    worst_imag_slack: float
    all_pinned_ratio_ok: Optional[bool]
    bad_color_ratios_zero: bool
    ratios_off_cut: bool

    @property
    def holds(self) -> bool:
        return (self.worst_real_slack >= -SLACK_TOL and self.worst_imag_slack >= -SLACK_TOL
                and self.all_pinned_ratio_ok is not False
                and self.bad_color_ratios_zero and self.ratios_off_cut)


def induction_audit(G: Graph, u: int, lam, delta: Optional[int] = None,
                    tau: Optional[PartialColoring] = None, cap: float = DEFAULT_CAP) -> AuditRecord:
    """Exact check of the ratio bounds at vertex ``u`` for every good pair (i, j).

    Real part:  |Re ln R(λ) - ln R(1⃗)| ≤ d_u ε_R + |Re ln λ_i/λ_j|
    Imag part:  |Im ln R(λ)|           ≤ d_u ε_I + |Im ln λ_i/λ_j|
    where d_u counts the unpinned neighbors of u. Also checks that ratios are
    λ_i/λ_j when every neighbor is pinned, vanish for bad i, and avoid (-∞, 0].
    """
    lam = np.asarray(lam, dtype=complex)
    q = len(lam)
    delta = G.max_degree if delta is None else delta
    delta = max(delta, 1)
    tau = tau if tau is not None else PartialColoring.empty(G.n, q)
    if tau.assignment[u] is not None:
        raise ValueError(f"vertex {u} is pinned")
    report = check_valid(lam, delta)
    if not report.valid:
        raise ValueError(f"λ violates assumptions {report.failed()}")
    cst = ZeroFreeConstants(delta)
    good = tau.good_colors(G, u)
    bad = [c for c in range(q) if c not in good]
    d_u = sum(1 for w in G.adjacency[u] if tau.assignment[w] is None)
    ones = np.ones(q, dtype=complex)
    pairs = []
    worst_re = worst_im = math.inf
    off_cut = True
    pinned_ok = True if d_u == 0 else None
    for i in good:
        for j in good:
            if i == j:
                continue
            try:
                r = marginal_ratio(G, u, i, j, lam, tau, cap=cap)
                r1 = marginal_ratio(G, u, i, j, ones, tau, cap=cap).real
            except IllDefinedError as exc:
                raise IllDefinedError(f"ill-conditioned ratio at ({i}, {j}): {exc}") from exc
            if r.imag == 0 and r.real <= 0:
                off_cut = False
                continue
            lr = np.log(r)
            lq = np.log(lam[i] / lam[j])
            re_val = abs(lr.real - math.log(r1))
            im_val = abs(lr.imag)
            re_bound = d_u * cst.eps_R + abs(lq.real)
            im_bound = d_u * cst.eps_I + abs(lq.imag)
            worst_re = min(worst_re, re_bound - re_val)
            worst_im = min(worst_im, im_bound - im_val)
            if d_u == 0:
                pinned_ok = pinned_ok and abs(r - lam[i] / lam[j]) <= 1e-12 * abs(r)
            pairs.append({"i": i, "j": j, "real": re_val, "real_bound": re_bound,
                          "imag": im_val, "imag_bound": im_bound})
    bad_zero = all(
        abs(marginal_ratio(G, u, i, good[0], lam, tau, cap=cap)) == 0 for i in bad
    ) if good else True
    return AuditRecord(u, d_u, pairs, worst_re, worst_im, pinned_ok, bad_zero, off_cut)
