"""Desk-scale verification suites shared by ``chroma verify`` and the acceptance tests.

Each suite returns a :class:`SuiteResult` whose ``passed`` flag applies the
tolerance of that experiment and whose ``metrics`` carry the measured values.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np

from . import exact, glauber, lclt, rejection, solver, zero_probe
from .graph import clique, cycle, petersen, random_regularish


@dataclass
class SuiteResult:
    name: str
    passed: bool
    metrics: dict = field(default_factory=dict)
    csv: list = field(default_factory=list)

    def line(self) -> str:
        return f"{'PASS' if self.passed else 'FAIL'} {self.name}"

    def to_json(self) -> dict:
        return {"suite": self.name, "passed": self.passed, "metrics": _plain(self.metrics)}


def _plain(x):
    if isinstance(x, dict):
        return {str(k): _plain(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_plain(v) for v in x]
    if isinstance(x, np.ndarray):
        return _plain(x.tolist())
    if isinstance(x, (np.bool_,)):
        return bool(x)
    if isinstance(x, np.integer):
        return int(x)
    if isinstance(x, (np.floating, float)):
        return float(x)
    return x


def moment_graphs(count: int = 10, seed: int = 0) -> list:
    rng = np.random.default_rng(seed)
    out = []
    while len(out) < count:
        n = int(rng.integers(4, 9))
        G = random_regularish(n, 3, int(rng.integers(2 ** 31)))
        if G.edges and G not in out:
            out.append(G)
    return out


def _rel(a, b) -> float:
    a, b = np.atleast_1d(a), np.atleast_1d(b)
    scale = np.abs(b)
    # entries that vanish identically (e.g. by symmetry) are compared on the matrix scale
    if scale.max() == 0:
        return float(np.abs(a - b).max())
    scale = np.where(scale > 1e-12 * scale.max(), scale, scale.max())
    return float((np.abs(a - b) / scale).max())


def moments(seed: int = 0, tol: float = 1e-5, h: float = 1e-4) -> SuiteResult:
    worst = 0.0
    rows = []
    rng = np.random.default_rng(seed + 1)
    for G in moment_graphs(10, seed):
        for q in (4, 6):
            lam = 1 + 0.2 * rng.random(q)
            ex = exact.exact_moments(G, q, lam)
            fd = exact.finite_diff_moments(G, q, lam, h=h)
            err = max(_rel(fd.mu, ex.mu), _rel(fd.sigma, ex.sigma))
            worst = max(worst, err)
            rows.append({"n": G.n, "m": len(G.edges), "q": q, "rel_error": err})
    return SuiteResult("moments", worst <= tol, {"max_rel_error": worst, "tol": tol, "instances": rows})


def recurrence(seed: int = 0, tol: float = 1e-10) -> SuiteResult:
    rng = np.random.default_rng(seed)
    worst = 0.0
    checked = 0
    for G, q in ((clique(4), 8), (cycle(5), 4)):
        lams = [np.ones(q)] + [1 + 0.2 * (rng.random(q) - 0.5) for _ in range(5)]
        for lam in lams:
            for v in range(G.n):
                for i in range(q):
                    for j in range(q):
                        if i == j:
                            continue
                        lhs, rhs = exact.recurrence_sides(G, v, i, j, lam)
                        worst = max(worst, abs(lhs - rhs) / (1 + abs(lhs)))
                        checked += 1
    return SuiteResult("recurrence", worst <= tol, {"max_scaled_residual": worst, "tol": tol, "checked": checked})


def zerofree(G=None, q: int = 6, samples: int = 10_000, seed: int = 0, threads: int = 1) -> SuiteResult:
    G = petersen() if G is None else G
    rep = zero_probe.polydisc_scan(G, q, samples, seed=seed, threads=threads)
    metrics = rep.to_json()
    metrics["violation_count"] = len(rep.violations)
    return SuiteResult("zerofree", not rep.violations, metrics)


def tv(n: int = 6, q: int = 5, T: int = 200, samples: int = 100_000, seed: int = 0, tol: float = 0.02) -> SuiteResult:
    est = glauber.tv_distance_experiment(cycle(n), q, np.ones(q), T, samples, seed)
    return SuiteResult("tv", est.tv <= tol, {**est.to_json(), "tol": tol})


def contraction_lambdas(q: int) -> list:
    off = np.zeros(q)
    off[: q - 1] = 0.09 * np.array([(-1) ** k for k in range(q - 1)])
    return [np.ones(q), 1 + off]


def contraction(n: int = 8, q: int = 5, trials: int = 100_000, seed: int = 0) -> SuiteResult:
    G = cycle(n)
    runs = []
    for k, lam in enumerate(contraction_lambdas(q)):
        est = glauber.contraction_experiment(G, q, lam, trials, seed + k)
        runs.append({"lambda": lam.tolist(), "dist_inf": float(np.abs(lam - 1).max()), **est.to_json()})
    return SuiteResult("contraction", all(r["satisfied"] for r in runs),
                       {"runs": runs, "regime": glauber.mixing_regime(q, G.max_degree)})


def rejection_gof(n: int = 6, q: int = 3, T: int = 500, n_accept: int = 10_000, seed: int = 0,
                  alpha: float = 1e-3) -> SuiteResult:
    res = rejection.rejection_gof(cycle(n), q, np.ones(q), rejection.TargetSpec(n, q), n_accept, T, seed)
    return SuiteResult("rejection", res.p_value > alpha, {**res.to_json(), "alpha": alpha})


def exponent(q: int = 3, ns=(12, 18, 24, 30, 36, 42, 48), slope_tol: float = 0.2) -> SuiteResult:
    fit = rejection.acceptance_scaling_experiment("cycle", q, list(ns))
    expected = -(q - 1) / 2
    return SuiteResult("exponent", abs(fit.slope - expected) <= slope_tol,
                       {**fit.to_json(), "expected": expected, "tol": slope_tol})


def detscaling(ns=(16, 24, 32, 48, 64), tolerances=((3, 0.2), (4, 0.25)), floor: float = 0.01) -> SuiteResult:
    fits = []
    ok = True
    for q, tol in tolerances:
        f = lclt.det_scaling_fit("cycle", q, list(ns))
        good = abs(f.slope - (q - 1)) <= tol and min(f.min_eig_over_n) >= floor
        ok &= good
        fits.append({**f.to_json(), "expected": q - 1, "tol": tol, "passed": good})
    return SuiteResult("detscaling", ok, {"fits": fits, "eig_floor": floor})


def lclt_suite(family: str = "cycle", q: int = 3, ns=(30, 60, 90), window: float = 1.0,
               guard: float = 0.15) -> SuiteResult:
    comps = [lclt.lclt_compare(family, q, n, window) for n in ns]
    errs = [c.max_rel_error for c in comps]
    monotone = all(a > b for a, b in zip(errs, errs[1:]))
    csv = [lclt.CSV_HEADER] + [r for c in comps for r in c.csv_rows()]
    return SuiteResult("lclt", monotone and errs[-1] <= guard,
                       {"max_rel_errors": errs, "monotone": monotone, "guard": guard,
                        "comparisons": [c.to_json() for c in comps]}, csv)


TAYLOR_T = np.array([0.2, -0.1, 0.15, 0.05, -0.1, 0.1])


def taylor_ratios(G, q, lam, t0, halvings: int = 3) -> list:
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        rems = [lclt.taylor_check(G, q, lam, t0 / 2 ** k).remainder for k in range(halvings + 1)]
    return [rems[k] / rems[k + 1] for k in range(halvings)]


def charbound(min_ratio: float = 6.0) -> SuiteResult:
    rows = []
    ok = True
    for G, q in ((cycle(5), 4), (cycle(6), 3), (cycle(6), 5)):
        lam = np.ones(q)
        fit = lclt.char_bound_fit(G, q, lam) if q <= 4 else None
        tilted = 1 + 0.05 * np.linspace(-1, 1, q)
        t0 = np.append(TAYLOR_T[: q - 1], 0.0)
        ratios = taylor_ratios(G, q, tilted, t0)
        good = min(ratios) >= min_ratio and (fit is None or fit.ok)
        ok &= good
        row = {"n": G.n, "q": q, "taylor_ratios": ratios, "passed": good}
        if fit is not None:
            row.update(c_star=fit.c_star, points=fit.points, small_t_limit=fit.small_t_limit,
                       max_abs_phi=fit.max_abs_phi, violations=len(fit.violations))
        rows.append(row)
    return SuiteResult("charbound", ok, {"instances": rows, "min_ratio": min_ratio})


def solver_suite(n: int = 12, q: int = 3, count: int = 20, ball: float = 0.2, seed: int = 0,
                 tol: float = 1e-4) -> SuiteResult:
    G = cycle(n)
    worst_lam = worst_jac = 0.0
    for lam in solver.random_ball_lambdas(q, count, ball, seed):
        res = solver.solve_lambda(G, q, solver.psi(G, q, lam), ball_radius=ball, tol=1e-10)
        worst_lam = max(worst_lam, float(np.abs(np.array(res.lam) - lam).max()))
        J = solver.jacobian(G, q, lam)
        F = solver.fd_jacobian(G, q, lam, h=1e-4)
        worst_jac = max(worst_jac, _rel(F, J))
    return SuiteResult("solver", worst_lam <= tol and worst_jac <= tol,
                       {"max_lambda_error": worst_lam, "max_jacobian_rel_error": worst_jac, "tol": tol,
                        "instances": count})


def skewed(n: int = 24, q: int = 3, target=(10, 8, 6), ball: float = 0.2, seed: int = 0) -> SuiteResult:
    G = cycle(n)
    out = rejection.skewed_sample(G, q, target, "newton", seed=seed, ball_radius=ball)
    ok = out.success
    if ok:
        col = out.outcome.coloring
        ok = glauber.is_proper(G, col) and tuple(glauber.class_vector(col, q)) == tuple(target)
        ok = ok and out.inside_proven_radius is False
    return SuiteResult("skewed", bool(ok), out.to_json())


SUITES = {
    "moments": moments,
    "recurrence": recurrence,
    "zerofree": zerofree,
    "tv": tv,
    "contraction": contraction,
    "rejection": rejection_gof,
    "exponent": exponent,
    "detscaling": detscaling,
    "lclt": lclt_suite,
    "charbound": charbound,
    "solver": solver_suite,
    "skewed": skewed,
}
