"""Command-line entry point.

Exit codes: 0 success, 1 usage or configuration error, 2 algorithmic failure
(rejection budget exhausted, solver not converged, a verification check failed).

CSV schema for ``lclt-verify`` and ``verify --suite lclt --csv``:
    family,n,q,counts,exact,gaussian,relerr
where ``counts`` is the space-separated truncated class vector (X_1..X_{q-1}),
``exact`` and ``gaussian`` are P(X = counts) and the Gaussian density there,
and ``relerr`` is |exact - gaussian| / gaussian.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
import time

import numpy as np

from . import __version__, glauber, lclt, rejection, solver, suites, zero_probe
from .graph import GENERATORS, GraphFormatError, generate, read_graph

EXIT_OK, EXIT_USAGE, EXIT_FAIL = 0, 1, 2


class ConfigError(Exception):
    pass


def load_source(spec: str):
    kind = spec.partition(":")[0].strip().lower()
    if kind in GENERATORS and not os.path.exists(spec):
        try:
            return generate(spec)
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc
    try:
        return read_graph(spec)
    except FileNotFoundError as exc:
        raise ConfigError(f"graph file not found: {spec}") from exc
    except GraphFormatError as exc:
        raise ConfigError(f"{spec}: {exc}") from exc


def _floats(text):
    return [float(x) for x in text.split(",")] if text else None


def _ints(text):
    return [int(x) for x in text.split(",")] if text else None


def _threads(args) -> int:
    if args.threads is not None:
        return args.threads
    env = os.environ.get("CHROMA_THREADS")
    try:
        return int(env) if env else 1
    except ValueError as exc:
        raise ConfigError(f"CHROMA_THREADS must be an integer, got {env!r}") from exc


def _config(args) -> dict:
    skip = {"func", "timing", "out", "csv"}
    return {k: v for k, v in sorted(vars(args).items()) if k not in skip}


def _emit(args, payload: dict, started: float):
    doc = {"version": __version__, "config": _config(args), "seed": getattr(args, "seed", 0), **payload}
    if args.timing:
        doc["wall_clock_s"] = round(time.perf_counter() - started, 6)
    text = json.dumps(suites._plain(doc), indent=2, sort_keys=True) + "\n"
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _write_csv(rows, dest):
    buf = io.StringIO()
    csv.writer(buf, lineterminator="\n").writerows(rows)
    if dest in (None, "-"):
        sys.stdout.write(buf.getvalue())
    else:
        with open(dest, "w") as fh:
            fh.write(buf.getvalue())


def _lambda(args, q):
    lam = _floats(args.lam)
    if lam is None:
        return np.ones(q)
    if len(lam) == q - 1:
        lam.append(1.0)
    if len(lam) != q:
        raise ConfigError(f"--lam needs {q - 1} or {q} values")
    return np.array(lam)


# -- subcommands ----------------------------------------------------------------


def cmd_sample(args, started):
    G = load_source(args.graph)
    q = args.q
    try:
        target = rejection.TargetSpec.parse(args.target, G.n, q)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    cfg = rejection.RejectionConfig(K=args.K, eps=args.eps, C=args.C)
    try:
        glauber.init_coloring(G, q)
    except glauber.InsufficientColors as exc:
        raise ConfigError(str(exc)) from exc
    if target.mode == "equitable":
        lam = _lambda(args, q)
        out = rejection.rejection_sample(G, q, lam, target, args.max_iters, args.steps, args.seed, cfg)
        payload = {**out.to_json(), "inside_proven_radius": solver.inside_proven_radius(lam, G.max_degree)}
    else:
        res = rejection.skewed_sample(G, q, target.vector, args.mode, args.seed, args.ball,
                                      args.max_iters, args.steps, cfg)
        payload = res.to_json()
        out = res.outcome
    payload["mixing_regime"] = glauber.mixing_regime(q, G.max_degree)
    _emit(args, payload, started)
    if not out.success:
        print(f"rejection failed after {out.iterations} iterations", file=sys.stderr)
        return EXIT_FAIL
    return EXIT_OK


def _suite_kwargs(args) -> dict:
    kw = {}
    name = args.suite
    if name == "zerofree":
        if args.graph:
            kw["G"] = load_source(args.graph)
        if args.q:
            kw["q"] = args.q
        if args.samples:
            kw["samples"] = args.samples
        kw["threads"] = _threads(args)
    if name in ("lclt", "detscaling", "exponent") and args.ns:
        kw["ns"] = tuple(_ints(args.ns))
    if name == "lclt":
        if args.family:
            kw["family"] = args.family
        if args.q:
            kw["q"] = args.q
    if name in ("zerofree", "tv", "contraction", "rejection", "solver", "skewed", "moments", "recurrence"):
        kw["seed"] = args.seed
    return kw


def cmd_verify(args, started):
    if args.suite not in suites.SUITES:
        raise ConfigError(f"unknown suite {args.suite!r}; choose from {sorted(suites.SUITES)}")
    result = suites.SUITES[args.suite](**_suite_kwargs(args))
    print(result.line(), file=sys.stderr)
    if result.csv:
        _write_csv(result.csv, args.csv)
    _emit(args, result.to_json(), started)
    return EXIT_OK if result.passed else EXIT_FAIL


def cmd_scan(args, started):
    G = load_source(args.graph)
    rep = zero_probe.polydisc_scan(G, args.q, args.samples, seed=args.seed, delta=args.delta,
                                   radius_override=args.radius, threads=_threads(args))
    _emit(args, rep.to_json(), started)
    return EXIT_FAIL if rep.violations and rep.theorem_applies else EXIT_OK


def cmd_solve(args, started):
    G = load_source(args.graph)
    target = _floats(args.target)
    try:
        res = solver.solve_lambda(G, args.q, target, ball_radius=args.ball, tol=args.tol,
                                  max_newton_iters=args.max_iters)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    _emit(args, res.to_json(), started)
    return EXIT_OK if res.converged else EXIT_FAIL


def cmd_mix(args, started):
    G = load_source(args.graph)
    q = args.q
    lam = _lambda(args, q)
    if args.kind == "contraction":
        est = glauber.contraction_experiment(G, q, lam, args.trials, args.seed, burn_in=args.steps)
        ok = est.satisfied
    else:
        est = glauber.tv_distance_experiment(G, q, lam, args.steps or 200, args.trials, args.seed)
        ok = True
    payload = {**est.to_json(), "mixing_regime": glauber.mixing_regime(q, G.max_degree)}
    _emit(args, payload, started)
    return EXIT_OK if ok else EXIT_FAIL


def cmd_lclt_verify(args, started):
    rows = [lclt.CSV_HEADER]
    for n in _ints(args.ns):
        comp = lclt.lclt_compare(args.family, args.q, n, args.window)
        if comp.singular:
            print(f"n={n}: {comp.note}", file=sys.stderr)
        rows.extend(comp.csv_rows())
    _write_csv(rows, args.out)
    return EXIT_OK


# -- parser ---------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--threads", type=int, default=None, help="worker threads (default: $CHROMA_THREADS or 1)")
    common.add_argument("--out", default=None, help="output path (default: stdout)")
    common.add_argument("--timing", action="store_true", help="include wall-clock seconds in the report")

    p = argparse.ArgumentParser(prog="chroma", description=__doc__,
                                formatter_class=argparse.RawDescriptionHelpFormatter)
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("sample", parents=[common], help="rejection-sample a coloring with given class sizes")
    s.add_argument("--graph", required=True, help="edge-list file or generator spec (e.g. cycle:24)")
    s.add_argument("--q", type=int, required=True)
    s.add_argument("--target", default="equitable", help='"equitable" or comma-separated class sizes')
    s.add_argument("--mode", choices=("grid", "newton"), default="newton")
    s.add_argument("--lam", default=None, help="fugacities for equitable targets (default all 1)")
    s.add_argument("--ball", type=float, default=0.2)
    s.add_argument("--max-iters", type=int, default=None)
    s.add_argument("--steps", type=int, default=None, help="Glauber steps per iteration")
    s.add_argument("--K", type=float, default=10.0)
    s.add_argument("--eps", type=float, default=0.01)
    s.add_argument("--C", type=float, default=20.0)
    s.set_defaults(func=cmd_sample)

    v = sub.add_parser("verify", parents=[common], help="run a verification suite")
    v.add_argument("--suite", required=True, help=", ".join(suites.SUITES))
    v.add_argument("--graph", default=None)
    v.add_argument("--q", type=int, default=None)
    v.add_argument("--family", choices=("cycle", "path"), default=None)
    v.add_argument("--ns", default=None)
    v.add_argument("--samples", type=int, default=None)
    v.add_argument("--csv", default=None, help="CSV destination for suites that emit one ('-' for stdout)")
    v.set_defaults(func=cmd_verify)

    c = sub.add_parser("scan", parents=[common], help="sample |Z| over the fugacity polydisc")
    c.add_argument("--graph", required=True)
    c.add_argument("--q", type=int, required=True)
    c.add_argument("--samples", type=int, default=10_000)
    c.add_argument("--delta", type=int, default=None)
    c.add_argument("--radius", type=float, default=None)
    c.set_defaults(func=cmd_scan)

    o = sub.add_parser("solve", aliases=["solve-lambda"], parents=[common], help="solve Ψ(λ) = target")
    o.add_argument("--graph", required=True)
    o.add_argument("--q", type=int, required=True)
    o.add_argument("--target", required=True, help="q-1 (or q) comma-separated class sizes")
    o.add_argument("--ball", type=float, default=0.2)
    o.add_argument("--tol", type=float, default=1e-9)
    o.add_argument("--max-iters", type=int, default=50)
    o.set_defaults(func=cmd_solve)

    m = sub.add_parser("mix", parents=[common], help="path-coupling contraction or TV experiment")
    m.add_argument("--graph", required=True)
    m.add_argument("--q", type=int, required=True)
    m.add_argument("--lam", default=None)
    m.add_argument("--trials", type=int, default=100_000)
    m.add_argument("--kind", choices=("contraction", "tv"), default="contraction")
    m.add_argument("--steps", type=int, default=None, help="burn-in (contraction) or chain length (tv)")
    m.set_defaults(func=cmd_mix)

    lv = sub.add_parser("lclt-verify", parents=[common], help="CSV of exact vs Gaussian class-vector probabilities")
    lv.add_argument("--family", choices=("cycle", "path"), default="cycle")
    lv.add_argument("--q", type=int, default=3)
    lv.add_argument("--ns", default="30,60,90")
    lv.add_argument("--window", type=float, default=1.0)
    lv.set_defaults(func=cmd_lclt_verify)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_USAGE
    started = time.perf_counter()
    try:
        if getattr(args, "q", None) is not None and args.q < 1:
            raise ConfigError("--q must be positive")
        return args.func(args, started)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
