"""Command line front end: ``list-problems``, ``run`` and ``profile``."""
from __future__ import annotations

import argparse
import csv
import sys

from .bench import METRICS, BenchPlan, PlanError, SolverSpec, emit_csv, perf_profile, read_records, run_matrix
from .direction import GrTestConstants
from .hk import STRATEGIES
from .linesearch import LineSearchConfig
from .problems import BadDimension, UnknownProblem, default_dimension, make_problem, problem_names
from .solver import SOLVERS, SolverConfig


def _csv_list(text):
    return [t.strip() for t in text.split(",") if t.strip()]


def _parser():
    ap = argparse.ArgumentParser(prog="gmmopt", description="Gradient method with momentum: benchmarks and profiles.")
    sub = ap.add_subparsers(dest="cmd", required=True)

    lp = sub.add_parser("list-problems", help="list the built-in test problems as CSV")
    lp.add_argument("--out", default="-", help="output path (default stdout)")

    rp = sub.add_parser("run", help="run a solver x problem matrix")
    rp.add_argument("--problems", default="all", help="comma-separated names or 'all'")
    rp.add_argument("--n", type=int, default=None, help="dimension (default: each problem's default)")
    rp.add_argument("--solvers", default="gmm,sd,cg,lbfgs", help=f"comma-separated subset of {','.join(SOLVERS)}")
    rp.add_argument("--hk", default="interp", choices=STRATEGIES, help="model-matrix strategy for gmm")
    rp.add_argument("--tol", type=float, default=1e-6, help="stop when |g|_inf <= tol")
    rp.add_argument("--max-iters", type=int, default=1_000_000)
    mono = rp.add_mutually_exclusive_group()
    mono.add_argument("--monotone", dest="nonmonotone", action="store_false")
    mono.add_argument("--nonmonotone", dest="nonmonotone", action="store_true")
    rp.set_defaults(nonmonotone=True)
    rp.add_argument("--out", required=True, help="records CSV path")
    rp.add_argument("--trace-dir", default=None, help="write one JSONL trace per run here")
    rp.add_argument("--jobs", type=int, default=1, help="worker processes")
    rp.add_argument("--reps", type=int, default=1, help="repetitions per (problem, solver)")
    rp.add_argument("--c1", type=float, default=GrTestConstants.c1)
    rp.add_argument("--c2", type=float, default=GrTestConstants.c2)
    rp.add_argument("--tau", type=float, default=None, help="eigenvalue floor of the safeguard repair")
    rp.add_argument("--gamma", type=float, default=LineSearchConfig.gamma)
    rp.add_argument("--delta", type=float, default=LineSearchConfig.delta)
    rp.add_argument("--eta-zh", type=float, default=LineSearchConfig.eta_zh)
    rp.add_argument("--time-limit", type=float, default=None, help="per-run wall clock cap in seconds")

    pp = sub.add_parser("profile", help="Dolan-More performance profiles from a records CSV")
    pp.add_argument("--input", required=True)
    pp.add_argument("--metric", choices=METRICS, default="time")
    pp.add_argument("--out", required=True)
    return ap


def _list_problems(args):
    fh = sys.stdout if args.out == "-" else open(args.out, "w", newline="", encoding="utf-8")
    try:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(("name", "default_n", "known_fmin"))
        for name in problem_names():
            n = default_dimension(name)
            fmin = make_problem(name, n).known_fmin
            w.writerow((name, n, "" if fmin is None else format(fmin, ".17g")))
    finally:
        if fh is not sys.stdout:
            fh.close()
    return 0


def _run(args):
    names = problem_names() if args.problems == "all" else _csv_list(args.problems)
    problems = [(name, args.n if args.n is not None else default_dimension(name)) for name in names]
    cfg = SolverConfig(
        tol_grad_inf=args.tol,
        max_iters=args.max_iters,
        hk_strategy=args.hk,
        gr_constants=GrTestConstants(args.c1, args.c2),
        ls=LineSearchConfig(gamma=args.gamma, delta=args.delta, nonmonotone=args.nonmonotone, eta_zh=args.eta_zh),
        tau=args.tau,
        time_limit_s=args.time_limit,
    )
    specs = [SolverSpec(s, s, cfg) for s in _csv_list(args.solvers)]
    plan = BenchPlan(problems, specs, repetitions=args.reps, out=args.out, parallelism=args.jobs,
                     trace_dir=args.trace_dir)
    records = run_matrix(plan)
    for r in records:
        print(f"{r.problem:<20} n={r.n:<6} {r.solver:<8} {str(r.status):<18} iters={r.iters}", file=sys.stderr)
    return 0


def _profile(args):
    curves = perf_profile(read_records(args.input), args.metric)
    emit_csv(curves, args.out, kind="curves")
    return 0


def main(argv=None) -> int:
    args = _parser().parse_args(argv)
    try:
        if args.cmd == "list-problems":
            return _list_problems(args)
        if args.cmd == "run":
            return _run(args)
        return _profile(args)
    except (PlanError, UnknownProblem, BadDimension, ValueError, OSError) as exc:
        msg = exc.args[0] if isinstance(exc, KeyError) and exc.args else exc
        print(f"gmmopt: error: {msg}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
