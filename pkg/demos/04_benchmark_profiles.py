"""A small benchmark matrix and its performance profiles.

Writes demos_out/runs.csv and one profile CSV per metric. The same thing is
available from the command line:

    gmmopt run --problems all --n 100 --out runs.csv
    gmmopt profile --input runs.csv --metric iters --out profile.csv
"""
import os

from gmmopt import BenchPlan, SolverConfig, SolverSpec, emit_csv, perf_profile, run_matrix

out_dir = "demos_out"
os.makedirs(out_dir, exist_ok=True)

cfg = SolverConfig(max_iters=20_000)
problems = [(name, 100) for name in ("arwhead", "dqdrtic", "engval1", "ext-rosenbrock", "nondia", "woods")]
solvers = [SolverSpec(s, s, cfg) for s in ("gmm", "sd", "cg", "lbfgs")]
records = run_matrix(BenchPlan(problems, solvers, out=os.path.join(out_dir, "runs.csv")))

for r in records:
    print(f"{r.problem:15s} {r.solver:6s} {str(r.status):10s} iters={r.iters:6d} time={r.wall_time_s:.3f}s")

for metric in ("iters", "fevals", "time"):
    curves = perf_profile(records, metric)
    emit_csv(curves, os.path.join(out_dir, f"profile_{metric}.csv"))
    print(f"\nrho(tau=1) by {metric}: " + ", ".join(f"{c.solver} {c.rho(1.0):.2f}" for c in curves))
    print(f"rho(tau=4) by {metric}: " + ", ".join(f"{c.solver} {c.rho(4.0):.2f}" for c in curves))
