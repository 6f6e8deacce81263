"""Solver x problem benchmark matrices and Dolan-More performance profiles."""
from __future__ import annotations

import csv
import math
import os
import statistics
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Optional

from .problems import make_problem
from .solver import SOLVERS, RunRecord, SolverConfig, Status, solve, write_trace

__all__ = [
    "SolverSpec",
    "BenchPlan",
    "ProfileCurve",
    "EmptyInput",
    "PlanError",
    "METRICS",
    "RECORD_FIELDS",
    "run_matrix",
    "perf_profile",
    "emit_csv",
    "read_records",
    "read_curves",
]

METRICS = ("time", "iters", "fevals", "gevals")
RECORD_FIELDS = ("problem", "n", "solver", "status", "iters", "f_evals", "g_evals",
                 "final_f", "final_gnorm_inf", "wall_time_s")
CURVE_FIELDS = ("solver", "tau", "rho")


class EmptyInput(ValueError):
    pass


class PlanError(ValueError):
    """The plan itself is invalid; nothing was run."""


@dataclass(frozen=True)
class SolverSpec:
    label: str
    solver: str
    cfg: SolverConfig = field(default_factory=SolverConfig)


@dataclass(frozen=True)
class BenchPlan:
    problems: tuple
    solvers: tuple
    repetitions: int = 1
    out: Optional[str] = None
    parallelism: int = 1
    trace_dir: Optional[str] = None

    def __post_init__(self):
        object.__setattr__(self, "problems", tuple((str(p), int(n)) for p, n in self.problems))
        object.__setattr__(self, "solvers", tuple(self.solvers))
        if not self.problems:
            raise PlanError("plan has no problems")
        if not self.solvers:
            raise PlanError("plan has no solvers")
        labels = [s.label for s in self.solvers]
        if len(set(labels)) != len(labels):
            raise PlanError(f"solver labels must be unique, got {labels}")
        for s in self.solvers:
            if s.solver not in SOLVERS:
                raise PlanError(f"unknown solver {s.solver!r}; expected one of {sorted(SOLVERS)}")
        if self.repetitions < 1:
            raise PlanError("repetitions must be >= 1")
        if self.parallelism < 1:
            raise PlanError("parallelism must be >= 1")


@dataclass(frozen=True)
class ProfileCurve:
    solver: str
    points: tuple

    def rho(self, tau: float) -> float:
        """Fraction of problems solved within ratio ``tau``."""
        val = 0.0
        for t, r in self.points:
            if t <= tau:
                val = r
        return val


def _one(job):
    (name, n), spec, rep, trace_dir = job
    p = make_problem(name, n)
    cfg = spec.cfg.with_(keep_trace=True) if trace_dir else spec.cfg
    rec = solve(spec.solver, p, None, cfg)
    rec.solver = spec.label
    if trace_dir:
        write_trace(rec.trace, os.path.join(trace_dir, f"{name}_n{n}_{spec.label}_r{rep}.jsonl"))
        if not spec.cfg.keep_trace:
            rec.trace = None
    return (name, n, spec.label, rep), rec


def run_matrix(plan: BenchPlan) -> list:
    """Run every (problem, solver, repetition) of the plan.

    Output is sorted by problem, dimension, solver label and repetition, so it
    does not depend on ``plan.parallelism``.
    """
    for name, n in plan.problems:
        make_problem(name, n)  # unknown names and bad dimensions abort before any run
    if plan.trace_dir:
        os.makedirs(plan.trace_dir, exist_ok=True)
    jobs = [(pn, spec, rep, plan.trace_dir) for pn in plan.problems for spec in plan.solvers
            for rep in range(plan.repetitions)]
    if plan.parallelism > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=plan.parallelism) as ex:
            results = list(ex.map(_one, jobs))
    else:
        results = [_one(j) for j in jobs]
    results.sort(key=lambda kr: kr[0])
    records = [r for _, r in results]
    if plan.out:
        emit_csv(records, plan.out)
    return records


def _metric(rec, metric):
    if metric == "time":
        return float(rec.wall_time_s)
    if metric == "iters":
        return float(rec.iters)
    if metric == "fevals":
        return float(rec.f_evals)
    return float(rec.g_evals)


def _status(rec):
    return str(rec.status)


def perf_profile(records, metric: str = "time") -> list:
    """Dolan-More profiles ``rho_s(tau) = |{p : r_ps <= tau}| / |P|``.

    Repetitions of a (problem, solver) pair are collapsed by the median of the
    metric over converged runs; a pair with no converged run is a failure and
    gets ``r = inf``. Breakpoints are the union of all finite ratios, so every
    curve is evaluated on the same tau grid. Input order does not matter.
    """
    if metric not in METRICS:
        raise ValueError(f"metric must be one of {METRICS}")
    records = list(records)
    if not records:
        raise EmptyInput("no records")
    by_pair = {}
    for r in records:
        by_pair.setdefault(((r.problem, int(r.n)), r.solver), []).append(r)
    problems = sorted({k[0] for k in by_pair})
    solvers = sorted({k[1] for k in by_pair})
    cost = {}
    for key, recs in by_pair.items():
        ok = [_metric(r, metric) for r in recs if _status(r) == Status.CONVERGED.value]
        cost[key] = statistics.median(ok) if ok else math.inf
    ratios = {s: [] for s in solvers}
    for p in problems:
        finite = [cost[(p, s)] for s in solvers if (p, s) in cost and math.isfinite(cost[(p, s)])]
        best = min(finite) if finite else math.inf
        for s in solvers:
            c = cost.get((p, s), math.inf)
            if not math.isfinite(c):
                ratios[s].append(math.inf)
            elif best == 0.0:
                # zero-cost runs (already stationary) tie with each other
                ratios[s].append(1.0 if c == 0.0 else math.inf)
            else:
                ratios[s].append(c / best)
    taus = sorted({r for rs in ratios.values() for r in rs if math.isfinite(r)})
    n_p = len(problems)
    curves = []
    for s in solvers:
        rs = sorted(ratios[s])
        pts, i = [], 0
        for t in taus:
            while i < len(rs) and rs[i] <= t:
                i += 1
            pts.append((t, i / n_p))
        curves.append(ProfileCurve(s, tuple(pts)))
    return curves


def _fmt(v):
    if isinstance(v, bool):
        return str(v)
    if isinstance(v, float):
        return format(v, ".17g")
    return str(v)


def emit_csv(items, path, kind: str | None = None):
    """Write records or profile curves as CSV (17 significant digits).

    ``kind`` is ``"records"`` or ``"curves"``; it is inferred from the items
    when omitted, and an empty list without a kind writes the records header.

    Raises
    ------
    OSError
        With the target path in the message.
    """
    items = list(items)
    if kind is None:
        kind = "curves" if items and isinstance(items[0], ProfileCurve) else "records"
    if kind not in ("records", "curves"):
        raise ValueError("kind must be 'records' or 'curves'")
    try:
        with open(path, "w", newline="", encoding="utf-8") as fh:
            w = csv.writer(fh, lineterminator="\n")
            if kind == "curves":
                w.writerow(CURVE_FIELDS)
                for c in items:
                    for t, r in c.points:
                        w.writerow((c.solver, _fmt(float(t)), _fmt(float(r))))
            else:
                w.writerow(RECORD_FIELDS)
                for r in items:
                    w.writerow([_fmt(str(r.status) if k == "status" else getattr(r, k)) for k in RECORD_FIELDS])
    except OSError as exc:
        raise OSError(exc.errno, f"cannot write {path}: {exc.strerror}") from exc


def read_records(path) -> list:
    """Parse a records CSV back into :class:`RunRecord` objects (no traces)."""
    out = []
    with open(path, newline="", encoding="utf-8") as fh:
        rd = csv.DictReader(fh)
        missing = set(RECORD_FIELDS) - set(rd.fieldnames or ())
        if missing:
            raise ValueError(f"{path}: missing columns {sorted(missing)}")
        for row in rd:
            out.append(RunRecord(
                problem=row["problem"], n=int(row["n"]), solver=row["solver"], status=Status(row["status"]),
                iters=int(row["iters"]), f_evals=int(row["f_evals"]), g_evals=int(row["g_evals"]),
                final_f=float(row["final_f"]), final_gnorm_inf=float(row["final_gnorm_inf"]),
                wall_time_s=float(row["wall_time_s"]),
            ))
    return out


def read_curves(path) -> list:
    pts = {}
    with open(path, newline="", encoding="utf-8") as fh:
        for row in csv.DictReader(fh):
            pts.setdefault(row["solver"], []).append((float(row["tau"]), float(row["rho"])))
    return [ProfileCurve(s, tuple(v)) for s, v in pts.items()]
