"""Gradient method with momentum and first-order baselines.

All solvers share one driver: the same stopping rule (``|g|_inf <= tol``),
iteration cap, Armijo line search from the unit step, and evaluation
bookkeeping. They differ only in how the search direction is produced.
"""
from __future__ import annotations

import json
import math
import time
from collections import deque
from dataclasses import asdict, dataclass, field, replace
from enum import Enum
from typing import Optional

import numpy as np

from .direction import GrTestConstants, compute_direction
from .hk import STRATEGIES, HkBuildContext, build_hk
from .linalg2 import DEGENERACY_TOL
from .linesearch import LineSearchConfig, LineSearchFailure, NonmonotoneState, armijo, zh_update
from .problems import CountingObjective

__all__ = [
    "Status",
    "SolverConfig",
    "SolverState",
    "IterTrace",
    "RunRecord",
    "gmm_solve",
    "steepest_descent_solve",
    "cg_solve",
    "lbfgs_solve",
    "SOLVERS",
    "solve",
    "write_trace",
    "audit_counters",
]


class Status(str, Enum):
    CONVERGED = "Converged"
    MAX_ITERS = "MaxIters"
    LINE_SEARCH_FAILURE = "LineSearchFailure"
    TIME_LIMIT = "TimeLimit"
    NUMERICAL_ERROR = "NumericalError"

    def __str__(self):
        return self.value


@dataclass(frozen=True)
class SolverConfig:
    tol_grad_inf: float = 1e-6
    max_iters: int = 1_000_000
    hk_strategy: str = "interp"
    gr_constants: GrTestConstants = field(default_factory=GrTestConstants)
    ls: LineSearchConfig = field(default_factory=LineSearchConfig)
    tau: Optional[float] = None
    time_limit_s: Optional[float] = None
    xi: Optional[float] = None
    mu_min: float = 1e-10
    mu_max: float = 1e10
    scale_first: bool = False
    force_safeguard: bool = False
    lbfgs_memory: int = 10
    curvature_tol: float = 1e-10
    keep_trace: bool = False

    def __post_init__(self):
        if not self.tol_grad_inf > 0:
            raise ValueError("tol_grad_inf must be positive")
        if self.max_iters < 1:
            raise ValueError("max_iters must be >= 1")
        if self.hk_strategy not in STRATEGIES:
            raise ValueError(f"hk_strategy must be one of {STRATEGIES}")
        if self.lbfgs_memory < 0:
            raise ValueError("lbfgs_memory must be >= 0")

    def with_(self, **kw) -> "SolverConfig":
        return replace(self, **kw)


@dataclass
class SolverState:
    k: int
    x: np.ndarray
    g: np.ndarray
    f: float
    s: np.ndarray
    y: np.ndarray
    f_prev: float
    alpha_prev: float
    beta_prev: float
    nm: NonmonotoneState
    f_evals: int = 0
    g_evals: int = 0


@dataclass(frozen=True)
class IterTrace:
    k: int
    f: float
    gnorm_inf: float
    alpha: float
    beta: float
    eta: float
    backtracks: int
    used_safeguard: bool
    hk_f_evals: int = 0
    hk_g_evals: int = 0


@dataclass
class RunRecord:
    problem: str
    n: int
    solver: str
    status: Status
    iters: int
    f_evals: int
    g_evals: int
    final_f: float
    final_gnorm_inf: float
    wall_time_s: float
    trace: Optional[list] = None
    x: Optional[np.ndarray] = field(default=None, repr=False)
    # bookkeeping tallies, independent of the counting wrapper
    ls_f_evals: int = 0
    hk_f_evals: int = 0
    hk_g_evals: int = 0
    safeguard_count: int = 0

    def key(self):
        """Everything except wall time; equal keys mean identical runs."""
        trace = None if self.trace is None else tuple(self.trace)
        xb = None if self.x is None else self.x.tobytes()
        return (self.problem, self.n, self.solver, self.status, self.iters, self.f_evals, self.g_evals,
                _bits(self.final_f), _bits(self.final_gnorm_inf), trace, xb,
                self.ls_f_evals, self.hk_f_evals, self.hk_g_evals, self.safeguard_count)


def _bits(v):
    return np.float64(v).tobytes()


@dataclass
class _Step:
    d: np.ndarray
    alpha: float = 1.0
    beta: float = 0.0
    used_safeguard: bool = False
    hk_f: int = 0
    hk_g: int = 0


class _Driver:
    name = "base"

    def __init__(self, p, cfg: SolverConfig):
        self.p = p
        self.cfg = cfg

    def direction(self, st: SolverState, cp) -> _Step:
        raise NotImplementedError

    def accepted(self, st: SolverState, step: _Step, eta: float, g_new: np.ndarray):
        pass

    def run(self, x0) -> RunRecord:
        cfg = self.cfg
        t0 = time.perf_counter()
        cp = CountingObjective(self.p)
        x = np.array(x0, dtype=float)
        if x.shape != (self.p.dim,):
            raise ValueError(f"x0 has shape {x.shape}, expected ({self.p.dim},)")
        if not np.all(np.isfinite(x)):
            raise ValueError("x0 must be finite")
        f = cp.eval(x)
        g = np.asarray(cp.grad(x), dtype=float)
        zero = np.zeros_like(x)
        st = SolverState(0, x, g, f, zero, zero, f, 0.0, 0.0, NonmonotoneState(f, 1.0))
        trace = [] if cfg.keep_trace else None
        ls_evals = hk_f = hk_g = n_safe = 0

        while True:
            if not (math.isfinite(st.f) and np.all(np.isfinite(st.g))):
                status = Status.NUMERICAL_ERROR
                break
            gn = float(np.max(np.abs(st.g), initial=0.0))
            if gn <= cfg.tol_grad_inf:
                status = Status.CONVERGED
                break
            if st.k >= cfg.max_iters:
                status = Status.MAX_ITERS
                break
            if cfg.time_limit_s is not None and time.perf_counter() - t0 > cfg.time_limit_s:
                status = Status.TIME_LIMIT
                break

            step = self.direction(st, cp)
            hk_f += step.hk_f
            hk_g += step.hk_g
            gtd = float(st.g @ step.d)
            if not (gtd < 0 and np.all(np.isfinite(step.d))):
                status = Status.NUMERICAL_ERROR
                break
            f_ref = st.nm.C if cfg.ls.nonmonotone else st.f
            try:
                ls = armijo(cp, st.x, step.d, st.g, f_ref, cfg.ls, gtd)
            except LineSearchFailure as exc:
                ls_evals += exc.evals
                status = Status.LINE_SEARCH_FAILURE
                break
            ls_evals += ls.evals
            n_safe += step.used_safeguard
            if trace is not None:
                trace.append(IterTrace(st.k, st.f, gn, step.alpha, step.beta, ls.eta, ls.backtracks,
                                       step.used_safeguard, step.hk_f, step.hk_g))
            g_new = np.asarray(cp.grad(ls.x_new), dtype=float)
            self.accepted(st, step, ls.eta, g_new)
            st.s = ls.x_new - st.x
            st.y = g_new - st.g
            st.f_prev = st.f
            st.alpha_prev = ls.eta * step.alpha
            st.beta_prev = ls.eta * step.beta
            st.x, st.f, st.g = ls.x_new, ls.f_new, g_new
            if cfg.ls.nonmonotone:
                st.nm = zh_update(st.nm, ls.f_new, cfg.ls.eta_zh)
            st.k += 1

        return RunRecord(
            problem=self.p.name,
            n=self.p.dim,
            solver=self.name,
            status=status,
            iters=st.k,
            f_evals=cp.nf,
            g_evals=cp.ng,
            final_f=float(st.f),
            final_gnorm_inf=float(np.max(np.abs(st.g), initial=0.0)),
            wall_time_s=time.perf_counter() - t0,
            trace=trace,
            x=st.x,
            ls_f_evals=ls_evals,
            hk_f_evals=hk_f,
            hk_g_evals=hk_g,
            safeguard_count=n_safe,
        )


class _GMM(_Driver):
    name = "gmm"

    def direction(self, st, cp):
        cfg = self.cfg
        ctx = HkBuildContext(st.x, st.g, st.s, st.y, st.f, st.f_prev, st.alpha_prev, st.beta_prev)
        H0, nf, ng = None, 0, 0
        if ctx.snorm > DEGENERACY_TOL:
            res = build_hk(cfg.hk_strategy, cp, ctx, cfg.xi, cfg.mu_min, cfg.mu_max)
            H0, nf, ng = res.H, res.f_evals_used, res.g_evals_used
        out = compute_direction(ctx, H0, cfg.gr_constants, cfg.tau, cfg.scale_first, cfg.force_safeguard)
        return _Step(out.d, out.alpha, out.beta, out.used_safeguard, nf, ng)


class _SteepestDescent(_Driver):
    name = "sd"

    def direction(self, st, cp):
        return _Step(-st.g)


class _PRPlusCG(_Driver):
    """Polak-Ribiere+ nonlinear conjugate gradient with descent restarts."""

    name = "cg"

    def __init__(self, p, cfg):
        super().__init__(p, cfg)
        self.d_prev = None
        self.g_prev = None

    def direction(self, st, cp):
        g = st.g
        if self.d_prev is None:
            return _Step(-g)
        beta = max(0.0, float(g @ (g - self.g_prev)) / float(self.g_prev @ self.g_prev))
        d = -g + beta * self.d_prev
        if not float(g @ d) < -1e-12 * float(np.linalg.norm(g)) * float(np.linalg.norm(d)):
            return _Step(-g, used_safeguard=True)
        return _Step(d, 1.0, beta)

    def accepted(self, st, step, eta, g_new):
        self.d_prev = step.d
        self.g_prev = st.g


class _LBFGS(_Driver):
    name = "lbfgs"

    def __init__(self, p, cfg):
        super().__init__(p, cfg)
        self.pairs = deque(maxlen=cfg.lbfgs_memory) if cfg.lbfgs_memory > 0 else None
        self.gamma = 1.0

    def direction(self, st, cp):
        q = st.g.copy()
        if not self.pairs:
            return _Step(-self.gamma * q)
        a = []
        for s, y, rho in reversed(self.pairs):
            ai = rho * float(s @ q)
            q -= ai * y
            a.append(ai)
        r = self.gamma * q
        for (s, y, rho), ai in zip(self.pairs, reversed(a)):
            b = rho * float(y @ r)
            r += (ai - b) * s
        return _Step(-r)

    def accepted(self, st, step, eta, g_new):
        if self.pairs is None:
            return
        s = eta * step.d
        y = g_new - st.g
        sy = float(s @ y)
        if sy > self.cfg.curvature_tol * float(np.linalg.norm(s)) * float(np.linalg.norm(y)):
            self.pairs.append((s, y, 1.0 / sy))
            self.gamma = sy / float(y @ y)


def gmm_solve(p, x0=None, cfg: SolverConfig = SolverConfig()) -> RunRecord:
    """Run the gradient method with momentum from ``x0`` (default ``p.start``)."""
    return _GMM(p, cfg).run(p.start if x0 is None else x0)


def steepest_descent_solve(p, x0=None, cfg: SolverConfig = SolverConfig()) -> RunRecord:
    return _SteepestDescent(p, cfg).run(p.start if x0 is None else x0)


def cg_solve(p, x0=None, cfg: SolverConfig = SolverConfig()) -> RunRecord:
    return _PRPlusCG(p, cfg).run(p.start if x0 is None else x0)


def lbfgs_solve(p, x0=None, cfg: SolverConfig = SolverConfig(), m: int | None = None) -> RunRecord:
    """Limited-memory BFGS (two-loop recursion) with memory ``m`` (default ``cfg.lbfgs_memory``)."""
    if m is not None:
        cfg = cfg.with_(lbfgs_memory=m)
    return _LBFGS(p, cfg).run(p.start if x0 is None else x0)


SOLVERS = {
    "gmm": gmm_solve,
    "sd": steepest_descent_solve,
    "cg": cg_solve,
    "lbfgs": lbfgs_solve,
}


def solve(solver: str, p, x0=None, cfg: SolverConfig = SolverConfig()) -> RunRecord:
    try:
        fn = SOLVERS[solver]
    except KeyError:
        raise ValueError(f"unknown solver {solver!r}; expected one of {sorted(SOLVERS)}") from None
    return fn(p, x0, cfg)


def audit_counters(rec: RunRecord, max_backtracks: int | None = None) -> bool:
    """Check the evaluation identity of a run.

    ``f_evals = sum(backtracks + 1) + strategy f-charges + 1`` and
    ``g_evals = iters + strategy g-charges + 1``. Uses the trace when present;
    a terminal line-search failure adds ``max_backtracks + 1`` f-evaluations.
    """
    if rec.trace is not None:
        ls_f = sum(t.backtracks + 1 for t in rec.trace)
        hk_f = sum(t.hk_f_evals for t in rec.trace)
        hk_g = sum(t.hk_g_evals for t in rec.trace)
        if len(rec.trace) != rec.iters:
            return False
        if rec.status == Status.LINE_SEARCH_FAILURE:
            if max_backtracks is None:
                return False
            ls_f += max_backtracks + 1
        # a direction built on the final, failed iteration still spent its strategy evaluations
        extra_f = rec.hk_f_evals - hk_f
        extra_g = rec.hk_g_evals - hk_g
        if rec.status == Status.CONVERGED and (extra_f or extra_g):
            return False
        hk_f, hk_g = hk_f + extra_f, hk_g + extra_g
    else:
        ls_f, hk_f, hk_g = rec.ls_f_evals, rec.hk_f_evals, rec.hk_g_evals
    return rec.f_evals == ls_f + hk_f + 1 and rec.g_evals == rec.iters + hk_g + 1


def write_trace(trace, path):
    """Write one JSON object per iteration."""
    with open(path, "w", encoding="utf-8") as fh:
        for t in trace:
            row = asdict(t)
            keep = ("k", "f", "gnorm_inf", "alpha", "beta", "eta", "backtracks", "used_safeguard")
            fh.write(json.dumps({k: row[k] for k in keep}) + "\n")
