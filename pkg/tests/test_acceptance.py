"""Acceptance suite: one test per criterion, each reporting a PASS/FAIL line."""
import math
import time
from fractions import Fraction

import numpy as np
import pytest

from gmmopt.bench import BenchPlan, SolverSpec, perf_profile, run_matrix
from gmmopt.direction import GrTestConstants, safeguarded_direction, solve_subspace
from gmmopt.hk import HkBuildContext, build_hk
from gmmopt.linalg2 import Sym2, eig_bounds
from gmmopt.linesearch import LineSearchConfig
from gmmopt.problems import ObjectiveFunction, make_problem, problem_names, quadratic_diag, random_quadratic
from gmmopt.solver import (
    RunRecord,
    SolverConfig,
    Status,
    audit_counters,
    gmm_solve,
    solve,
    steepest_descent_solve,
)

SLACK = 1e-9


def _rotated_spd2(rng, lo, hi):
    lam = np.exp(rng.uniform(math.log(lo), math.log(hi), 2))
    q, _ = np.linalg.qr(rng.standard_normal((2, 2)))
    return Sym2.from_array(q @ np.diag(lam) @ q.T)


def test_c1_safeguard_bounds(report):
    rng = np.random.default_rng(2024)
    t0 = time.perf_counter()
    worst = 0.0
    n_bad = 0
    for _ in range(1000):
        Hhat = _rotated_spd2(rng, 1e-3, 1e3)
        g = rng.standard_normal(50) * math.exp(rng.uniform(-3, 3))
        s = rng.standard_normal(50) * math.exp(rng.uniform(-3, 3))
        out = safeguarded_direction(g, s, Hhat)
        lmin, lmax = eig_bounds(Hhat)
        gn2 = float(g @ g)
        gn = math.sqrt(gn2)
        dn = float(np.linalg.norm(out.d))
        # each ratio must be <= 1 + slack
        r = max(
            (-gn2 / lmax) / float(g @ out.d) if g @ out.d < 0 else math.inf,
            (gn / lmax) / dn,
            dn / (2 * gn / lmin),
        )
        worst = max(worst, r)
        n_bad += r > 1 + SLACK
    elapsed = time.perf_counter() - t0
    ok = n_bad == 0 and elapsed < 5.0
    report(1, "safeguard direction bounds", ok, f"1000 instances, worst ratio {worst:.6f}, {elapsed:.2f}s")
    assert n_bad == 0
    assert elapsed < 5.0


def test_c2_bk_bounds(report):
    rng = np.random.default_rng(7)
    n, n_bad, worst = 10, 0, 0.0
    for _ in range(500):
        lam = np.exp(rng.uniform(math.log(1e-2), math.log(1e2), n))
        q, _ = np.linalg.qr(rng.standard_normal((n, n)))
        B = (q * lam) @ q.T
        B = 0.5 * (B + B.T)
        eta1, eta2 = np.linalg.eigvalsh(B)[[0, -1]]
        g, s = rng.standard_normal(n), rng.standard_normal(n)
        P = np.column_stack([-g, s])
        H0 = Sym2.from_array(P.T @ B @ P)
        alpha, beta = solve_subspace(H0, float(g @ g), float(g @ s))
        d = -alpha * g + beta * s
        gn = np.linalg.norm(g)
        dn = np.linalg.norm(d)
        r = max(
            (-(eta1 / eta2**2) * gn**2) / float(g @ d) if g @ d < 0 else math.inf,
            (gn / eta2) / dn,
            dn / (gn / eta1),
        )
        worst = max(worst, r)
        n_bad += r > 1 + SLACK
    report(2, "B_k direction bounds", n_bad == 0, f"500 instances, worst ratio {worst:.6f}")
    assert n_bad == 0


def _ctx(p, x, s, a, b):
    g = p.grad(x)
    return HkBuildContext(x, g, s, g - p.grad(x - s), p.eval(x), p.eval(x - s), a, b)


def _rel(H, ref):
    return float(np.abs(H.to_array() - ref).max() / np.abs(ref).max())


def test_c3_strategy_exactness(report):
    rng = np.random.default_rng(3)
    n = 20
    worst = {"fd-hvp": 0.0, "interp": 0.0, "diag-bb": 0.0}
    for _ in range(100):
        M = rng.standard_normal((n, n))
        A = M @ M.T / n + 0.1 * np.eye(n)
        p = ObjectiveFunction("q", n, lambda x, A=A: float(0.5 * x @ (A @ x)), lambda x, A=A: A @ x, np.ones(n))
        x, s = rng.standard_normal(n), rng.standard_normal(n)
        a, b = rng.uniform(0.1, 2.0, 2) * rng.choice([-1.0, 1.0], 2)
        ctx = _ctx(p, x, s, a, b)
        ref = np.array([[ctx.g @ A @ ctx.g, -(ctx.g @ A @ s)], [-(ctx.g @ A @ s), s @ A @ s]])
        for strat in ("fd-hvp", "interp"):
            res = build_hk(strat, p, ctx)
            assert res.strategy == strat
            worst[strat] = max(worst[strat], _rel(res.H, ref))
        a_diag = np.exp(rng.uniform(-3, 3, n))
        pd = quadratic_diag(n, a=a_diag)
        ctx = _ctx(pd, x, s, a, b)
        D = np.diag(a_diag)
        ref = np.array([[ctx.g @ D @ ctx.g, -(ctx.g @ D @ s)], [-(ctx.g @ D @ s), s @ D @ s]])
        worst["diag-bb"] = max(worst["diag-bb"], _rel(build_hk("diag-bb", pd, ctx).H, ref))
    ok = worst["fd-hvp"] <= 1e-7 and worst["interp"] <= 1e-7 and worst["diag-bb"] <= 1e-10
    report(3, "H_k strategies exact on quadratics", ok,
           ", ".join(f"{k} {v:.2e}" for k, v in worst.items()))
    assert ok


def test_c4_protocol_constants(report):
    cfg = SolverConfig()
    p = make_problem("ext-rosenbrock", 10)
    rec = gmm_solve(p, cfg=cfg.with_(keep_trace=True, max_iters=3))
    t0 = rec.trace[0]
    checks = {
        "delta": cfg.ls.delta == 0.5,
        "gamma": cfg.ls.gamma == 1e-5,
        "tol": cfg.tol_grad_inf == 1e-6,
        "max_iters": cfg.max_iters == 1_000_000,
        "k0_beta": t0.k == 0 and t0.beta == 0.0,
        "k0_step": t0.alpha == 1.0,
    }
    ok = all(checks.values())
    report(4, "protocol constants and null first momentum", ok,
           ", ".join(k for k, v in checks.items() if not v) or "all exact")
    assert ok


@pytest.fixture(scope="module")
def bench():
    cfg = SolverConfig(max_iters=50_000)
    specs = [SolverSpec("gmm", "gmm", cfg.with_(keep_trace=True))] + [
        SolverSpec(s, s, cfg) for s in ("sd", "cg", "lbfgs")]
    problems = [(name, 100) for name in problem_names()]
    t0 = time.perf_counter()
    recs = run_matrix(BenchPlan(problems, specs))
    return recs, time.perf_counter() - t0, specs


def test_c5_desk_benchmark(report, bench):
    recs, elapsed, _ = bench
    gmm = [r for r in recs if r.solver == "gmm"]
    solved = [r for r in gmm if r.status == Status.CONVERGED]
    frac = len(solved) / len(gmm)
    failed = sorted(f"{r.problem}:{r.status}" for r in gmm if r.status != Status.CONVERGED)
    ok = len(gmm) >= 10 and frac >= 0.9 and elapsed < 600
    report(5, "desk-scale benchmark", ok,
           f"gmm converged {len(solved)}/{len(gmm)}, matrix {len(recs)} runs in {elapsed:.0f}s"
           + (f", unsolved {failed}" if failed else ""))
    assert len(gmm) >= 10
    assert frac >= 0.9
    assert elapsed < 600


def test_c6_beats_steepest_descent(report):
    wins, rows = 0, []
    cfg = SolverConfig(max_iters=200_000)
    for seed in range(20):
        p = random_quadratic(50, 1e3, seed)
        g, s = gmm_solve(p, cfg=cfg), steepest_descent_solve(p, cfg=cfg)
        win = g.status == Status.CONVERGED and g.iters < s.iters
        wins += win
        rows.append((g.iters, s.iters))
    ok = wins >= 18
    report(6, "fewer iterations than steepest descent", ok,
           f"{wins}/20 seeds, median gmm {int(np.median([r[0] for r in rows]))} vs sd {int(np.median([r[1] for r in rows]))}")
    assert ok


def test_c7_complexity_slope(report):
    p = make_problem("ext-rosenbrock", 100)
    mono = SolverConfig(ls=LineSearchConfig(nonmonotone=False), max_iters=1_000_000)
    eps = (1e-2, 1e-3, 1e-4)
    recs = [gmm_solve(p, cfg=mono.with_(tol_grad_inf=e)) for e in eps]
    iters = [r.iters for r in recs]
    slope = float(np.polyfit(np.log(1 / np.array(eps)), np.log(np.maximum(iters, 1)), 1)[0])
    ok = all(r.status == Status.CONVERGED for r in recs) and slope <= 2.2
    report(7, "complexity trend", ok, f"ext-rosenbrock n=100 iterations {iters}, slope {slope:.3f}")
    assert ok


def _fixture_recs():
    # wall times; B fails on p3
    table = {("p1", "A"): 1.0, ("p1", "B"): 2.0, ("p2", "A"): 3.0, ("p2", "B"): 1.0, ("p3", "A"): 2.0}
    recs = [RunRecord(p, 10, s, Status.CONVERGED, 1, 2, 2, 0.0, 0.0, t) for (p, s), t in table.items()]
    recs.append(RunRecord("p3", 10, "B", Status.MAX_ITERS, 9, 10, 10, 0.0, 1.0, 0.5))
    return recs


def test_c8_profile_oracle(report):
    curves = {c.solver: c for c in perf_profile(_fixture_recs(), "time")}
    # ratios: A = (1, 3, 1), B = (2, 1, inf)
    expected = {
        "A": ((1.0, Fraction(2, 3)), (2.0, Fraction(2, 3)), (3.0, Fraction(1))),
        "B": ((1.0, Fraction(1, 3)), (2.0, Fraction(2, 3)), (3.0, Fraction(2, 3))),
    }
    got = {s: tuple((t, Fraction(r).limit_denominator(1000)) for t, r in c.points) for s, c in curves.items()}
    exact = all(c.points == tuple((t, float(r)) for t, r in expected[s]) for s, c in curves.items())
    ok = got == expected and exact
    report(8, "performance profile oracle", ok, "3-problem/2-solver fixture")
    assert ok


def test_c9_determinism_and_accounting(report, bench):
    recs, _, specs = bench
    audits = [audit_counters(r, 60) for r in recs]
    by_label = {s.label: s for s in specs}
    # re-run every gmm problem plus the cheaper baseline runs
    rerun = [r for r in recs if r.solver == "gmm" or r.iters <= 5000]
    same = 0
    for r in rerun:
        spec = by_label[r.solver]
        again = solve(spec.solver, make_problem(r.problem, r.n), None, spec.cfg)
        again.solver = r.solver
        same += again.key() == r.key()
    ok = all(audits) and same == len(rerun)
    report(9, "determinism and counter audit", ok,
           f"audit {sum(audits)}/{len(recs)} runs, bitwise re-runs {same}/{len(rerun)}")
    assert all(audits)
    assert same == len(rerun)
