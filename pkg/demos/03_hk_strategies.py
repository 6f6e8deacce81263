"""The three ways of building the 2x2 model matrix.

On a quadratic every strategy can be checked against the exact matrix
[[g'Ag, -g'As], [-g'As, s'As]]. On a real problem they trade extra
evaluations for model quality: the free diagonal Barzilai-Borwein model
stalls on strongly coupled problems, so those runs are capped at 5000.
"""
import numpy as np

from gmmopt import SolverConfig, gmm_solve, make_problem
from gmmopt.hk import HkBuildContext, build_hk
from gmmopt.problems import CountingObjective, quadratic_diag

rng = np.random.default_rng(1)
a = np.exp(rng.uniform(-2, 2, 30))
p = quadratic_diag(30, a=a)
x, s = rng.standard_normal(30), rng.standard_normal(30)
g = p.grad(x)
ctx = HkBuildContext(x, g, s, g - p.grad(x - s), p.eval(x), p.eval(x - s), alpha_prev=0.6, beta_prev=0.3)
exact = np.array([[g @ (a * g), -(g @ (a * s))], [-(g @ (a * s)), s @ (a * s)]])

print("strategy   rel. error   extra f  extra g")
for strategy in ("fd-hvp", "interp", "diag-bb"):
    cp = CountingObjective(p)
    res = build_hk(strategy, cp, ctx)
    err = np.abs(res.H.to_array() - exact).max() / np.abs(exact).max()
    print(f"{strategy:9s} {err:11.2e} {cp.nf:9d} {cp.ng:8d}")

print("\nproblem          strategy  status      iters  f-evals  g-evals")
for name in ("ext-rosenbrock", "woods", "engval1"):
    prob = make_problem(name, 100)
    for strategy in ("interp", "fd-hvp", "diag-bb"):
        r = gmm_solve(prob, cfg=SolverConfig(hk_strategy=strategy, max_iters=5_000))
        print(f"{name:16s} {strategy:9s} {str(r.status):10s} {r.iters:6d} {r.f_evals:8d} {r.g_evals:8d}")
