"""Minimize the extended Rosenbrock function with the momentum method.

Run with ``python3 demos/01_quickstart.py``. Prints the run summary, then the
first few iterations so you can see the coefficient pair (alpha, beta) that
each 2-D subproblem picks.
"""
from gmmopt import SolverConfig, gmm_solve, make_problem

p = make_problem("ext-rosenbrock", 100)
rec = gmm_solve(p, cfg=SolverConfig(keep_trace=True))

print(f"{rec.problem} n={rec.n}: {rec.status} after {rec.iters} iterations")
print(f"  f = {rec.final_f:.3e}, |g|_inf = {rec.final_gnorm_inf:.2e}")
print(f"  {rec.f_evals} f-evals, {rec.g_evals} g-evals, safeguard used {rec.safeguard_count} times")

print("\n  k        f            alpha        beta     eta")
for t in rec.trace[:8]:
    print(f"{t.k:3d} {t.f:12.5e} {t.alpha:12.4e} {t.beta:11.4e} {t.eta:7.4f}")
# k = 0 has no previous step, so beta is 0 and the step is a plain gradient step
