"""Why the model matrix is rescaled before it is trusted.

With a small gradient and the identity as model matrix, the raw subproblem
returns a step proportional to |g|^2 g, far too short to be gradient related.
Repairing the matrix and rescaling it by D = diag(|g|, |s|) gives back a step
whose length is tied to |g| through the repaired matrix's eigenvalues.
"""
import numpy as np

from gmmopt.direction import GrTestConstants, compute_direction, gradient_related_test, solve_subspace
from gmmopt.hk import HkBuildContext
from gmmopt.linalg2 import Sym2

g = np.array([1e-3, 0.0, 0.0])
s = np.array([0.0, 2.0, 0.0])
c = GrTestConstants(1e-3, 1e6)

alpha, beta = solve_subspace(Sym2.identity(), g @ g, g @ s)
d_raw = -alpha * g + beta * s
print(f"raw:         alpha={alpha:.1e}  |d|/|g|={np.linalg.norm(d_raw) / np.linalg.norm(g):.1e}  "
      f"gradient related: {gradient_related_test(d_raw, g, c)}")

ctx = HkBuildContext(np.zeros(3), g, s, np.zeros(3), 0.0, 0.0)
out = compute_direction(ctx, Sym2.identity(), c)
print(f"safeguarded: alpha={out.alpha:.1e}  |d|/|g|={np.linalg.norm(out.d) / np.linalg.norm(g):.1e}  "
      f"gradient related: {gradient_related_test(out.d, g, c)}")

# the bounds hold for any SPD repaired matrix, whatever the scale of g and s
rng = np.random.default_rng(0)
worst = 0.0
for _ in range(1000):
    q, _ = np.linalg.qr(rng.standard_normal((2, 2)))
    Hhat = Sym2.from_array(q @ np.diag(np.exp(rng.uniform(-6.9, 6.9, 2))) @ q.T)
    g, s = rng.standard_normal(50) * 10 ** rng.uniform(-4, 4), rng.standard_normal(50)
    ctx = HkBuildContext(np.zeros(50), g, s, np.zeros(50), 0.0, 0.0)
    out = compute_direction(ctx, Hhat, force_safeguard=True)
    lmin, lmax = out.hhat_bounds
    gn, dn = np.linalg.norm(g), np.linalg.norm(out.d)
    worst = max(worst, (-(g @ g) / lmax) / (g @ out.d), (gn / lmax) / dn, dn / (2 * gn / lmin))
print(f"\n1000 random instances: largest bound ratio {worst:.4f} (must stay <= 1)")
