"""Strategies for building the 2x2 model matrix of the momentum subproblem.

All three estimate the Hessian of ``psi(alpha, beta) = f(x - alpha g + beta s)``
at the origin without forming any n x n matrix:

* ``fd-hvp``: finite-difference Hessian-vector products (2 extra gradients);
* ``interp``: quadratic interpolation of ``psi`` at three points, one of them
  the previous iterate (2 extra function values);
* ``diag-bb``: componentwise secant quotients ``y_i / s_i`` as a diagonal
  Hessian surrogate (no extra evaluations).
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .linalg2 import DEGENERACY_TOL, Sym2

__all__ = [
    "HkBuildContext",
    "HkResult",
    "DegenerateInput",
    "SingularSystem",
    "STRATEGIES",
    "hk_fd_hvp",
    "hk_interpolation",
    "hk_diagonal_bb",
    "interpolate_model",
    "build_hk",
    "default_xi",
]

STRATEGIES = ("interp", "fd-hvp", "diag-bb")

POINT_TOL = 1e-12
SYS_TOL = 1e-12


class DegenerateInput(ValueError):
    """Gradient or momentum vector is (numerically) zero."""


class SingularSystem(ArithmeticError):
    """The interpolation system is rank deficient."""


@dataclass
class HkBuildContext:
    """Everything a strategy may look at for iteration k."""

    x: np.ndarray
    g: np.ndarray
    s: np.ndarray
    y: np.ndarray
    f_curr: float
    f_prev: float
    alpha_prev: float = 0.0
    beta_prev: float = 0.0
    gnorm: float = None
    snorm: float = None
    gts: float = None

    def __post_init__(self):
        if self.gnorm is None:
            self.gnorm = float(np.linalg.norm(self.g))
        if self.snorm is None:
            self.snorm = float(np.linalg.norm(self.s))
        if self.gts is None:
            self.gts = float(self.g @ self.s)


@dataclass(frozen=True)
class HkResult:
    H: Optional[Sym2]
    f_evals_used: int = 0
    g_evals_used: int = 0
    degenerate: bool = False
    strategy: str = ""


def _check_nondegenerate(ctx):
    if ctx.gnorm <= DEGENERACY_TOL or ctx.snorm <= DEGENERACY_TOL:
        raise DegenerateInput(f"|g|={ctx.gnorm:.3e}, |s|={ctx.snorm:.3e}")


def default_xi(x):
    return math.sqrt(np.finfo(float).eps) * (1.0 + float(np.max(np.abs(x), initial=0.0)))


def hk_fd_hvp(p, ctx: HkBuildContext, xi: float | None = None) -> HkResult:
    """Model matrix from finite-difference Hessian-vector products.

    ``v_g = (grad(x + xi g/|g|) - g) |g| / xi`` and likewise ``v_s``. The
    off-diagonal entry averages the two available estimates of
    ``-g^T Hess s``.
    """
    _check_nondegenerate(ctx)
    if xi is None:
        xi = default_xi(ctx.x)
    vg = (p.grad(ctx.x + (xi / ctx.gnorm) * ctx.g) - ctx.g) * (ctx.gnorm / xi)
    vs = (p.grad(ctx.x + (xi / ctx.snorm) * ctx.s) - ctx.g) * (ctx.snorm / xi)
    h11 = float(ctx.g @ vg)
    h22 = float(ctx.s @ vs)
    h12 = -0.5 * (float(ctx.g @ vs) + float(ctx.s @ vg))
    return HkResult(Sym2(h11, h12, h22), f_evals_used=0, g_evals_used=2, strategy="fd-hvp")


def _interp_matrix(points):
    M = np.array([[0.5 * a * a, a * b, 0.5 * b * b] for a, b in points])
    sv = np.linalg.svd(M, compute_uv=False)
    mnorm = float(np.max(np.sum(np.abs(M), axis=1)))
    if mnorm == 0.0 or sv[-1] <= SYS_TOL * mnorm:
        raise SingularSystem(f"interpolation matrix singular (sigma_min={sv[-1]:.3e})")
    return M


def interpolate_model(points, values, f0, gnorm2, gts) -> Sym2:
    """Fit the curvature of ``phi(a, b) = f0 - a |g|^2 + b g^T s + 0.5 u^T H u``.

    Parameters
    ----------
    points : sequence of three ``(alpha, beta)`` pairs
    values : function values ``psi`` at those points
    f0, gnorm2, gts : ``f(x)``, ``|g|^2`` and ``g^T s``

    Raises
    ------
    SingularSystem
        When the 3x3 interpolation matrix is rank deficient within tolerance.
    """
    M = _interp_matrix(points)
    rhs = np.array([v - f0 + a * gnorm2 - b * gts for (a, b), v in zip(points, values)])
    h11, h12, h22 = np.linalg.solve(M, rhs)
    return Sym2(h11, h12, h22)


def hk_interpolation(p, ctx: HkBuildContext) -> HkResult:
    """Model matrix interpolating ``psi`` at ``(0, -1)``, ``(a, 0)`` and ``(a, b)``.

    ``(a, b)`` are the previous step's coefficients. The point ``(0, -1)`` is
    the previous iterate, so its value is ``ctx.f_prev`` and only two new
    function evaluations are spent.
    """
    _check_nondegenerate(ctx)
    a, b = float(ctx.alpha_prev), float(ctx.beta_prev)
    if abs(a) <= POINT_TOL or abs(b) <= POINT_TOL:
        raise SingularSystem(f"unusable interpolation points (alpha_prev={a:.3e}, beta_prev={b:.3e})")
    points = ((0.0, -1.0), (a, 0.0), (a, b))
    _interp_matrix(points)
    xa = ctx.x - a * ctx.g
    f2 = p.eval(xa)
    f3 = p.eval(xa + b * ctx.s)
    H = interpolate_model(points, (ctx.f_prev, f2, f3), ctx.f_curr, ctx.gnorm**2, ctx.gts)
    return HkResult(H, f_evals_used=2, g_evals_used=0, strategy="interp")


def hk_diagonal_bb(ctx: HkBuildContext, mu_min: float = 1e-10, mu_max: float = 1e10) -> HkResult:
    """Model matrix from the diagonal secant matrix ``mu_i = y_i / s_i``.

    Components with ``|s_i|`` below ``1e-12 (1 + |s|_inf)`` get ``mu_i = 1``;
    all quotients are clipped into ``[mu_min, mu_max]``.
    """
    _check_nondegenerate(ctx)
    s, g = ctx.s, ctx.g
    comp_tol = 1e-12 * (1.0 + float(np.max(np.abs(s))))
    mask = np.abs(s) > comp_tol
    mu = np.ones_like(s)
    mu[mask] = ctx.y[mask] / s[mask]
    np.clip(mu, mu_min, mu_max, out=mu)
    mg = mu * g
    H = Sym2(float(mg @ g), -float(mg @ s), float((mu * s) @ s))
    return HkResult(H, strategy="diag-bb")


def build_hk(strategy: str, p, ctx: HkBuildContext, xi=None, mu_min=1e-10, mu_max=1e10) -> HkResult:
    """Build ``H_k^0`` with the chosen strategy and the documented fallbacks.

    ``interp`` falls back to ``diag-bb`` when its points are unusable. When no
    matrix can be formed at all the result has ``H=None`` and
    ``degenerate=True``; the direction step then safeguards from the
    identity. Evaluations spent before a failure are still reported.
    """
    if strategy not in STRATEGIES:
        raise ValueError(f"unknown strategy {strategy!r}; expected one of {STRATEGIES}")
    try:
        if strategy == "interp":
            try:
                return hk_interpolation(p, ctx)
            except SingularSystem:
                res = hk_diagonal_bb(ctx, mu_min, mu_max)
                return HkResult(res.H, 0, 0, degenerate=True, strategy="diag-bb")
            except DegenerateInput:
                raise
            except ValueError:
                # non-finite samples make Sym2 reject the fit
                return HkResult(None, 2, 0, degenerate=True, strategy="interp")
        if strategy == "fd-hvp":
            try:
                return hk_fd_hvp(p, ctx, xi)
            except DegenerateInput:
                raise
            except ValueError:
                return HkResult(None, 0, 2, degenerate=True, strategy="fd-hvp")
        return hk_diagonal_bb(ctx, mu_min, mu_max)
    except DegenerateInput:
        return HkResult(None, 0, 0, degenerate=True, strategy=strategy)
