"""Search direction of the gradient method with momentum.

The direction is ``d = -alpha g + beta s`` where ``(alpha, beta)`` minimizes the
2-D model ``0.5 u^T H u + [-|g|^2, g^T s] u``. A candidate built from the
strategy matrix ``H0`` is accepted if it is gradient related; otherwise the
matrix is repaired (eigenvalue shift) and rescaled by ``D = diag(|g|, |s|)``,
which makes the re-solved direction gradient related by construction.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .linalg2 import (
    DEGENERACY_TOL,
    NoSolution,
    NotSPD,
    ScalePair,
    Sym2,
    default_tau,
    eig_bounds,
    modified_cholesky,
    rank_tol,
    scale_congruence,
    solve_min_norm,
    solve_spd,
    unscale_congruence,
)

__all__ = [
    "GrTestConstants",
    "DirectionOutcome",
    "ZeroGradient",
    "solve_subspace",
    "model_value",
    "gradient_related_test",
    "safeguarded_direction",
    "compute_direction",
]


class ZeroGradient(ValueError):
    pass


@dataclass(frozen=True)
class GrTestConstants:
    c1: float = 1e-6
    c2: float = 1e6

    def __post_init__(self):
        if not (self.c1 > 0 and self.c2 > 0 and math.isfinite(self.c1) and math.isfinite(self.c2)):
            raise ValueError("gradient-related constants must be positive and finite")


@dataclass(frozen=True)
class DirectionOutcome:
    alpha: float
    beta: float
    d: np.ndarray
    used_safeguard: bool
    model_decrease: float
    H_used: Sym2
    # eigenvalue bounds of the repaired matrix on the safeguard path
    hhat_bounds: Optional[tuple] = None


def model_value(H: Sym2, gnorm2: float, gts: float, u) -> float:
    """``0.5 u^T H u - |g|^2 u_1 + g^T s u_2``."""
    return 0.5 * H.quad(u) - gnorm2 * u[0] + gts * u[1]


def solve_subspace(H: Sym2, gnorm2: float, gts: float):
    """Minimize the 2-D model; raises :class:`NoSolution` if it is unbounded.

    Positive definite ``H`` gives the unique minimizer. A positive semidefinite
    singular ``H`` (parallel ``g`` and ``s``) gives the minimum-norm stationary
    point when one exists.
    """
    if not gnorm2 > 0:
        raise ZeroGradient("|g|^2 must be positive")
    rhs = (gnorm2, -gts)
    try:
        return solve_spd(H, rhs)
    except NotSPD:
        pass
    lmin, _ = eig_bounds(H)
    if lmin < -rank_tol(H):
        raise NoSolution("model Hessian is indefinite")
    return solve_min_norm(H, rhs)


def gradient_related_test(d, g, c: GrTestConstants) -> bool:
    gtd = float(g @ d)
    gnorm = float(np.linalg.norm(g))
    return gtd <= -c.c1 * gnorm * gnorm and float(np.linalg.norm(d)) <= c.c2 * gnorm


def _outcome(alpha, beta, g, s, H, gnorm2, gts, safeguard, bounds=None):
    d = -alpha * g + beta * s
    return DirectionOutcome(alpha, beta, d, safeguard, model_value(H, gnorm2, gts, (alpha, beta)), H, bounds)


def safeguarded_direction(g, s, H0: Optional[Sym2], tau: float | None = None, scale_first: bool = False,
                          gnorm=None, snorm=None, gts=None) -> DirectionOutcome:
    """Direction from the repaired and rescaled model matrix.

    With ``Hhat = modified_cholesky(H0)`` (or of the identity when ``H0`` is
    None), the model matrix is ``D Hhat D``. With ``scale_first=True`` the
    repair is applied to ``D^{-1} H0 D^{-1}`` instead. When ``s`` vanishes the
    step collapses to the 1-D scaled gradient step.
    """
    gnorm = float(np.linalg.norm(g)) if gnorm is None else gnorm
    snorm = float(np.linalg.norm(s)) if snorm is None else snorm
    gts = float(g @ s) if gts is None else gts
    if gnorm <= DEGENERACY_TOL:
        raise ZeroGradient("gradient is zero")
    gnorm2 = gnorm * gnorm
    base = Sym2.identity() if H0 is None else H0

    if snorm <= DEGENERACY_TOL:
        t = default_tau(base) if tau is None else tau
        curv = max(modified_cholesky(base, t).h11, t)
        h11 = curv * gnorm2
        return _outcome(gnorm2 / h11, 0.0, g, s, Sym2(h11, 0.0, 0.0), gnorm2, gts, True, (curv, curv))

    D = ScalePair(gnorm, snorm)
    if scale_first and H0 is not None:
        base = unscale_congruence(H0, D)
    Hhat = modified_cholesky(base, default_tau(base) if tau is None else tau)
    H = scale_congruence(Hhat, D)
    # H = D Hhat D, so u = D^{-1} Hhat^{-1} D^{-1} b; solving in scaled
    # coordinates keeps the system as well conditioned as Hhat
    w1, w2 = solve_spd(Hhat, (gnorm, -gts / snorm))
    alpha, beta = w1 / gnorm, w2 / snorm
    return _outcome(alpha, beta, g, s, H, gnorm2, gts, True, eig_bounds(Hhat))


def compute_direction(ctx, H0: Optional[Sym2], c: GrTestConstants = GrTestConstants(), tau: float | None = None,
                      scale_first: bool = False, force_safeguard: bool = False) -> DirectionOutcome:
    """Candidate direction from ``H0`` with the gradient-related safeguard.

    Parameters
    ----------
    ctx : HkBuildContext
        Current ``g``, ``s`` and their norms.
    H0 : Sym2 or None
        Strategy matrix; None means the build failed.
    c : GrTestConstants
        Constants of the acceptance test ``g^T d <= -c1 |g|^2``, ``|d| <= c2 |g|``.
    tau : float, optional
        Eigenvalue floor of the repair; relative default when omitted.
    scale_first : bool
        Repair ``D^{-1} H0 D^{-1}`` rather than ``H0``.
    force_safeguard : bool
        Skip the candidate and always take the safeguarded direction.
    """
    g, s = ctx.g, ctx.s
    if ctx.gnorm <= DEGENERACY_TOL:
        raise ZeroGradient("gradient is zero")
    gnorm2 = ctx.gnorm * ctx.gnorm
    if ctx.snorm > DEGENERACY_TOL and H0 is not None and not force_safeguard:
        try:
            alpha, beta = solve_subspace(H0, gnorm2, ctx.gts)
        except NoSolution:
            pass
        else:
            out = _outcome(alpha, beta, g, s, H0, gnorm2, ctx.gts, False)
            if gradient_related_test(out.d, g, c):
                return out
    return safeguarded_direction(g, s, H0, tau, scale_first, ctx.gnorm, ctx.snorm, ctx.gts)
