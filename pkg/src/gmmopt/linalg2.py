"""Closed-form linear algebra on 2x2 symmetric matrices.

Everything the momentum method needs about second-order information lives in
one 2x2 symmetric matrix, so the routines here work on three floats and never
touch an n x n array.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

__all__ = [
    "Sym2",
    "ScalePair",
    "NotSPD",
    "NoSolution",
    "DegenerateScale",
    "eig_bounds",
    "solve_spd",
    "solve_min_norm",
    "modified_cholesky",
    "scale_congruence",
    "unscale_congruence",
    "spd_tol",
    "rank_tol",
    "default_tau",
    "DEGENERACY_TOL",
]

EPS = 2.220446049250313e-16
DEGENERACY_TOL = 1e-300


class NotSPD(ArithmeticError):
    """The matrix is not safely positive definite."""


class NoSolution(ArithmeticError):
    """The (singular) 2x2 system is inconsistent."""


class DegenerateScale(ValueError):
    """A scaling factor is numerically zero."""


@dataclass(frozen=True)
class Sym2:
    """Symmetric 2x2 matrix ``[[h11, h12], [h12, h22]]``."""

    h11: float
    h12: float
    h22: float

    def __post_init__(self):
        for name in ("h11", "h12", "h22"):
            v = float(getattr(self, name))
            if not math.isfinite(v):
                raise ValueError(f"Sym2.{name} is not finite: {v!r}")
            object.__setattr__(self, name, v)

    @classmethod
    def identity(cls):
        return cls(1.0, 0.0, 1.0)

    @classmethod
    def from_array(cls, a):
        return cls(a[0][0], 0.5 * (a[0][1] + a[1][0]), a[1][1])

    def to_array(self):
        import numpy as np

        return np.array([[self.h11, self.h12], [self.h12, self.h22]])

    @property
    def trace(self) -> float:
        return self.h11 + self.h22

    @property
    def det(self) -> float:
        return self.h11 * self.h22 - self.h12 * self.h12

    def norm_inf(self) -> float:
        return max(abs(self.h11) + abs(self.h12), abs(self.h12) + abs(self.h22))

    def matvec(self, u):
        return (self.h11 * u[0] + self.h12 * u[1], self.h12 * u[0] + self.h22 * u[1])

    def quad(self, u) -> float:
        """Return ``u^T H u``."""
        return self.h11 * u[0] * u[0] + 2.0 * self.h12 * u[0] * u[1] + self.h22 * u[1] * u[1]

    def shifted(self, mu: float) -> "Sym2":
        return Sym2(self.h11 + mu, self.h12, self.h22 + mu)


@dataclass(frozen=True)
class ScalePair:
    """Diagonal scaling ``D = diag(gnorm, snorm)``."""

    gnorm: float
    snorm: float

    def __post_init__(self):
        for name in ("gnorm", "snorm"):
            v = float(getattr(self, name))
            if not math.isfinite(v) or v < 0:
                raise ValueError(f"ScalePair.{name} must be finite and >= 0, got {v!r}")
            object.__setattr__(self, name, v)


def spd_tol(H: Sym2) -> float:
    return 1e-14 * max(1.0, H.norm_inf())


def rank_tol(H: Sym2) -> float:
    return 1e-10 * max(1.0, H.norm_inf())


def default_tau(H0: Sym2) -> float:
    return 1e-8 * max(1.0, H0.norm_inf())


def eig_bounds(H: Sym2) -> tuple[float, float]:
    """Eigenvalues ``(lambda_min, lambda_max)`` of a symmetric 2x2 matrix.

    Uses the half-trace / discriminant form with ``hypot`` for the radius, and
    recovers the smaller-magnitude root from the determinant to avoid
    cancellation.
    """
    m = 0.5 * (H.h11 + H.h22)
    r = math.hypot(0.5 * (H.h11 - H.h22), H.h12)
    if m >= 0:
        lmax = m + r
        lmin = H.det / lmax if lmax != 0.0 else m - r
    else:
        lmin = m - r
        lmax = H.det / lmin
    # det/l can drift past the other root by an ulp when r is tiny
    if lmin > lmax:
        lmin, lmax = lmax, lmin
    return lmin, lmax


def _eigvec_max(H: Sym2, lmax: float) -> tuple[float, float]:
    # unit eigenvector of the largest eigenvalue, built from the better-conditioned row
    a = (H.h12, lmax - H.h11)
    b = (lmax - H.h22, H.h12)
    v = a if math.hypot(*a) >= math.hypot(*b) else b
    nv = math.hypot(*v)
    if nv == 0.0:
        return 1.0, 0.0
    return v[0] / nv, v[1] / nv


def solve_spd(H: Sym2, rhs) -> tuple[float, float]:
    """Solve ``H u = rhs`` by Cramer's rule for a positive definite ``H``.

    Raises
    ------
    NotSPD
        If ``lambda_min(H) <= spd_tol(H)``.
    """
    lmin, _ = eig_bounds(H)
    if not lmin > spd_tol(H):
        raise NotSPD(f"lambda_min={lmin:.3e} below spd tolerance")
    det = H.det
    b1, b2 = float(rhs[0]), float(rhs[1])
    u1 = (H.h22 * b1 - H.h12 * b2) / det
    u2 = (H.h11 * b2 - H.h12 * b1) / det
    return u1, u2


def solve_min_norm(H: Sym2, rhs) -> tuple[float, float]:
    """Minimum-norm solution of a positive semidefinite 2x2 system.

    Eigenvalues at or below ``rank_tol(H)`` are treated as zero. The solution
    is accepted only when ``rhs`` lies in the numerical range of ``H``.

    Raises
    ------
    NoSolution
        If ``H`` is indefinite beyond tolerance or the system is inconsistent.
    """
    tol = rank_tol(H)
    lmin, lmax = eig_bounds(H)
    if lmin < -tol:
        raise NoSolution(f"matrix is indefinite (lambda_min={lmin:.3e})")
    b1, b2 = float(rhs[0]), float(rhs[1])
    if lmax <= tol:
        u = (0.0, 0.0)
    elif lmin > tol:
        det = H.det
        u = ((H.h22 * b1 - H.h12 * b2) / det, (H.h11 * b2 - H.h12 * b1) / det)
    else:
        v1, v2 = _eigvec_max(H, lmax)
        c = (v1 * b1 + v2 * b2) / lmax
        u = (c * v1, c * v2)
    r1, r2 = H.matvec(u)
    resid = math.hypot(r1 - b1, r2 - b2)
    if resid > tol * max(1.0, math.hypot(b1, b2)):
        raise NoSolution(f"rhs outside range(H) (residual {resid:.3e})")
    return u


def modified_cholesky(H0: Sym2, tau: float | None = None) -> Sym2:
    """Repair ``H0`` so its smallest eigenvalue is at least ``tau``.

    In two dimensions the minimal diagonal shift ``max(0, tau - lambda_min)``
    is computed exactly, so the repaired matrix is ``H0 + shift * I``.
    """
    if tau is None:
        tau = default_tau(H0)
    if not tau > 0:
        raise ValueError("tau must be positive")
    lmin, _ = eig_bounds(H0)
    if lmin >= tau:
        return H0
    shift = tau - lmin
    out = H0.shifted(shift)
    # rounding in the shifted entries can leave lambda_min just short of tau;
    # bump by the observed deficit plus the entries' rounding scale
    for _ in range(64):
        deficit = tau - eig_bounds(out)[0]
        if deficit <= 0:
            break
        shift += 2.0 * deficit + 4.0 * EPS * (abs(shift) + H0.norm_inf())
        out = H0.shifted(shift)
    else:
        raise ArithmeticError(f"could not lift lambda_min of {H0} to {tau}")
    return out


def scale_congruence(Hhat: Sym2, d: ScalePair) -> Sym2:
    """Return ``D Hhat D`` with ``D = diag(d.gnorm, d.snorm)``."""
    if d.gnorm <= DEGENERACY_TOL or d.snorm <= DEGENERACY_TOL:
        raise DegenerateScale(f"scale pair {d} has a zero entry")
    return Sym2(
        d.gnorm * d.gnorm * Hhat.h11,
        d.gnorm * d.snorm * Hhat.h12,
        d.snorm * d.snorm * Hhat.h22,
    )


def unscale_congruence(H: Sym2, d: ScalePair) -> Sym2:
    """Return ``D^{-1} H D^{-1}``, the inverse of :func:`scale_congruence`."""
    if d.gnorm <= DEGENERACY_TOL or d.snorm <= DEGENERACY_TOL:
        raise DegenerateScale(f"scale pair {d} has a zero entry")
    return Sym2(
        H.h11 / d.gnorm / d.gnorm,
        H.h12 / d.gnorm / d.snorm,
        H.h22 / d.snorm / d.snorm,
    )
