"""Smooth unconstrained test problems with analytic gradients.

The collection re-implements a subset of the classical large-scale test set
(CUTEst-style names) natively in numpy, with the dimension as a parameter.
Formulas follow the standard published definitions; each problem documents
its start point. Every registered problem is checked against the central
difference oracle :func:`fd_grad_check` in the test suite.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np
from scipy.linalg import solveh_banded

__all__ = [
    "ObjectiveFunction",
    "GradCheckReport",
    "UnknownProblem",
    "BadDimension",
    "make_problem",
    "problem_names",
    "default_dimension",
    "fd_grad_check",
    "quadratic_diag",
    "random_quadratic",
    "CountingObjective",
    "DEFAULT_N",
]

DEFAULT_N = 100


class UnknownProblem(KeyError):
    pass


class BadDimension(ValueError):
    pass


@dataclass(frozen=True)
class ObjectiveFunction:
    """A smooth objective with its gradient and standard start point."""

    name: str
    dim: int
    eval: Callable[[np.ndarray], float]
    grad: Callable[[np.ndarray], np.ndarray]
    start: np.ndarray
    known_fmin: Optional[float] = None
    meta: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        start = np.array(self.start, dtype=float)
        if start.shape != (self.dim,):
            raise BadDimension(f"{self.name}: start has shape {start.shape}, expected ({self.dim},)")
        start.setflags(write=False)
        object.__setattr__(self, "start", start)

    def __call__(self, x):
        return self.eval(x)


class CountingObjective:
    """Wrap an :class:`ObjectiveFunction` and count f- and g-evaluations."""

    def __init__(self, problem: ObjectiveFunction):
        self.problem = problem
        self.name = problem.name
        self.dim = problem.dim
        self.start = problem.start
        self.known_fmin = problem.known_fmin
        self.nf = 0
        self.ng = 0

    def eval(self, x):
        self.nf += 1
        return self.problem.eval(x)

    def grad(self, x):
        self.ng += 1
        return self.problem.grad(x)

    __call__ = eval


@dataclass(frozen=True)
class GradCheckReport:
    max_rel_err: float
    worst_index: int
    step: float


def fd_grad_check(p, x, h: float | None = None) -> GradCheckReport:
    """Compare ``p.grad(x)`` with central differences of ``p.eval``.

    The error of component ``i`` is ``|fd_i - g_i| / max(1, |g_i|)``.
    """
    x = np.asarray(x, dtype=float)
    if h is None:
        h = np.finfo(float).eps ** (1.0 / 3.0) * (1.0 + np.max(np.abs(x), initial=0.0))
    if not h > 0:
        raise ValueError("h must be positive")
    g = np.asarray(p.grad(x), dtype=float)
    fd = np.empty_like(g)
    xp = x.copy()
    for i in range(x.size):
        xi = x[i]
        xp[i] = xi + h
        fp = p.eval(xp)
        xp[i] = xi - h
        fm = p.eval(xp)
        xp[i] = xi
        fd[i] = (fp - fm) / (2.0 * h)
    err = np.abs(fd - g) / np.maximum(1.0, np.abs(g))
    i = int(np.argmax(err)) if err.size else 0
    return GradCheckReport(float(err[i]) if err.size else 0.0, i, float(h))


def _alt_start(n, base=1.0):
    # default when the collection gives none: ones, +0.1 on odd (1-based) indices
    x = np.full(n, base)
    x[0::2] += 0.1
    return x


# ----------------------------------------------------------------------------
# problem definitions; each builder takes n and returns an ObjectiveFunction


def ext_rosenbrock(n):
    """Extended Rosenbrock (SROSENBR); start (-1.2, 1, -1.2, 1, ...)."""
    if n < 2 or n % 2:
        raise BadDimension("ext-rosenbrock needs an even n >= 2")

    def f(x):
        xo, xe = x[0::2], x[1::2]
        return float(np.sum(100.0 * (xe - xo**2) ** 2 + (1.0 - xo) ** 2))

    def g(x):
        xo, xe = x[0::2], x[1::2]
        t = xe - xo**2
        out = np.empty_like(x)
        out[0::2] = -400.0 * t * xo - 2.0 * (1.0 - xo)
        out[1::2] = 200.0 * t
        return out

    x0 = np.tile([-1.2, 1.0], n // 2)
    return ObjectiveFunction("ext-rosenbrock", n, f, g, x0, 0.0)


def quadratic_diag(n, a=None, name="quadratic-diag", start=None):
    """Separable quadratic ``0.5 * sum(a_i x_i^2)``; default ``a_i = i``, start ones."""
    a = np.arange(1.0, n + 1) if a is None else np.asarray(a, dtype=float)
    if a.shape != (n,):
        raise BadDimension("spectrum length must equal n")
    a = a.copy()
    a.setflags(write=False)

    def f(x):
        return float(0.5 * np.dot(a * x, x))

    def g(x):
        return a * x

    x0 = np.ones(n) if start is None else start
    return ObjectiveFunction(name, n, f, g, x0, 0.0, meta={"hessian_diag": a})


def random_quadratic(n, cond, seed, name=None):
    """Dense strongly convex quadratic ``0.5 x^T A x`` with a rotated log-spaced spectrum.

    The eigenvalues span ``[1/cond, 1]``; the start point is a random unit-scale
    vector drawn from the same seed.
    """
    rng = np.random.default_rng(seed)
    q, _ = np.linalg.qr(rng.standard_normal((n, n)))
    lam = np.logspace(-np.log10(cond), 0.0, n)
    A = (q * lam) @ q.T
    A = 0.5 * (A + A.T)
    A.setflags(write=False)
    x0 = rng.standard_normal(n)

    def f(x):
        return float(0.5 * x @ (A @ x))

    def g(x):
        return A @ x

    return ObjectiveFunction(name or f"random-quadratic-{seed}", n, f, g, x0, 0.0, meta={"hessian": A})


def quadratic_tridiag(n):
    """Tridiagonal quadratic ``0.5 x^T T x - sum(x)`` with ``T = tridiag(-1, 4, -1)``.

    No standard start exists, so ones with +0.1 on odd indices is used.
    """
    ab = np.zeros((2, n))
    ab[0, 1:] = -1.0
    ab[1, :] = 4.0
    xstar = solveh_banded(ab, np.ones(n))
    fmin = float(-0.5 * xstar.sum())

    def tx(x):
        y = 4.0 * x
        y[1:] -= x[:-1]
        y[:-1] -= x[1:]
        return y

    def f(x):
        return float(0.5 * x @ tx(x) - x.sum())

    def g(x):
        return tx(x) - 1.0

    return ObjectiveFunction("quadratic-tridiag", n, f, g, _alt_start(n), fmin)


def quartic(n):
    """Separable quartic ``sum((x_i - i)^4)`` (DQRTIC/QUARTC); start 2."""
    c = np.arange(1.0, n + 1)

    def f(x):
        return float(np.sum((x - c) ** 4))

    def g(x):
        return 4.0 * (x - c) ** 3

    return ObjectiveFunction("quartic", n, f, g, np.full(n, 2.0), 0.0)


def cosine(n):
    """COSINE chain ``sum cos(x_i^2 - 0.5 x_{i+1})``; start ones. Bounded below by ``-(n-1)``."""
    if n < 2:
        raise BadDimension("cosine needs n >= 2")

    def f(x):
        return float(np.sum(np.cos(x[:-1] ** 2 - 0.5 * x[1:])))

    def g(x):
        s = -np.sin(x[:-1] ** 2 - 0.5 * x[1:])
        out = np.zeros_like(x)
        out[:-1] += 2.0 * x[:-1] * s
        out[1:] -= 0.5 * s
        return out

    return ObjectiveFunction("cosine", n, f, g, np.ones(n), -(n - 1.0))


def arwhead(n):
    """ARWHEAD ``sum(-4 x_i + 3) + sum((x_i^2 + x_n^2)^2)``; start ones."""
    if n < 2:
        raise BadDimension("arwhead needs n >= 2")

    def f(x):
        xi, xn = x[:-1], x[-1]
        return float(np.sum(-4.0 * xi + 3.0) + np.sum((xi**2 + xn**2) ** 2))

    def g(x):
        xi, xn = x[:-1], x[-1]
        t = 4.0 * (xi**2 + xn**2)
        out = np.empty_like(x)
        out[:-1] = -4.0 + t * xi
        out[-1] = np.sum(t) * xn
        return out

    return ObjectiveFunction("arwhead", n, f, g, np.ones(n), 0.0)


def bdqrtic(n):
    """BDQRTIC quartic with banded structure; start ones."""
    if n < 5:
        raise BadDimension("bdqrtic needs n >= 5")
    m = n - 4

    def _q(x):
        return x[:m] ** 2 + 2 * x[1 : m + 1] ** 2 + 3 * x[2 : m + 2] ** 2 + 4 * x[3 : m + 3] ** 2 + 5 * x[-1] ** 2

    def f(x):
        return float(np.sum((-4.0 * x[:m] + 3.0) ** 2) + np.sum(_q(x) ** 2))

    def g(x):
        q2 = 2.0 * _q(x)
        out = np.zeros_like(x)
        out[:m] += -8.0 * (-4.0 * x[:m] + 3.0)
        for j, w in enumerate((1.0, 2.0, 3.0, 4.0)):
            out[j : m + j] += q2 * 2.0 * w * x[j : m + j]
        out[-1] += np.sum(q2) * 10.0 * x[-1]
        return out

    return ObjectiveFunction("bdqrtic", n, f, g, np.ones(n), None)


def dqdrtic(n):
    """DQDRTIC ``sum(x_i^2 + 100 x_{i+1}^2 + 100 x_{i+2}^2)``; start 3."""
    if n < 3:
        raise BadDimension("dqdrtic needs n >= 3")
    w = np.zeros(n)
    w[: n - 2] += 1.0
    w[1 : n - 1] += 100.0
    w[2:] += 100.0

    def f(x):
        return float(np.dot(w, x * x))

    def g(x):
        return 2.0 * w * x

    return ObjectiveFunction("dqdrtic", n, f, g, np.full(n, 3.0), 0.0)


def edensch(n):
    """EDENSCH; start zeros."""
    if n < 2:
        raise BadDimension("edensch needs n >= 2")

    def f(x):
        a, b = x[:-1], x[1:]
        return float(16.0 + np.sum((a - 2.0) ** 4 + (a * b - 2.0 * b) ** 2 + (b + 1.0) ** 2))

    def g(x):
        a, b = x[:-1], x[1:]
        r = a * b - 2.0 * b
        out = np.zeros_like(x)
        out[:-1] += 4.0 * (a - 2.0) ** 3 + 2.0 * r * b
        out[1:] += 2.0 * r * (a - 2.0) + 2.0 * (b + 1.0)
        return out

    return ObjectiveFunction("edensch", n, f, g, np.zeros(n), None)


def engval1(n):
    """ENGVAL1 ``sum((x_i^2 + x_{i+1}^2)^2 - 4 x_i + 3)``; start 2."""
    if n < 2:
        raise BadDimension("engval1 needs n >= 2")

    def f(x):
        a, b = x[:-1], x[1:]
        return float(np.sum((a * a + b * b) ** 2 - 4.0 * a + 3.0))

    def g(x):
        a, b = x[:-1], x[1:]
        t = 4.0 * (a * a + b * b)
        out = np.zeros_like(x)
        out[:-1] += t * a - 4.0
        out[1:] += t * b
        return out

    return ObjectiveFunction("engval1", n, f, g, np.full(n, 2.0), None)


def liarwhd(n):
    """LIARWHD ``sum(4 (x_i^2 - x_1)^2 + (x_i - 1)^2)``; start 4."""

    def f(x):
        return float(np.sum(4.0 * (x * x - x[0]) ** 2 + (x - 1.0) ** 2))

    def g(x):
        t = 8.0 * (x * x - x[0])
        out = 2.0 * t * x + 2.0 * (x - 1.0)
        out[0] -= np.sum(t)
        return out

    return ObjectiveFunction("liarwhd", n, f, g, np.full(n, 4.0), 0.0)


def nondia(n):
    """NONDIA ``(x_1 - 1)^2 + sum_{i>=2} 100 (x_1 - x_{i-1}^2)^2``; start -1."""
    if n < 2:
        raise BadDimension("nondia needs n >= 2")

    def f(x):
        return float((x[0] - 1.0) ** 2 + np.sum(100.0 * (x[0] - x[:-1] ** 2) ** 2))

    def g(x):
        t = 200.0 * (x[0] - x[:-1] ** 2)
        out = np.zeros_like(x)
        out[:-1] -= 2.0 * t * x[:-1]
        out[0] += 2.0 * (x[0] - 1.0) + np.sum(t)
        return out

    return ObjectiveFunction("nondia", n, f, g, np.full(n, -1.0), 0.0)


def tridia(n):
    """TRIDIA ``(x_1 - 1)^2 + sum_{i>=2} i (2 x_i - x_{i-1})^2``; start ones."""
    if n < 2:
        raise BadDimension("tridia needs n >= 2")
    i = np.arange(2.0, n + 1)

    def f(x):
        return float((x[0] - 1.0) ** 2 + np.sum(i * (2.0 * x[1:] - x[:-1]) ** 2))

    def g(x):
        r = 2.0 * i * (2.0 * x[1:] - x[:-1])
        out = np.zeros_like(x)
        out[0] += 2.0 * (x[0] - 1.0)
        out[1:] += 2.0 * r
        out[:-1] -= r
        return out

    return ObjectiveFunction("tridia", n, f, g, np.ones(n), 0.0)


def woods(n):
    """Extended Wood function (WOODS); start (-3, -1, -3, -1, ...)."""
    if n < 4 or n % 4:
        raise BadDimension("woods needs n divisible by 4")

    def f(x):
        a, b, c, d = x[0::4], x[1::4], x[2::4], x[3::4]
        return float(
            np.sum(
                100.0 * (b - a * a) ** 2
                + (1.0 - a) ** 2
                + 90.0 * (d - c * c) ** 2
                + (1.0 - c) ** 2
                + 10.0 * (b + d - 2.0) ** 2
                + 0.1 * (b - d) ** 2
            )
        )

    def g(x):
        a, b, c, d = x[0::4], x[1::4], x[2::4], x[3::4]
        t1 = b - a * a
        t2 = d - c * c
        t3 = b + d - 2.0
        t4 = b - d
        out = np.empty_like(x)
        out[0::4] = -400.0 * t1 * a - 2.0 * (1.0 - a)
        out[1::4] = 200.0 * t1 + 20.0 * t3 + 0.2 * t4
        out[2::4] = -360.0 * t2 * c - 2.0 * (1.0 - c)
        out[3::4] = 180.0 * t2 + 20.0 * t3 - 0.2 * t4
        return out

    return ObjectiveFunction("woods", n, f, g, np.tile([-3.0, -1.0, -3.0, -1.0], n // 4), 0.0)


def dixon3dq(n):
    """DIXON3DQ ``(x_1 - 1)^2 + sum (x_j - x_{j+1})^2 + (x_n - 1)^2``; start -1."""
    if n < 2:
        raise BadDimension("dixon3dq needs n >= 2")

    def f(x):
        return float((x[0] - 1.0) ** 2 + np.sum((x[1:-1] - x[2:]) ** 2) + (x[-1] - 1.0) ** 2)

    def g(x):
        out = np.zeros_like(x)
        out[0] = 2.0 * (x[0] - 1.0)
        d = 2.0 * (x[1:-1] - x[2:])
        out[1:-1] += d
        out[2:] -= d
        out[-1] += 2.0 * (x[-1] - 1.0)
        return out

    return ObjectiveFunction("dixon3dq", n, f, g, np.full(n, -1.0), 0.0)


def brybnd(n):
    """Broyden banded least squares (BRYBND); start -1."""
    lo, hi = 5, 1
    idx = np.arange(n)

    def resid(x):
        t = x * (1.0 + x)
        c = np.concatenate(([0.0], np.cumsum(t)))
        lower = np.maximum(0, idx - lo)
        upper = np.minimum(n - 1, idx + hi)
        band = c[upper + 1] - c[lower] - t
        return x * (2.0 + 5.0 * x * x) + 1.0 - band

    def f(x):
        r = resid(x)
        return float(r @ r)

    def g(x):
        r = 2.0 * resid(x)
        out = r * (2.0 + 15.0 * x * x)
        # column j of the Jacobian has -(1 + 2 x_j) in rows i with j in band(i), j != i
        c = np.concatenate(([0.0], np.cumsum(r)))
        lower = np.maximum(0, idx - hi)
        upper = np.minimum(n - 1, idx + lo)
        rows = c[upper + 1] - c[lower] - r
        out -= (1.0 + 2.0 * x) * rows
        return out

    return ObjectiveFunction("brybnd", n, f, g, np.full(n, -1.0), 0.0)


def broydn3dls(n):
    """Broyden tridiagonal least squares (BROYDN3DLS); start -1."""

    def resid(x):
        xm = np.concatenate(([0.0], x[:-1]))
        xp = np.concatenate((x[1:], [0.0]))
        return (3.0 - 2.0 * x) * x - xm - 2.0 * xp + 1.0

    def f(x):
        r = resid(x)
        return float(r @ r)

    def g(x):
        r = 2.0 * resid(x)
        out = r * (3.0 - 4.0 * x)
        out[:-1] -= r[1:]
        out[1:] -= 2.0 * r[:-1]
        return out

    return ObjectiveFunction("broydn3dls", n, f, g, np.full(n, -1.0), 0.0)


def schmvett(n):
    """SCHMVETT; start 3. Bounded below by ``-3 (n - 2)``."""
    if n < 3:
        raise BadDimension("schmvett needs n >= 3")

    def f(x):
        a, b, c = x[:-2], x[1:-1], x[2:]
        return float(
            -np.sum(
                1.0 / (1.0 + (a - b) ** 2)
                + np.sin(0.5 * (np.pi * b + c))
                + np.exp(-(((a + c) / b - 2.0) ** 2))
            )
        )

    def g(x):
        a, b, c = x[:-2], x[1:-1], x[2:]
        d = a - b
        t1 = 2.0 * d / (1.0 + d * d) ** 2
        cs = 0.5 * np.cos(0.5 * (np.pi * b + c))
        w = (a + c) / b - 2.0
        e = 2.0 * w * np.exp(-w * w)
        out = np.zeros_like(x)
        out[:-2] += t1 + e / b
        out[1:-1] += -t1 - np.pi * cs - e * (a + c) / (b * b)
        out[2:] += -cs + e / b
        return out

    return ObjectiveFunction("schmvett", n, f, g, np.full(n, 3.0), -3.0 * (n - 2))


def fletchcr(n):
    """FLETCHCR ``sum 100 (x_{i+1} - x_i + 1 - x_i^2)^2``; start zeros."""
    if n < 2:
        raise BadDimension("fletchcr needs n >= 2")

    def f(x):
        a, b = x[:-1], x[1:]
        return float(np.sum(100.0 * (b - a + 1.0 - a * a) ** 2))

    def g(x):
        a, b = x[:-1], x[1:]
        r = 200.0 * (b - a + 1.0 - a * a)
        out = np.zeros_like(x)
        out[:-1] -= r * (1.0 + 2.0 * a)
        out[1:] += r
        return out

    return ObjectiveFunction("fletchcr", n, f, g, np.zeros(n), 0.0)


def powellsg(n):
    """Extended Powell singular function (POWELLSG); start (3, -1, 0, 1, ...)."""
    if n < 4 or n % 4:
        raise BadDimension("powellsg needs n divisible by 4")

    def f(x):
        a, b, c, d = x[0::4], x[1::4], x[2::4], x[3::4]
        return float(np.sum((a + 10 * b) ** 2 + 5 * (c - d) ** 2 + (b - 2 * c) ** 4 + 10 * (a - d) ** 4))

    def g(x):
        a, b, c, d = x[0::4], x[1::4], x[2::4], x[3::4]
        t1 = 2 * (a + 10 * b)
        t2 = 10 * (c - d)
        t3 = 4 * (b - 2 * c) ** 3
        t4 = 40 * (a - d) ** 3
        out = np.empty_like(x)
        out[0::4] = t1 + t4
        out[1::4] = 10 * t1 + t3
        out[2::4] = t2 - 2 * t3
        out[3::4] = -t2 - t4
        return out

    return ObjectiveFunction("powellsg", n, f, g, np.tile([3.0, -1.0, 0.0, 1.0], n // 4), 0.0)


def freuroth(n):
    """Extended Freudenstein-Roth (FREUROTH); start (0.5, -2, -2, ...). Has spurious local minima."""
    if n < 2:
        raise BadDimension("freuroth needs n >= 2")

    def f(x):
        a, b = x[:-1], x[1:]
        r1 = a - 13.0 + ((5.0 - b) * b - 2.0) * b
        r2 = a - 29.0 + ((1.0 + b) * b - 14.0) * b
        return float(np.sum(r1 * r1 + r2 * r2))

    def g(x):
        a, b = x[:-1], x[1:]
        r1 = 2.0 * (a - 13.0 + ((5.0 - b) * b - 2.0) * b)
        r2 = 2.0 * (a - 29.0 + ((1.0 + b) * b - 14.0) * b)
        out = np.zeros_like(x)
        out[:-1] += r1 + r2
        out[1:] += r1 * (10.0 * b - 3.0 * b * b - 2.0) + r2 * (3.0 * b * b + 2.0 * b - 14.0)
        return out

    x0 = np.full(n, -2.0)
    x0[0] = 0.5
    return ObjectiveFunction("freuroth", n, f, g, x0, None)


# name -> (builder, table-1 dimension in the large-scale reference set or None)
_REGISTRY: dict[str, tuple[Callable[[int], ObjectiveFunction], Optional[int]]] = {
    "ext-rosenbrock": (ext_rosenbrock, 5000),
    "quadratic-diag": (quadratic_diag, None),
    "quadratic-tridiag": (quadratic_tridiag, None),
    "quartic": (quartic, 5000),
    "cosine": (cosine, 10000),
    "arwhead": (arwhead, 5000),
    "bdqrtic": (bdqrtic, 5000),
    "dqdrtic": (dqdrtic, 5000),
    "edensch": (edensch, 2000),
    "engval1": (engval1, 5000),
    "liarwhd": (liarwhd, 5000),
    "nondia": (nondia, 5000),
    "tridia": (tridia, 5000),
    "woods": (woods, 4000),
    "dixon3dq": (dixon3dq, 10000),
    "brybnd": (brybnd, 5000),
    "broydn3dls": (broydn3dls, 5000),
    "schmvett": (schmvett, 5000),
    "fletchcr": (fletchcr, 1000),
    "powellsg": (powellsg, 5000),
    "freuroth": (freuroth, 5000),
}


def problem_names():
    return sorted(_REGISTRY)


def default_dimension(name):
    if name not in _REGISTRY:
        raise UnknownProblem(name)
    return DEFAULT_N


def make_problem(name: str, n: int = DEFAULT_N) -> ObjectiveFunction:
    """Instantiate the registered problem ``name`` at dimension ``n``."""
    try:
        builder, table_n = _REGISTRY[name]
    except KeyError:
        raise UnknownProblem(f"unknown problem {name!r}; known: {', '.join(problem_names())}") from None
    if not isinstance(n, (int, np.integer)) or n < 1:
        raise BadDimension(f"n must be a positive integer, got {n!r}")
    p = builder(int(n))
    p.meta.setdefault("table_n", table_n)
    return p
