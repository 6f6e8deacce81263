"""Backtracking Armijo line search with the Zhang-Hager nonmonotone reference."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = [
    "LineSearchConfig",
    "NonmonotoneState",
    "LineSearchResult",
    "LineSearchFailure",
    "NotDescent",
    "armijo",
    "zh_update",
]


class LineSearchFailure(RuntimeError):
    """No acceptable step within ``max_backtracks`` halvings."""

    def __init__(self, msg, evals=0):
        super().__init__(msg)
        self.evals = evals


class NotDescent(ValueError):
    pass


@dataclass(frozen=True)
class LineSearchConfig:
    gamma: float = 1e-5
    delta: float = 0.5
    max_backtracks: int = 60
    nonmonotone: bool = True
    eta_zh: float = 0.85

    def __post_init__(self):
        if not 0 < self.gamma < 1:
            raise ValueError("gamma must lie in (0, 1)")
        if not 0 < self.delta < 1:
            raise ValueError("delta must lie in (0, 1)")
        if not 0 <= self.eta_zh < 1:
            raise ValueError("eta_zh must lie in [0, 1)")
        if self.max_backtracks < 0:
            raise ValueError("max_backtracks must be >= 0")


@dataclass(frozen=True)
class NonmonotoneState:
    C: float
    Q: float = 1.0


@dataclass(frozen=True)
class LineSearchResult:
    eta: float
    x_new: np.ndarray
    f_new: float
    backtracks: int

    @property
    def evals(self):
        return self.backtracks + 1


def armijo(p, x, d, g, f_ref: float, cfg: LineSearchConfig = LineSearchConfig(), gtd: float | None = None):
    """Accept ``eta = delta**j`` for the smallest ``j`` with sufficient decrease.

    The test is ``f(x + eta d) <= f_ref + gamma eta g^T d`` starting from the
    unit step. Non-finite trial values are rejected like any other failure.
    """
    if gtd is None:
        gtd = float(g @ d)
    if not gtd < 0:
        raise NotDescent(f"g^T d = {gtd!r} is not negative")
    for j in range(cfg.max_backtracks + 1):
        eta = cfg.delta**j
        x_new = x + eta * d
        f_new = p.eval(x_new)
        if f_new <= f_ref + cfg.gamma * eta * gtd:
            return LineSearchResult(eta, x_new, f_new, j)
    raise LineSearchFailure(f"no sufficient decrease after {cfg.max_backtracks} backtracks",
                            evals=cfg.max_backtracks + 1)


def zh_update(st: NonmonotoneState, f_new: float, eta_zh: float) -> NonmonotoneState:
    """Zhang-Hager reference update ``Q' = eta Q + 1``, ``C' = (eta Q C + f) / Q'``."""
    q = eta_zh * st.Q + 1.0
    return NonmonotoneState((eta_zh * st.Q * st.C + f_new) / q, q)
