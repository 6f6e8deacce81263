"""Gradient method with momentum for smooth unconstrained minimization.

Each iteration minimizes a 2-D quadratic model over ``span{-g, s}``, accepts the
result when it is gradient related and otherwise falls back to a repaired,
rescaled model matrix. Steepest descent, PR+ conjugate gradient and L-BFGS
share the same driver as baselines.
"""
from .bench import BenchPlan, ProfileCurve, SolverSpec, emit_csv, perf_profile, read_records, run_matrix
from .direction import DirectionOutcome, GrTestConstants, compute_direction, safeguarded_direction
from .hk import STRATEGIES, HkBuildContext, build_hk
from .linalg2 import Sym2, eig_bounds, modified_cholesky
from .linesearch import LineSearchConfig
from .problems import ObjectiveFunction, fd_grad_check, make_problem, problem_names
from .solver import (
    SOLVERS,
    RunRecord,
    SolverConfig,
    Status,
    cg_solve,
    gmm_solve,
    lbfgs_solve,
    solve,
    steepest_descent_solve,
)

__version__ = "0.1.0"

__all__ = [
    "BenchPlan", "ProfileCurve", "SolverSpec", "emit_csv", "perf_profile", "read_records", "run_matrix",
    "DirectionOutcome", "GrTestConstants", "compute_direction", "safeguarded_direction",
    "STRATEGIES", "HkBuildContext", "build_hk",
    "Sym2", "eig_bounds", "modified_cholesky",
    "LineSearchConfig",
    "ObjectiveFunction", "fd_grad_check", "make_problem", "problem_names",
    "SOLVERS", "RunRecord", "SolverConfig", "Status",
    "cg_solve", "gmm_solve", "lbfgs_solve", "solve", "steepest_descent_solve",
]
