"""Desk-scale exact LP/MIP kernel with warm starts and a backend contract."""

from .backends import available_backends, get_backend, register_backend, solve
from .branch_and_bound import solve_mip
from .feasibility import FeasibilityViolation, check_feasible
from .lp import objective_value, solve_lp
from .types import SolveResult, SolverConfig, WarmStart, relative_gap

__all__ = [
    "FeasibilityViolation",
    "SolveResult",
    "SolverConfig",
    "WarmStart",
    "available_backends",
    "check_feasible",
    "get_backend",
    "objective_value",
    "register_backend",
    "relative_gap",
    "solve",
    "solve_lp",
    "solve_mip",
]
