"""LP solving over flattened instances, backed by scipy's HiGHS interface.

``LPData`` caches the matrix form of an instance so branch-and-bound can
re-solve with per-node bound changes without rebuilding rows.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy.optimize import linprog

from ..errors import NumericalFailure
from ..model.types import Instance
from .types import SolveResult, SolverConfig


@dataclass(frozen=True)
class LPData:
    keys: tuple[str, ...]
    c: np.ndarray
    a_ub: np.ndarray
    b_ub: np.ndarray
    a_eq: np.ndarray
    b_eq: np.ndarray
    lower: np.ndarray
    upper: np.ndarray
    integer_mask: np.ndarray  # True where the variable is integer/binary


def lp_data_from_instance(instance: Instance) -> LPData:
    n = len(instance.variables)
    c = np.array([v.objective for v in instance.variables], dtype=float)
    lower = np.array([v.lower for v in instance.variables], dtype=float)
    upper = np.array([v.upper for v in instance.variables], dtype=float)
    integer_mask = np.array(
        [v.var_type in ("integer", "binary") for v in instance.variables], dtype=bool)

    ub_rows, ub_rhs, eq_rows, eq_rhs = [], [], [], []
    for row in instance.rows:
        dense = np.zeros(n)
        for pos, coeff in row.coeffs:
            dense[pos] = coeff
        if row.sense == "<=":
            ub_rows.append(dense)
            ub_rhs.append(row.rhs)
        elif row.sense == ">=":
            ub_rows.append(-dense)
            ub_rhs.append(-row.rhs)
        else:
            eq_rows.append(dense)
            eq_rhs.append(row.rhs)
    return LPData(
        keys=tuple(v.key for v in instance.variables),
        c=c,
        a_ub=np.array(ub_rows) if ub_rows else np.empty((0, n)),
        b_ub=np.array(ub_rhs) if ub_rhs else np.empty(0),
        a_eq=np.array(eq_rows) if eq_rows else np.empty((0, n)),
        b_eq=np.array(eq_rhs) if eq_rhs else np.empty(0),
        lower=lower,
        upper=upper,
        integer_mask=integer_mask,
    )


@dataclass(frozen=True)
class _LPOutcome:
    status: str  # optimal | infeasible | unbounded
    x: Optional[np.ndarray]
    objective: Optional[float]


def solve_lp_arrays(data: LPData, lower: np.ndarray, upper: np.ndarray,
                    time_limit: float) -> _LPOutcome:
    if np.any(lower > upper):
        return _LPOutcome("infeasible", None, None)
    if len(data.c) == 0:
        # empty model: feasible iff all rows hold with zero variables
        ok = np.all(data.b_ub >= 0) and np.all(data.b_eq == 0)
        return _LPOutcome("optimal" if ok else "infeasible", np.empty(0), 0.0)
    res = linprog(
        data.c,
        A_ub=data.a_ub if data.a_ub.size else None,
        b_ub=data.b_ub if data.b_ub.size else None,
        A_eq=data.a_eq if data.a_eq.size else None,
        b_eq=data.b_eq if data.b_eq.size else None,
        bounds=np.column_stack([lower, upper]),
        method="highs",
        options={"time_limit": max(time_limit, 1e-3)},
    )
    if res.status == 0:
        return _LPOutcome("optimal", np.asarray(res.x), float(res.fun))
    if res.status == 2:
        return _LPOutcome("infeasible", None, None)
    if res.status == 3:
        return _LPOutcome("unbounded", None, None)
    if res.status == 1:
        raise NumericalFailure("LP iteration/time limit hit before convergence")
    raise NumericalFailure(f"LP kernel failed: {res.message}")


def solve_lp(instance: Instance, config: SolverConfig | None = None) -> SolveResult:
    """Solve the continuous relaxation of ``instance`` exactly.

    Integrality markers are ignored; statuses are ``optimal``,
    ``infeasible``, or ``unbounded``.
    """
    config = config or SolverConfig()
    data = lp_data_from_instance(instance)
    start = time.perf_counter()
    out = solve_lp_arrays(data, data.lower, data.upper, config.time_limit)
    wall = time.perf_counter() - start
    if out.status != "optimal":
        return SolveResult(out.status, None, None, None, None, wall, node_count=0)
    assignment = {k: float(v) for k, v in zip(data.keys, out.x)}
    return SolveResult(
        status="optimal",
        assignment=assignment,
        objective=out.objective,
        best_bound=out.objective,
        gap=0.0,
        wall_time=wall,
        node_count=0,
    )


def dense_row_matrix(instance: Instance) -> tuple[np.ndarray, np.ndarray, list[str]]:
    """(row matrix, rhs, senses) for feasibility checking."""
    n = len(instance.variables)
    mat = np.zeros((len(instance.rows), n))
    rhs = np.zeros(len(instance.rows))
    senses = []
    for i, row in enumerate(instance.rows):
        for pos, coeff in row.coeffs:
            mat[i, pos] = coeff
        rhs[i] = row.rhs
        senses.append(row.sense)
    return mat, rhs, senses


def objective_value(instance: Instance, assignment) -> float:
    return float(sum(v.objective * assignment[v.key] for v in instance.variables))


def is_integral(value: float, tol: float) -> bool:
    return abs(value - round(value)) <= tol


def snap_integers(data: LPData, x: np.ndarray, tol: float) -> np.ndarray:
    out = x.copy()
    mask = data.integer_mask & (np.abs(x - np.round(x)) <= tol)
    out[mask] = np.round(out[mask])
    return out


def infinity_safe(v: float) -> float:
    return v if math.isfinite(v) else math.copysign(1e30, v)
