"""Assignment feasibility diagnostics. Violations are data, not errors."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping

import numpy as np

from ..model.types import Instance
from .lp import dense_row_matrix


@dataclass(frozen=True)
class FeasibilityViolation:
    kind: str  # missing_value | bound | row | integrality
    key: str
    magnitude: float
    message: str


def check_feasible(instance: Instance, assignment: Mapping[str, float],
                   tolerance: float = 1e-6) -> list[FeasibilityViolation]:
    """Report every violated row/bound with its slack magnitude.

    An empty list means the assignment is feasible within ``tolerance``.
    Missing variables are themselves violations; row checks are skipped
    until the assignment is complete.
    """
    violations: list[FeasibilityViolation] = []
    missing = [v.key for v in instance.variables if v.key not in assignment]
    for key in missing:
        violations.append(FeasibilityViolation(
            "missing_value", key, float("inf"), f"no value for {key}"))
    if missing:
        return violations

    x = np.array([float(assignment[v.key]) for v in instance.variables])
    for value, var in zip(x, instance.variables):
        if value < var.lower - tolerance:
            violations.append(FeasibilityViolation(
                "bound", var.key, var.lower - value,
                f"{var.key} = {value} below lower bound {var.lower}"))
        elif value > var.upper + tolerance:
            violations.append(FeasibilityViolation(
                "bound", var.key, value - var.upper,
                f"{var.key} = {value} above upper bound {var.upper}"))
        if var.var_type in ("integer", "binary"):
            drift = abs(value - round(value))
            if drift > tolerance:
                violations.append(FeasibilityViolation(
                    "integrality", var.key, drift, f"{var.key} = {value} is fractional"))

    if instance.rows:
        mat, rhs, senses = dense_row_matrix(instance)
        lhs = mat @ x
        for i, row in enumerate(instance.rows):
            gap = lhs[i] - rhs[i]
            if senses[i] == "<=" and gap > tolerance:
                violations.append(FeasibilityViolation(
                    "row", row.key, gap, f"{row.key}: lhs {lhs[i]} exceeds rhs {rhs[i]}"))
            elif senses[i] == ">=" and -gap > tolerance:
                violations.append(FeasibilityViolation(
                    "row", row.key, -gap, f"{row.key}: lhs {lhs[i]} below rhs {rhs[i]}"))
            elif senses[i] == "=" and abs(gap) > tolerance:
                violations.append(FeasibilityViolation(
                    "row", row.key, abs(gap), f"{row.key}: lhs {lhs[i]} != rhs {rhs[i]}"))
    return violations
