"""Solver configuration, results, and warm-start values."""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Mapping, Optional

NODE_SELECTIONS = ("best_bound", "depth_first")
BRANCHING_RULES = ("most_fractional",)
STATUSES = ("optimal", "feasible_time_limit", "infeasible", "unbounded", "no_incumbent")


@dataclass(frozen=True)
class SolverConfig:
    time_limit: float = 60.0
    mip_gap_tolerance: float = 1e-4
    feasibility_tolerance: float = 1e-6
    node_selection: str = "best_bound"
    branching: str = "most_fractional"
    preset_name: Optional[str] = None
    random_seed: int = 0

    def __post_init__(self):
        if self.time_limit <= 0:
            raise ValueError("time_limit must be positive")
        if self.mip_gap_tolerance <= 0 or self.feasibility_tolerance <= 0:
            raise ValueError("tolerances must be positive")
        if self.node_selection not in NODE_SELECTIONS:
            raise ValueError(f"node_selection must be one of {NODE_SELECTIONS}")
        if self.branching not in BRANCHING_RULES:
            raise ValueError(f"branching must be one of {BRANCHING_RULES}")

    def merged(self, **overrides) -> "SolverConfig":
        return replace(self, **overrides)


def relative_gap(objective: float, best_bound: float) -> float:
    return abs(objective - best_bound) / max(1.0, abs(objective))


@dataclass(frozen=True)
class SolveResult:
    status: str
    assignment: Optional[Mapping[str, float]]
    objective: Optional[float]
    best_bound: Optional[float]
    gap: Optional[float]
    wall_time: float
    node_count: int = 0

    @property
    def has_incumbent(self) -> bool:
        return self.assignment is not None

    def to_doc(self) -> dict:
        return {
            "status": self.status,
            "assignment": dict(self.assignment) if self.assignment is not None else None,
            "objective": self.objective,
            "best_bound": self.best_bound,
            "gap": self.gap,
            "wall_time": self.wall_time,
            "node_count": self.node_count,
        }

    @staticmethod
    def from_doc(doc: Mapping) -> "SolveResult":
        return SolveResult(
            status=doc["status"],
            assignment=dict(doc["assignment"]) if doc.get("assignment") is not None else None,
            objective=doc.get("objective"),
            best_bound=doc.get("best_bound"),
            gap=doc.get("gap"),
            wall_time=float(doc.get("wall_time", 0.0)),
            node_count=int(doc.get("node_count", 0)),
        )


@dataclass(frozen=True)
class WarmStart:
    """Partial variable-value seed; keys outside the target instance are dropped."""

    values: Mapping[str, float] = field(default_factory=dict)
    source_label: str = "direct"
