"""Re-optimization techniques: warm starts, fix-and-release, the exam
construction heuristic, presets, and the strategy catalog."""

from .catalog import CatalogEntry, StrategyCatalog, list_strategies
from .exam_heuristic import (
    ExamWarmStartParams,
    build_exam_warm_start,
    exam_heuristic_warm_start,
    params_from_state,
)
from .presets import load_preset, parse_preset
from .warmstarts import WarmStartReport, direct_warm_start, fix_and_release

HEURISTIC_BUILDERS = {"exam": build_exam_warm_start}

__all__ = [
    "CatalogEntry",
    "ExamWarmStartParams",
    "HEURISTIC_BUILDERS",
    "StrategyCatalog",
    "WarmStartReport",
    "build_exam_warm_start",
    "direct_warm_start",
    "exam_heuristic_warm_start",
    "fix_and_release",
    "list_strategies",
    "load_preset",
    "params_from_state",
    "parse_preset",
]
