"""Orchestration core: planner/selector contracts, best-improvement
validation, the bounded closed loop, and nested success scoring."""

from .checks import (
    CheckResult,
    PromptCheck,
    evaluate_check,
    evaluate_checks,
    parse_checks,
    register_metric,
)
from .loop import LoopResult, run_closed_loop
from .planning import plan
from .records import (
    FAILURE_MODES,
    CandidateLogEntry,
    CaseScore,
    FailureRecord,
    StepOutcome,
    StrategyChoice,
)
from .scoring import apply_reference, classify_failure, score_case, states_equivalent
from .selection import fallback_choice, select_strategy
from .validation import ValidationOutcome, affected_keys, validate_and_solve

__all__ = [
    "FAILURE_MODES",
    "CandidateLogEntry",
    "CaseScore",
    "CheckResult",
    "FailureRecord",
    "LoopResult",
    "PromptCheck",
    "StepOutcome",
    "StrategyChoice",
    "ValidationOutcome",
    "affected_keys",
    "apply_reference",
    "classify_failure",
    "evaluate_check",
    "evaluate_checks",
    "fallback_choice",
    "parse_checks",
    "plan",
    "register_metric",
    "run_closed_loop",
    "score_case",
    "select_strategy",
    "states_equivalent",
    "validate_and_solve",
]
