"""Patch language: parse, validate, normalize, apply, diff."""

from .apply import apply_action_set, apply_patch
from .diff import diff_states, replay_diff, state_canon
from .normalize import normalize_action_set, normalize_patch
from .parse import parse_planner_output, planner_output_from_doc
from .schema import PLANNER_OUTPUT_SCHEMA, op_schema_text, schema_json
from .types import ActionSet, DiffEntry, Patch, PlannerOutput, StateDiff
from .validate import Violation, validate_patch

__all__ = [
    "ActionSet",
    "DiffEntry",
    "PLANNER_OUTPUT_SCHEMA",
    "Patch",
    "PlannerOutput",
    "StateDiff",
    "Violation",
    "apply_action_set",
    "apply_patch",
    "diff_states",
    "normalize_action_set",
    "normalize_patch",
    "op_schema_text",
    "parse_planner_output",
    "planner_output_from_doc",
    "replay_diff",
    "schema_json",
    "state_canon",
    "validate_patch",
]
