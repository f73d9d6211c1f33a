"""Machine-readable planner-output schema.

The same document ships with the repo as ``data/schemas/planner_output.schema.json``,
feeds prompt assembly, and backs parse-time validation messages.
"""

from __future__ import annotations

import json

from ..ops import OP_EFFECTS, PATCH_OPS

_INDEX_KEY = {"type": "array", "items": {"type": "string"}}

PLANNER_OUTPUT_SCHEMA = {
    "$schema": "http://json-schema.org/draft-07/schema#",
    "title": "PlannerOutput",
    "type": "object",
    "required": ["edit_summary", "candidate_action_sets"],
    "properties": {
        "edit_summary": {
            "type": "string",
            "description": "Short free-form summary of the requested edit.",
        },
        "affected_sets": {
            "type": "object",
            "description": "Entity/set labels mapped to the identifiers the request touches.",
            "additionalProperties": {"type": "array", "items": {"type": "string"}},
        },
        "relevant_components": {
            "type": "array",
            "items": {"type": "string"},
            "description": "Names of model components relevant to the request.",
        },
        "candidate_action_sets": {
            "type": "array",
            "description": "Executable candidate plans; each is one atomic action set.",
            "items": {
                "type": "object",
                "required": ["actions"],
                "properties": {"actions": {"type": "array", "items": {"$ref": "#/$defs/patch"}}},
            },
        },
        "planning_hints": {
            "type": "object",
            "properties": {
                "edit_scope": {"enum": ["local", "structural"]},
                "expected_reuse": {"enum": ["high", "low"]},
            },
            "additionalProperties": {"type": "string"},
        },
        "intention": {"enum": ["tighten", "relax", "forbid", "prioritize", "update"]},
    },
    "$defs": {
        "index_key": _INDEX_KEY,
        "patch": {
            "type": "object",
            "required": ["op"],
            "properties": {
                "op": {"enum": list(PATCH_OPS)},
                "target": {
                    "description": "Component name; for pattern ops a regex string, "
                                   "or {vars, rows} patterns for UPDATE_COEFFICIENT.",
                },
                "scope": {
                    "description": "Index or row key the edit applies to, as an array of ids.",
                },
                "update": {"type": "object"},
                "notes": {"type": "string"},
            },
        },
    },
}

# per-op payload grammar, rendered into planner prompts
OP_UPDATE_SCHEMAS = {
    "UPDATE_PARAMETER": "update: {key?: [ids], value | delta}. Keyed entries need update.key; "
                        "additive requests use delta, never a recomputed value.",
    "UPDATE_BOUND": "scope: [ids]; update: {bound_type: 'lower'|'upper', value}.",
    "UPDATE_CONSTRAINT_RHS": "scope: [row ids]; update: {value | delta}.",
    "UPDATE_CONSTRAINT_LHS": "update: {lhs_spec: <full lhs document>} replacing the family lhs.",
    "UPDATE_OBJECTIVE_COEFF": "scope: [variable ids]; update: {var_family?, value | delta}.",
    "UPDATE_OBJECTIVE_WEIGHT": "update: {value | delta}.",
    "UPDATE_COEFFICIENT": "target: {vars: regex, rows: regex}; update: {value | scale}.",
    "FIX_VARIABLES_BY_PATTERN": "target: regex over flat variable keys; update: {value}.",
    "UPDATE_CONSTRAINT_RHS_BY_PATTERN": "target: regex over flat row keys; update: {value | scale}.",
    "ADD_VARIABLE_FAMILY": "update: {family: {name, index_set, var_type, default_bounds, ...}}.",
    "ADD_CONSTRAINT_FAMILY": "update: {constraint: {name, index_set, lhs, sense, rhs, ...}}.",
    "REMOVE_CONSTRAINT_FAMILY": "target: constraint family name.",
    "ADD_OBJECTIVE_COMPONENT": "update: {component: {name, weight, terms, ...}}.",
}


def op_schema_text() -> str:
    lines = []
    for op in PATCH_OPS:
        lines.append(f"- {op}: {OP_EFFECTS[op]}")
        lines.append(f"    {OP_UPDATE_SCHEMAS[op]}")
    return "\n".join(lines)


def schema_json() -> str:
    return json.dumps(PLANNER_OUTPUT_SCHEMA, indent=2) + "\n"
