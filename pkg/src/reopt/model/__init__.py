"""Structured model state, instantiation, rendering, and serialization."""

from .instantiate import instantiate, resolve_value
from .io import load_state, save_state, state_from_doc, state_to_doc
from .lp_format import read_lp, write_lp
from .render import render_for_planner
from .semantics import register_semantic_kind, registered_kinds
from .types import (
    ConstraintFamily,
    ExplicitTerms,
    IndexedSum,
    Instance,
    InstanceRow,
    InstanceVar,
    Literal,
    ModelState,
    ObjectiveComponent,
    ParamRef,
    ParameterEntry,
    RhsSpec,
    Semantic,
    VariableFamily,
    make_index_set,
    new_state,
    register_constraint_family,
    register_objective_component,
    register_parameter,
    register_variable_family,
)

__all__ = [
    "ConstraintFamily",
    "ExplicitTerms",
    "IndexedSum",
    "Instance",
    "InstanceRow",
    "InstanceVar",
    "Literal",
    "ModelState",
    "ObjectiveComponent",
    "ParamRef",
    "ParameterEntry",
    "RhsSpec",
    "Semantic",
    "VariableFamily",
    "instantiate",
    "load_state",
    "make_index_set",
    "new_state",
    "read_lp",
    "register_constraint_family",
    "register_objective_component",
    "register_parameter",
    "register_semantic_kind",
    "register_variable_family",
    "registered_kinds",
    "render_for_planner",
    "resolve_value",
    "save_state",
    "state_from_doc",
    "state_to_doc",
    "write_lp",
]
