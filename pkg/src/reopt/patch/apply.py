"""Patch application: per-op semantics and atomic action-set transitions."""

from __future__ import annotations

import logging
import re
from dataclasses import replace
from typing import Mapping

from ..errors import ApplyError, PatternMatchesNothing
from ..keys import coerce_key, flat_key
from ..model.instantiate import resolve_value
from ..model.io import (
    constraint_family_from_doc,
    lhs_from_doc,
    objective_component_from_doc,
    variable_family_from_doc,
)
from ..model.types import ExplicitTerms, Literal, ModelState, Semantic
from .diff import diff_states
from .types import ActionSet, Patch, StateDiff
from .validate import (
    coefficient_matches,
    parse_keys_value,
    parse_map_value,
    validate_patch,
)

log = logging.getLogger(__name__)


def _a_update_parameter(state: ModelState, patch: Patch) -> ModelState:
    entry = state.parameters[patch.target]
    update = patch.update
    raw_key = update.get("key", patch.scope)
    key = coerce_key(raw_key) if raw_key is not None else None

    if entry.kind == "scalar":
        value = float(update["value"]) if update.get("value") is not None \
            else float(entry.value) + float(update["delta"])
        new = replace(entry, value=value)
    elif entry.kind == "keys":
        new = replace(entry, value=parse_keys_value(update["value"]))
    elif key is None:
        new = replace(entry, value=parse_map_value(update["value"]))
    else:
        values = dict(entry.value)
        if update.get("value") is not None:
            values[key] = float(update["value"])
        else:
            values[key] = values[key] + float(update["delta"])
        new = replace(entry, value=values)
    return replace(state, parameters={**state.parameters, patch.target: new})


def _a_update_bound(state: ModelState, patch: Patch) -> ModelState:
    fam = state.variable_families[patch.target]
    key = coerce_key(patch.update.get("key", patch.scope))
    side = patch.update.get("bound_type", patch.update.get("bound"))
    raw = patch.update["value"]
    value = float("inf") if raw == "inf" else float("-inf") if raw == "-inf" else float(raw)
    lo, hi = fam.bounds(key)
    lo, hi = (value, hi) if side == "lower" else (lo, value)
    new = replace(fam, bound_overrides={**fam.bound_overrides, key: (lo, hi)})
    return replace(state, variable_families={**state.variable_families, patch.target: new})


def _a_update_constraint_rhs(state: ModelState, patch: Patch) -> ModelState:
    fam = state.constraint_families[patch.target]
    row = coerce_key(patch.update.get("row", patch.scope))
    if patch.update.get("value") is not None:
        value = float(patch.update["value"])
    else:
        current = resolve_value(fam.rhs.at(row), state, row)
        value = current + float(patch.update["delta"])
    overrides = {**fam.rhs.overrides, row: Literal(value)}
    new = replace(fam, rhs=replace(fam.rhs, overrides=overrides))
    return replace(state, constraint_families={**state.constraint_families, patch.target: new})


def _a_update_constraint_lhs(state: ModelState, patch: Patch) -> ModelState:
    fam = state.constraint_families[patch.target]
    spec = patch.update.get("lhs_spec", patch.update.get("lhs"))
    new = replace(fam, lhs=lhs_from_doc(_thaw_doc(spec), patch.target))
    return replace(state, constraint_families={**state.constraint_families, patch.target: new})


def _a_update_objective_coeff(state: ModelState, patch: Patch) -> ModelState:
    comp = state.objective_components[patch.target]
    index = coerce_key(patch.update.get("index", patch.scope))
    fam_name = patch.update.get("var_family") or next(iter({t[0] for t in comp.terms}))
    terms = list(comp.terms)
    at = next((i for i, t in enumerate(terms) if t[0] == fam_name and t[1] == index), None)
    if patch.update.get("value") is not None:
        coeff = Literal(float(patch.update["value"]))
    else:
        coeff = Literal(resolve_value(terms[at][2], state, index) + float(patch.update["delta"]))
    if at is None:
        terms.append((fam_name, index, coeff))
    else:
        terms[at] = (fam_name, index, coeff)
    new = replace(comp, terms=tuple(terms))
    return replace(state, objective_components={**state.objective_components, patch.target: new})


def _a_update_objective_weight(state: ModelState, patch: Patch) -> ModelState:
    comp = state.objective_components[patch.target]
    if patch.update.get("value") is not None:
        weight = float(patch.update["value"])
    else:
        weight = comp.weight + float(patch.update["delta"])
    new = replace(comp, weight=weight)
    return replace(state, objective_components={**state.objective_components, patch.target: new})


def _a_update_coefficient(state: ModelState, patch: Patch) -> ModelState:
    hits = coefficient_matches(patch, state)
    by_family: dict[str, list] = {}
    for fam_name, row_key, ti in hits:
        by_family.setdefault(fam_name, []).append((row_key, ti))
    families = dict(state.constraint_families)
    for fam_name, places in by_family.items():
        fam = families[fam_name]
        rows = {k: list(v) for k, v in fam.lhs.rows.items()}
        for row_key, ti in places:
            term = rows[row_key][ti]
            if patch.update.get("value") is not None:
                coeff = Literal(float(patch.update["value"]))
            else:
                coeff = Literal(resolve_value(term[2], state, term[1]) * float(patch.update["scale"]))
            rows[row_key][ti] = (term[0], term[1], coeff)
        families[fam_name] = replace(
            fam, lhs=ExplicitTerms(rows={k: tuple(v) for k, v in rows.items()}))
    return replace(state, constraint_families=families)


def _a_fix_variables(state: ModelState, patch: Patch) -> ModelState:
    rx = re.compile(patch.target)
    value = float(patch.update["value"])
    families = dict(state.variable_families)
    for name, fam in families.items():
        overrides = dict(fam.bound_overrides)
        touched = False
        for idx in fam.index_set:
            if rx.search(flat_key(name, idx)):
                overrides[idx] = (value, value)
                touched = True
        if touched:
            families[name] = replace(fam, bound_overrides=overrides)
    return replace(state, variable_families=families)


def _a_rhs_by_pattern(state: ModelState, patch: Patch) -> ModelState:
    rx = re.compile(patch.target)
    families = dict(state.constraint_families)
    for name, fam in families.items():
        if isinstance(fam.lhs, Semantic):
            continue
        overrides = dict(fam.rhs.overrides)
        touched = False
        for row in fam.index_set:
            if not rx.search(flat_key(name, row)):
                continue
            if patch.update.get("value") is not None:
                value = float(patch.update["value"])
            else:
                value = resolve_value(fam.rhs.at(row), state, row) * float(patch.update["scale"])
            overrides[row] = Literal(value)
            touched = True
        if touched:
            families[name] = replace(fam, rhs=replace(fam.rhs, overrides=overrides))
    return replace(state, constraint_families=families)


def _thaw_doc(doc):
    if isinstance(doc, Mapping):
        return {k: _thaw_doc(v) for k, v in doc.items()}
    if isinstance(doc, tuple):
        return [_thaw_doc(v) for v in doc]
    return doc


def _a_add_variable_family(state: ModelState, patch: Patch) -> ModelState:
    doc = _thaw_doc(_pick_doc(patch, "family", "variable"))
    return state.with_variable_family(variable_family_from_doc(doc))


def _a_add_constraint_family(state: ModelState, patch: Patch) -> ModelState:
    doc = _thaw_doc(_pick_doc(patch, "family", "constraint"))
    return state.with_constraint_family(constraint_family_from_doc(doc))


def _a_add_objective_component(state: ModelState, patch: Patch) -> ModelState:
    doc = _thaw_doc(_pick_doc(patch, "component", "objective", "family"))
    return state.with_objective_component(objective_component_from_doc(doc))


def _pick_doc(patch: Patch, *keys: str):
    for key in keys:
        doc = patch.update.get(key)
        if isinstance(doc, Mapping):
            return doc
    return patch.update


def _a_remove_constraint_family(state: ModelState, patch: Patch) -> ModelState:
    families = dict(state.constraint_families)
    del families[patch.target]
    return replace(state, constraint_families=families)


_APPLIERS = {
    "UPDATE_PARAMETER": _a_update_parameter,
    "UPDATE_BOUND": _a_update_bound,
    "UPDATE_CONSTRAINT_RHS": _a_update_constraint_rhs,
    "UPDATE_CONSTRAINT_LHS": _a_update_constraint_lhs,
    "UPDATE_OBJECTIVE_COEFF": _a_update_objective_coeff,
    "UPDATE_OBJECTIVE_WEIGHT": _a_update_objective_weight,
    "UPDATE_COEFFICIENT": _a_update_coefficient,
    "FIX_VARIABLES_BY_PATTERN": _a_fix_variables,
    "UPDATE_CONSTRAINT_RHS_BY_PATTERN": _a_rhs_by_pattern,
    "ADD_VARIABLE_FAMILY": _a_add_variable_family,
    "ADD_CONSTRAINT_FAMILY": _a_add_constraint_family,
    "ADD_OBJECTIVE_COMPONENT": _a_add_objective_component,
    "REMOVE_CONSTRAINT_FAMILY": _a_remove_constraint_family,
}


def apply_patch(state: ModelState, patch: Patch, pattern_miss: str = "error") -> ModelState:
    """Apply one validated patch; raises ApplyError on any violation.

    ``pattern_miss="warn"`` downgrades a pattern matching zero objects to a
    logged warning and leaves the state unchanged.
    """
    violations = validate_patch(patch, state)
    if violations:
        if all(v.code == "PatternMatchesNothing" for v in violations):
            if pattern_miss == "warn":
                log.warning("pattern op matched nothing: %s", violations[0].message)
                return state
            raise PatternMatchesNothing(violations[0].message, violations=violations)
        raise ApplyError("; ".join(str(v) for v in violations), violations=violations)
    try:
        return _APPLIERS[patch.op](state, patch)
    except ApplyError:
        raise
    except Exception as exc:
        raise ApplyError(f"{patch.op} failed: {exc}") from exc


def apply_action_set(state: ModelState, actions: ActionSet,
                     pattern_miss: str = "error") -> tuple[ModelState, StateDiff]:
    """Apply patches in order as one atomic transition.

    On success the version increments by one and the emitted diff links
    the two states. On any failure an ApplyError carrying the failing
    patch index propagates and the input state is untouched.
    """
    if not actions.actions:
        return state, StateDiff()
    working = state
    for i, patch in enumerate(actions.actions):
        try:
            working = apply_patch(working, patch, pattern_miss=pattern_miss)
        except ApplyError as exc:
            exc.patch_index = i
            raise
    new_state = replace(working, version=state.version + 1)
    return new_state, diff_states(state, new_state)
