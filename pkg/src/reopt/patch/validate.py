"""Patch validation against a model state.

Validation never mutates state and never raises for content problems: it
returns a list of violations (UnknownTarget, UnknownIndex, BoundInversion,
TypeMismatch, PatternMatchesNothing, DuplicateName).
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from typing import Mapping, Optional

from ..errors import ParseError, UnresolvedReference
from ..keys import IndexKey, coerce_key, flat_key
from ..model.instantiate import resolve_value
from ..model.io import (
    constraint_family_from_doc,
    lhs_from_doc,
    objective_component_from_doc,
    variable_family_from_doc,
)
from ..model.semantics import registered_kinds
from ..model.types import ExplicitTerms, ModelState, Semantic
from .types import Patch


@dataclass(frozen=True)
class Violation:
    code: str
    message: str

    def __str__(self):
        return f"{self.code}: {self.message}"


def _is_num(x) -> bool:
    return isinstance(x, (int, float)) and not isinstance(x, bool) and math.isfinite(float(x))


def _bound_num(x) -> Optional[float]:
    if x is None or x == "inf":
        return math.inf
    if x == "-inf":
        return -math.inf
    if isinstance(x, (int, float)) and not isinstance(x, bool):
        return float(x)
    return None


def variable_flat_keys(state: ModelState) -> list[str]:
    return [flat_key(f.name, idx)
            for f in state.variable_families.values() for idx in f.index_set]


def row_flat_keys(state: ModelState) -> list[str]:
    """Flat row keys of non-semantic families (semantic rows are generated)."""
    out = []
    for c in state.constraint_families.values():
        if isinstance(c.lhs, Semantic):
            continue
        out.extend(flat_key(c.name, row) for row in c.index_set)
    return out


def _exactly_one(update: Mapping, *fields) -> Optional[str]:
    present = [f for f in fields if update.get(f) is not None]
    return present[0] if len(present) == 1 else None


def parse_map_value(raw) -> Optional[dict[IndexKey, float]]:
    """Read a whole-map replacement payload: {"map": [[key, v], ...]} or
    a plain object whose keys are comma-joined ids."""
    try:
        if isinstance(raw, Mapping) and "map" in raw:
            return {coerce_key(list(k)): float(v) for k, v in raw["map"]}
        if isinstance(raw, Mapping):
            return {tuple(str(k).split(",")): float(v) for k, v in raw.items()}
    except (TypeError, ValueError):
        return None
    return None


def parse_keys_value(raw) -> Optional[tuple[IndexKey, ...]]:
    if not isinstance(raw, (list, tuple)):
        return None
    try:
        return tuple(coerce_key(k) for k in raw)
    except TypeError:
        return None


def _definition_doc(patch: Patch, *keys: str) -> Optional[Mapping]:
    for key in keys:
        doc = patch.update.get(key)
        if isinstance(doc, Mapping):
            return doc
    if "name" in patch.update:
        return patch.update
    return None


def _target_in(state: ModelState, patch: Patch, namespace: str, out: list[Violation]):
    target = patch.target
    if not isinstance(target, str):
        out.append(Violation("TypeMismatch", f"{patch.op} needs a name target, got {target!r}"))
        return None
    actual = state.namespace_of(target)
    if actual is None:
        out.append(Violation("UnknownTarget", f"no component named {target!r}"))
        return None
    if actual != namespace:
        out.append(Violation(
            "TypeMismatch", f"{target!r} is a {actual}, {patch.op} needs a {namespace}"))
        return None
    return target


def _scope_key(patch: Patch, out: list[Violation]) -> Optional[IndexKey]:
    if patch.scope is None:
        key = patch.update.get("key") or patch.update.get("index") or patch.update.get("row")
        if key is None:
            out.append(Violation("TypeMismatch", f"{patch.op} needs a scope index"))
            return None
        return coerce_key(key)
    try:
        return coerce_key(patch.scope)
    except TypeError:
        out.append(Violation("TypeMismatch", f"bad scope {patch.scope!r}"))
        return None


def _regex(pattern, what: str, out: list[Violation]):
    if not isinstance(pattern, str):
        out.append(Violation("TypeMismatch", f"{what} pattern must be a string"))
        return None
    try:
        return re.compile(pattern)
    except re.error as exc:
        out.append(Violation("TypeMismatch", f"bad {what} pattern {pattern!r}: {exc}"))
        return None


# -- per-op validators ----------------------------------------------------------


def _v_update_parameter(patch: Patch, state: ModelState, out: list[Violation]):
    target = _target_in(state, patch, "parameter", out)
    if target is None:
        return
    mode = _exactly_one(patch.update, "value", "delta")
    if mode is None:
        out.append(Violation("TypeMismatch", "exactly one of update.value/update.delta required"))
        return
    entry = state.parameters[target]
    raw_key = patch.update.get("key", patch.scope)
    key = coerce_key(raw_key) if raw_key is not None else None

    if entry.kind == "scalar":
        if key is not None:
            out.append(Violation("TypeMismatch", f"scalar parameter {target!r} takes no key"))
        if not _is_num(patch.update.get(mode)):
            out.append(Violation("TypeMismatch", f"update.{mode} must be a number"))
        return

    if entry.kind == "keys":
        if mode == "delta" or key is not None:
            out.append(Violation("TypeMismatch", f"{target!r} is a key list; replace it wholesale"))
            return
        if parse_keys_value(patch.update.get("value")) is None:
            out.append(Violation("TypeMismatch", "update.value must be a list of index keys"))
        return

    # keyed map
    if key is None:
        if mode == "delta":
            out.append(Violation("TypeMismatch", "delta on a keyed parameter needs update.key"))
            return
        if parse_map_value(patch.update.get("value")) is None:
            out.append(Violation("TypeMismatch", "whole-map replacement needs a key->number object"))
        return
    arity = {len(k) for k in entry.value} or {len(key)}
    if len(key) not in arity:
        out.append(Violation("UnknownIndex", f"key {key} has wrong arity for {target!r}"))
        return
    if mode == "delta" and key not in entry.value:
        out.append(Violation(
            "UnknownIndex", f"delta on missing key {key} of {target!r} (no implicit zero)"))
    if not _is_num(patch.update.get(mode)):
        out.append(Violation("TypeMismatch", f"update.{mode} must be a number"))


def _v_update_bound(patch: Patch, state: ModelState, out: list[Violation]):
    target = _target_in(state, patch, "variable_family", out)
    if target is None:
        return
    fam = state.variable_families[target]
    key = _scope_key(patch, out)
    if key is None:
        return
    if key not in set(fam.index_set):
        out.append(Violation("UnknownIndex", f"{target!r} has no index {key}"))
        return
    side = patch.update.get("bound_type", patch.update.get("bound"))
    if side not in ("lower", "upper"):
        out.append(Violation("TypeMismatch", "update.bound_type must be 'lower' or 'upper'"))
        return
    value = _bound_num(patch.update.get("value"))
    if value is None:
        out.append(Violation("TypeMismatch", "update.value must be a number"))
        return
    lo, hi = fam.bounds(key)
    lo, hi = (value, hi) if side == "lower" else (lo, value)
    if lo > hi:
        out.append(Violation("BoundInversion", f"lower {lo} above upper {hi} on {target}{key}"))
    if fam.var_type == "binary" and not (0.0 <= lo and hi <= 1.0):
        out.append(Violation("BoundInversion", f"binary bounds must stay within [0,1]"))


def _current_rhs(state: ModelState, family, row: IndexKey) -> float:
    return resolve_value(family.rhs.at(row), state, row)


def _v_update_constraint_rhs(patch: Patch, state: ModelState, out: list[Violation]):
    target = _target_in(state, patch, "constraint_family", out)
    if target is None:
        return
    fam = state.constraint_families[target]
    if isinstance(fam.lhs, Semantic):
        out.append(Violation("TypeMismatch", f"{target!r} rows are generated by a semantic kind"))
        return
    row = _scope_key(patch, out)
    if row is None:
        return
    if row not in set(fam.index_set):
        out.append(Violation("UnknownIndex", f"{target!r} has no row {row}"))
        return
    mode = _exactly_one(patch.update, "value", "delta")
    if mode is None:
        out.append(Violation("TypeMismatch", "exactly one of update.value/update.delta required"))
        return
    if not _is_num(patch.update.get(mode)):
        out.append(Violation("TypeMismatch", f"update.{mode} must be a number"))
        return
    if mode == "delta":
        try:
            _current_rhs(state, fam, row)
        except (UnresolvedReference, KeyError) as exc:
            out.append(Violation("TypeMismatch", f"current rhs not resolvable: {exc}"))


def _v_update_constraint_lhs(patch: Patch, state: ModelState, out: list[Violation]):
    target = _target_in(state, patch, "constraint_family", out)
    if target is None:
        return
    spec = patch.update.get("lhs_spec", patch.update.get("lhs"))
    if spec is None:
        out.append(Violation("TypeMismatch", "update.lhs_spec required"))
        return
    try:
        lhs = lhs_from_doc(dict(spec) if isinstance(spec, Mapping) else spec, target)
    except (ParseError, TypeError, ValueError) as exc:
        out.append(Violation("TypeMismatch", f"bad lhs_spec: {exc}"))
        return
    if isinstance(lhs, Semantic) and lhs.kind not in registered_kinds():
        out.append(Violation("TypeMismatch", f"semantic kind {lhs.kind!r} is not registered"))


def _objective_term_family(comp, patch: Patch, state: ModelState, out: list[Violation]):
    fam_name = patch.update.get("var_family")
    if fam_name is None:
        families = {t[0] for t in comp.terms}
        if len(families) != 1:
            out.append(Violation(
                "TypeMismatch",
                "update.var_family required when the component references "
                f"{len(families)} variable families"))
            return None
        fam_name = next(iter(families))
    if fam_name not in state.variable_families:
        out.append(Violation("UnknownTarget", f"no variable family {fam_name!r}"))
        return None
    return fam_name


def _v_update_objective_coeff(patch: Patch, state: ModelState, out: list[Violation]):
    target = _target_in(state, patch, "objective_component", out)
    if target is None:
        return
    comp = state.objective_components[target]
    index = _scope_key(patch, out)
    if index is None:
        return
    fam_name = _objective_term_family(comp, patch, state, out)
    if fam_name is None:
        return
    if index not in set(state.variable_families[fam_name].index_set):
        out.append(Violation("UnknownIndex", f"{fam_name!r} has no index {index}"))
        return
    mode = _exactly_one(patch.update, "value", "delta")
    if mode is None:
        out.append(Violation("TypeMismatch", "exactly one of update.value/update.delta required"))
        return
    if not _is_num(patch.update.get(mode)):
        out.append(Violation("TypeMismatch", f"update.{mode} must be a number"))
        return
    has_term = any(t[0] == fam_name and t[1] == index for t in comp.terms)
    if mode == "delta" and not has_term:
        out.append(Violation("UnknownIndex",
                             f"delta on missing term {fam_name}{index} in {target!r}"))


def _v_update_objective_weight(patch: Patch, state: ModelState, out: list[Violation]):
    if _target_in(state, patch, "objective_component", out) is None:
        return
    mode = _exactly_one(patch.update, "value", "delta")
    if mode is None or not _is_num(patch.update.get(mode)):
        out.append(Violation("TypeMismatch", "exactly one numeric update.value/update.delta required"))


def coefficient_matches(patch: Patch, state: ModelState):
    """(family name, row key, term position) triples selected by an
    UPDATE_COEFFICIENT pattern pair over explicit rows."""
    target = patch.target if isinstance(patch.target, Mapping) else {}
    var_re = re.compile(target.get("vars", ""))
    row_re = re.compile(target.get("rows", ""))
    hits = []
    for fam in state.constraint_families.values():
        if not isinstance(fam.lhs, ExplicitTerms):
            continue
        for row_key, terms in fam.lhs.rows.items():
            if not row_re.search(flat_key(fam.name, row_key)):
                continue
            for ti, term in enumerate(terms):
                if var_re.search(flat_key(term[0], term[1])):
                    hits.append((fam.name, row_key, ti))
    return hits


def _v_update_coefficient(patch: Patch, state: ModelState, out: list[Violation]):
    target = patch.target
    if not isinstance(target, Mapping) or "vars" not in target or "rows" not in target:
        out.append(Violation(
            "TypeMismatch", "target must be an object with 'vars' and 'rows' patterns"))
        return
    if _regex(target.get("vars"), "vars", out) is None:
        return
    if _regex(target.get("rows"), "rows", out) is None:
        return
    mode = _exactly_one(patch.update, "value", "scale")
    if mode is None or not _is_num(patch.update.get(mode)):
        out.append(Violation("TypeMismatch", "exactly one numeric update.value/update.scale required"))
        return
    hits = coefficient_matches(patch, state)
    if not hits:
        out.append(Violation("PatternMatchesNothing",
                             f"patterns {dict(target)!r} select no explicit coefficients"))
        return
    if mode == "scale":
        for fam_name, row_key, ti in hits:
            term = state.constraint_families[fam_name].lhs.rows[row_key][ti]
            try:
                resolve_value(term[2], state, term[1])
            except (UnresolvedReference, KeyError) as exc:
                out.append(Violation("TypeMismatch", f"cannot scale unresolvable coeff: {exc}"))
                return


def _v_fix_variables(patch: Patch, state: ModelState, out: list[Violation]):
    rx = _regex(patch.target, "variable", out)
    if rx is None:
        return
    if not _is_num(patch.update.get("value")):
        out.append(Violation("TypeMismatch", "update.value must be a number"))
        return
    value = float(patch.update["value"])
    hits = [k for k in variable_flat_keys(state) if rx.search(k)]
    if not hits:
        out.append(Violation("PatternMatchesNothing",
                             f"pattern {patch.target!r} selects no variables"))
        return
    for fam in state.variable_families.values():
        if fam.var_type == "binary" and not (0.0 <= value <= 1.0):
            if any(rx.search(flat_key(fam.name, idx)) for idx in fam.index_set):
                out.append(Violation("BoundInversion",
                                     f"fix value {value} outside [0,1] on binary family {fam.name!r}"))
                return


def _v_rhs_by_pattern(patch: Patch, state: ModelState, out: list[Violation]):
    rx = _regex(patch.target, "row", out)
    if rx is None:
        return
    mode = _exactly_one(patch.update, "value", "scale")
    if mode is None or not _is_num(patch.update.get(mode)):
        out.append(Violation("TypeMismatch", "exactly one numeric update.value/update.scale required"))
        return
    hits = [k for k in row_flat_keys(state) if rx.search(k)]
    if not hits:
        out.append(Violation("PatternMatchesNothing",
                             f"pattern {patch.target!r} selects no rows"))
        return
    if mode == "scale":
        for fam in state.constraint_families.values():
            if isinstance(fam.lhs, Semantic):
                continue
            for row in fam.index_set:
                if not rx.search(flat_key(fam.name, row)):
                    continue
                try:
                    _current_rhs(state, fam, row)
                except (UnresolvedReference, KeyError) as exc:
                    out.append(Violation("TypeMismatch", f"cannot scale rhs: {exc}"))
                    return


def _v_add(kind: str, from_doc, *doc_keys: str):
    def check(patch: Patch, state: ModelState, out: list[Violation]):
        doc = _definition_doc(patch, *doc_keys)
        if doc is None:
            out.append(Violation("TypeMismatch", f"{patch.op} needs a definition object"))
            return
        try:
            obj = from_doc(doc)
        except (ParseError, TypeError, ValueError, KeyError) as exc:
            out.append(Violation("TypeMismatch", f"bad {kind} definition: {exc}"))
            return
        if obj.name in state.names():
            out.append(Violation("DuplicateName", f"{obj.name!r} already registered"))
            return
        lhs = getattr(obj, "lhs", None)
        if isinstance(lhs, Semantic) and lhs.kind not in registered_kinds():
            out.append(Violation("TypeMismatch", f"semantic kind {lhs.kind!r} is not registered"))
    return check


def _v_remove_constraint_family(patch: Patch, state: ModelState, out: list[Violation]):
    _target_in(state, patch, "constraint_family", out)


_VALIDATORS = {
    "UPDATE_PARAMETER": _v_update_parameter,
    "UPDATE_BOUND": _v_update_bound,
    "UPDATE_CONSTRAINT_RHS": _v_update_constraint_rhs,
    "UPDATE_CONSTRAINT_LHS": _v_update_constraint_lhs,
    "UPDATE_OBJECTIVE_COEFF": _v_update_objective_coeff,
    "UPDATE_OBJECTIVE_WEIGHT": _v_update_objective_weight,
    "UPDATE_COEFFICIENT": _v_update_coefficient,
    "FIX_VARIABLES_BY_PATTERN": _v_fix_variables,
    "UPDATE_CONSTRAINT_RHS_BY_PATTERN": _v_rhs_by_pattern,
    "ADD_VARIABLE_FAMILY": _v_add("variable family", variable_family_from_doc,
                                  "family", "variable"),
    "ADD_CONSTRAINT_FAMILY": _v_add("constraint family", constraint_family_from_doc,
                                    "family", "constraint"),
    "ADD_OBJECTIVE_COMPONENT": _v_add("objective component", objective_component_from_doc,
                                      "component", "objective", "family"),
    "REMOVE_CONSTRAINT_FAMILY": _v_remove_constraint_family,
}


def validate_patch(patch: Patch, state: ModelState) -> list[Violation]:
    out: list[Violation] = []
    _VALIDATORS[patch.op](patch, state, out)
    return out
