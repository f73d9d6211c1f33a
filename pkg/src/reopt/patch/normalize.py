"""The deterministic programmer: canonicalize labels, coerce indices,
rewrite ops into equivalent canonical forms.

Normalization is idempotent and never consults anything but the action
set and the state it is given.
"""

from __future__ import annotations

from dataclasses import replace
from typing import Optional

from ..errors import UnmappableLabel
from ..keys import IndexKey, coerce_key
from ..model.types import (
    ExplicitTerms,
    IndexedSum,
    ModelState,
    ParamRef,
    Semantic,
)
from .types import ActionSet, Patch


def _known_ids(state: ModelState) -> set[str]:
    ids = set(state.entity_registry.values())
    for fam in state.variable_families.values():
        for key in fam.index_set:
            ids.update(key)
    for fam in state.constraint_families.values():
        for key in fam.index_set:
            ids.update(key)
    for entry in state.parameters.values():
        if entry.kind == "map":
            for key in entry.value:
                ids.update(key)
        elif entry.kind == "keys":
            for key in entry.value:
                ids.update(key)
    return ids


def _map_token(token: str, state: ModelState, known: set[str]) -> str:
    if token in state.entity_registry:
        return state.entity_registry[token]
    if token in known or state.namespace_of(token) is not None:
        return token
    if any(ch.isspace() for ch in token):
        raise UnmappableLabel(f"label {token!r} resolves to no canonical id")
    return token


def _map_key(key: IndexKey, state: ModelState, known: set[str]) -> IndexKey:
    return tuple(_map_token(t, state, known) for t in key)


def _resolved_param_key(expr: ParamRef, row: IndexKey) -> Optional[IndexKey]:
    if expr.key is not None:
        return expr.key
    if expr.project is not None:
        try:
            return tuple(row[p] for p in expr.project)
        except IndexError:
            return None
    return row


def _count_param_references(state: ModelState, name: str, key: IndexKey) -> int:
    """How many resolved expressions in the state read parameter ``name[key]``."""
    count = 0

    def hit(expr, context: IndexKey):
        nonlocal count
        if isinstance(expr, ParamRef) and expr.name == name:
            if _resolved_param_key(expr, context) == key:
                count += 1

    for fam in state.constraint_families.values():
        if isinstance(fam.lhs, ExplicitTerms):
            for terms in fam.lhs.rows.values():
                for _, idx, coeff in terms:
                    hit(coeff, idx)
        elif isinstance(fam.lhs, IndexedSum):
            vfam = state.variable_families.get(fam.lhs.var_family)
            if vfam is not None and isinstance(fam.lhs.coeff, ParamRef):
                for idx in vfam.index_set:
                    hit(fam.lhs.coeff, idx)
        for row in fam.index_set:
            if isinstance(fam.lhs, Semantic):
                continue
            try:
                expr = fam.rhs.at(row)
            except KeyError:
                continue
            hit(expr, row)
    for comp in state.objective_components.values():
        for _, idx, coeff in comp.terms:
            hit(coeff, idx)
    return count


def _rewrite_rhs_to_parameter(patch: Patch, state: ModelState) -> Patch:
    """UPDATE_CONSTRAINT_RHS whose row rhs is a pure parameter reference
    becomes the equivalent UPDATE_PARAMETER, provided that parameter key
    is read nowhere else (so the rewrite cannot change other rows)."""
    fam = state.constraint_families.get(patch.target)
    if fam is None or patch.scope is None or isinstance(fam.lhs, Semantic):
        return patch
    row = coerce_key(patch.scope)
    if row in fam.rhs.overrides:
        expr = fam.rhs.overrides[row]
    elif fam.rhs.default is not None and row in set(fam.index_set):
        expr = fam.rhs.default
    else:
        return patch
    if not isinstance(expr, ParamRef):
        return patch
    key = _resolved_param_key(expr, row)
    if key is None:
        return patch
    entry = state.parameters.get(expr.name)
    if entry is None:
        return patch
    if entry.kind == "map" and key not in entry.value:
        return patch
    if _count_param_references(state, expr.name, key) != 1:
        return patch
    update = {k: v for k, v in patch.update.items() if k in ("value", "delta")}
    if entry.kind == "map":
        update["key"] = list(key)
    return Patch(op="UPDATE_PARAMETER", target=expr.name, scope=None,
                 update=update, notes=patch.notes)


_KEY_FIELDS = ("key", "index", "row")


def normalize_patch(patch: Patch, state: ModelState, known: set[str]) -> Patch:
    # (a) canonicalize the target when it is a plain name (not a pattern spec)
    target = patch.target
    if isinstance(target, str) and patch.op not in (
            "FIX_VARIABLES_BY_PATTERN", "UPDATE_CONSTRAINT_RHS_BY_PATTERN"):
        target = _map_token(target, state, known)
    # (b) coerce and canonicalize the scope index
    scope = patch.scope
    if scope is not None:
        scope = _map_key(coerce_key(scope), state, known)
    update = dict(patch.update)
    for field in _KEY_FIELDS:
        if update.get(field) is not None and not isinstance(update[field], bool):
            if isinstance(update[field], (str, int, list, tuple)):
                update[field] = list(_map_key(coerce_key(update[field]), state, known))
    out = replace(patch, target=target, scope=scope, update=update)
    # (c) canonical-form rewrites
    if out.op == "UPDATE_CONSTRAINT_RHS":
        out = _rewrite_rhs_to_parameter(out, state)
    return out


def normalize_action_set(actions: ActionSet, state: ModelState) -> ActionSet:
    known = _known_ids(state)
    return ActionSet(actions=tuple(
        normalize_patch(p, state, known) for p in actions.actions))
