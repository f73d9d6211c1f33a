"""Path-level state diffs and their replay.

States are flattened to a canonical nested form whose leaf paths read
naturally in audit views (``parameters.supply.P1``). Whole families
added or removed collapse into a single entry carrying the family
document. Replaying a diff onto the before-state reproduces the
after-state.
"""

from __future__ import annotations

import copy
from typing import Any, Mapping

from ..keys import IndexKey, flat_key, split_flat_key
from ..model.io import (
    bound_from_doc,
    bound_to_doc,
    constraint_family_from_doc,
    constraint_family_to_doc,
    expr_from_doc,
    expr_to_doc,
    lhs_from_doc,
    objective_component_from_doc,
    objective_component_to_doc,
    parameter_from_doc,
    parameter_to_doc,
    variable_family_from_doc,
    variable_family_to_doc,
)
from ..model.types import (
    ConstraintFamily,
    ModelState,
    ObjectiveComponent,
    ParameterEntry,
    RhsSpec,
    VariableFamily,
)
from .types import DiffEntry, StateDiff

_SECTIONS = ("parameters", "variable_families", "constraint_families", "objective_components")

_TO_DOC = {
    "parameters": parameter_to_doc,
    "variable_families": variable_family_to_doc,
    "constraint_families": constraint_family_to_doc,
    "objective_components": objective_component_to_doc,
}

_FROM_DOC = {
    "parameters": parameter_from_doc,
    "variable_families": variable_family_from_doc,
    "constraint_families": constraint_family_from_doc,
    "objective_components": objective_component_from_doc,
}


def _join(key: IndexKey) -> str:
    return ",".join(key)


def _split(joined: str) -> IndexKey:
    return tuple(joined.split(",")) if joined else ()


# -- canonical nested form -------------------------------------------------------


def _param_canon(p: ParameterEntry) -> dict:
    out: dict[str, Any] = {"@description": p.description, "@tags": sorted(p.tags)}
    if p.kind == "scalar":
        out["@value"] = p.value
    elif p.kind == "keys":
        out["@keys"] = [_join(k) for k in p.value]
    else:
        for k, v in p.value.items():
            out[_join(k)] = v
    return out


def _varfam_canon(f: VariableFamily) -> dict:
    return {
        "@index_set": [_join(k) for k in f.index_set],
        "@var_type": f.var_type,
        "@default_bounds": [bound_to_doc(f.default_bounds[0]), bound_to_doc(f.default_bounds[1])],
        "@description": f.description,
        "@tags": sorted(f.tags),
        "bounds": {_join(k): [bound_to_doc(b[0]), bound_to_doc(b[1])]
                   for k, b in f.bound_overrides.items()},
    }


def _confam_canon(f: ConstraintFamily) -> dict:
    doc = constraint_family_to_doc(f)
    return {
        "@index_set": [_join(k) for k in f.index_set],
        "@sense": f.sense,
        "@lhs": doc["lhs"],
        "@rhs_default": doc["rhs"]["default"],
        "@description": f.description,
        "@tags": sorted(f.tags),
        "rhs": {_join(k): expr_to_doc(v) for k, v in f.rhs.overrides.items()},
    }


def _objcomp_canon(c: ObjectiveComponent) -> dict:
    terms: dict[str, Any] = {}
    for fam, idx, coeff in c.terms:
        key = flat_key(fam, idx)
        while key in terms:  # duplicate terms are legal; keep both addressable
            key += "#"
        terms[key] = expr_to_doc(coeff)
    return {
        "@weight": c.weight,
        "@description": c.description,
        "@tags": sorted(c.tags),
        "terms": terms,
    }


def state_canon(state: ModelState) -> dict:
    return {
        "version": state.version,
        "entity_registry": dict(state.entity_registry),
        "parameters": {p.name: _param_canon(p) for p in state.parameters.values()},
        "variable_families": {f.name: _varfam_canon(f) for f in state.variable_families.values()},
        "constraint_families": {f.name: _confam_canon(f) for f in state.constraint_families.values()},
        "objective_components": {c.name: _objcomp_canon(c) for c in state.objective_components.values()},
    }


def _canon_to_state(canon: Mapping) -> ModelState:
    state = ModelState(version=int(canon["version"]))
    for name, body in canon["parameters"].items():
        if "@value" in body:
            value: Any = float(body["@value"])
        elif "@keys" in body:
            value = tuple(_split(k) for k in body["@keys"])
        else:
            value = {_split(k): float(v) for k, v in body.items() if not k.startswith("@")}
        state = state.with_parameter(ParameterEntry(
            name, value, body.get("@description", ""), frozenset(body.get("@tags", ()))))
    for name, body in canon["variable_families"].items():
        state = state.with_variable_family(VariableFamily(
            name=name,
            index_set=tuple(_split(k) for k in body["@index_set"]),
            var_type=body["@var_type"],
            default_bounds=(bound_from_doc(body["@default_bounds"][0]),
                            bound_from_doc(body["@default_bounds"][1])),
            bound_overrides={
                _split(k): (bound_from_doc(b[0]), bound_from_doc(b[1]))
                for k, b in body.get("bounds", {}).items()
            },
            description=body.get("@description", ""),
            tags=frozenset(body.get("@tags", ())),
        ))
    for name, body in canon["constraint_families"].items():
        default = body.get("@rhs_default")
        state = state.with_constraint_family(ConstraintFamily(
            name=name,
            index_set=tuple(_split(k) for k in body["@index_set"]),
            lhs=lhs_from_doc(body["@lhs"], name),
            sense=body["@sense"],
            rhs=RhsSpec(
                default=None if default is None else expr_from_doc(default, name),
                overrides={_split(k): expr_from_doc(v, name)
                           for k, v in body.get("rhs", {}).items()},
            ),
            description=body.get("@description", ""),
            tags=frozenset(body.get("@tags", ())),
        ))
    for name, body in canon["objective_components"].items():
        terms = []
        for key, coeff in body.get("terms", {}).items():
            fam, idx = split_flat_key(key.rstrip("#"))
            terms.append((fam, idx, expr_from_doc(coeff, name)))
        state = state.with_objective_component(ObjectiveComponent(
            name=name,
            weight=float(body["@weight"]),
            terms=tuple(terms),
            description=body.get("@description", ""),
            tags=frozenset(body.get("@tags", ())),
        ))
    return state.with_entity_labels(dict(canon["entity_registry"]))


# -- diff / replay ----------------------------------------------------------------


def _leaf_diff(path: tuple[str, ...], before: Mapping, after: Mapping,
               entries: list[DiffEntry]):
    for key in [*before, *(k for k in after if k not in before)]:
        b, a = before.get(key), after.get(key)
        if isinstance(b, Mapping) or isinstance(a, Mapping):
            _leaf_diff(path + (key,), b or {}, a or {}, entries)
        elif b != a:
            entries.append(DiffEntry(path + (key,), b, a))


def diff_states(before: ModelState, after: ModelState) -> StateDiff:
    cb, ca = state_canon(before), state_canon(after)
    entries: list[DiffEntry] = []
    if cb["version"] != ca["version"]:
        entries.append(DiffEntry(("version",), cb["version"], ca["version"]))
    _leaf_diff(("entity_registry",), cb["entity_registry"], ca["entity_registry"], entries)
    for section in _SECTIONS:
        b, a = cb[section], ca[section]
        for name in [*b, *(n for n in a if n not in b)]:
            if name not in a:
                entries.append(DiffEntry(
                    (section, name),
                    _TO_DOC[section](_section_of(before, section)[name]), None))
            elif name not in b:
                entries.append(DiffEntry(
                    (section, name), None,
                    _TO_DOC[section](_section_of(after, section)[name])))
            else:
                _leaf_diff((section, name), b[name], a[name], entries)
    return StateDiff(entries=tuple(entries))


def _section_of(state: ModelState, section: str) -> Mapping:
    return getattr(state, section)


def replay_diff(before: ModelState, diff: StateDiff) -> ModelState:
    """Apply diff entries onto the before-state, reproducing the after-state."""
    canon = copy.deepcopy(state_canon(before))
    for entry in diff:
        path = entry.path
        if path == ("version",):
            canon["version"] = entry.after
            continue
        if len(path) == 2 and path[0] in _SECTIONS:
            section, name = path
            if entry.after is None:
                canon[section].pop(name, None)
            else:
                obj = _FROM_DOC[section](_plain(entry.after))
                canon[section][name] = {
                    "parameters": _param_canon,
                    "variable_families": _varfam_canon,
                    "constraint_families": _confam_canon,
                    "objective_components": _objcomp_canon,
                }[section](obj)
            continue
        node = canon
        for seg in path[:-1]:
            node = node.setdefault(seg, {})
        if entry.after is None:
            node.pop(path[-1], None)
        else:
            node[path[-1]] = _plain(entry.after)
    return _canon_to_state(canon)


def _plain(value):
    if isinstance(value, Mapping):
        return {k: _plain(v) for k, v in value.items()}
    if isinstance(value, tuple):
        return [_plain(v) for v in value]
    return value
