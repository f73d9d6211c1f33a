"""State/scenario JSON serialization.

The document is self-describing with top-level keys ``parameters``,
``variable_families``, ``constraint_families``, ``objective_components``,
``entity_registry``, ``version``. Index keys are arrays of strings;
infinite bounds are ``null`` (the strings ``"inf"``/``"-inf"`` are accepted
on input).
"""

from __future__ import annotations

import json
import math
from typing import Any, Mapping

from ..errors import ParseError
from ..keys import key_from_doc, key_to_doc
from .types import (
    ConstraintFamily,
    ExplicitTerms,
    IndexedSum,
    Literal,
    ModelState,
    ObjectiveComponent,
    ParamRef,
    ParameterEntry,
    RhsSpec,
    Semantic,
    Term,
    ValueExpr,
    VariableFamily,
)

STATE_KEYS = (
    "parameters",
    "variable_families",
    "constraint_families",
    "objective_components",
    "entity_registry",
    "version",
)


# -- encoding -------------------------------------------------------------------


def _bound_to_doc(v: float):
    if math.isinf(v):
        return None if v > 0 else "-inf"
    return v


def _expr_to_doc(expr: ValueExpr):
    if isinstance(expr, Literal):
        return expr.value
    doc: dict[str, Any] = {"param": expr.name}
    if expr.key is not None:
        doc["key"] = key_to_doc(expr.key)
    if expr.project is not None:
        doc["project"] = list(expr.project)
    return doc


def _term_to_doc(term: Term):
    family, index, coeff = term
    return [family, key_to_doc(index), _expr_to_doc(coeff)]


def _lhs_to_doc(lhs):
    if isinstance(lhs, ExplicitTerms):
        return {
            "kind": "explicit_terms",
            "rows": [[key_to_doc(k), [_term_to_doc(t) for t in terms]]
                     for k, terms in lhs.rows.items()],
        }
    if isinstance(lhs, IndexedSum):
        return {
            "kind": "indexed_sum",
            "var_family": lhs.var_family,
            "var_positions": list(lhs.var_positions),
            "coeff": _expr_to_doc(lhs.coeff),
        }
    if isinstance(lhs, Semantic):
        return {"kind": lhs.kind, **{k: v for k, v in lhs.payload.items() if k != "kind"}}
    raise TypeError(f"unknown lhs spec {type(lhs).__name__}")


def _rhs_to_doc(rhs: RhsSpec):
    return {
        "default": None if rhs.default is None else _expr_to_doc(rhs.default),
        "overrides": [[key_to_doc(k), _expr_to_doc(v)] for k, v in rhs.overrides.items()],
    }


def _param_value_to_doc(entry: ParameterEntry):
    if entry.kind == "map":
        return {"map": [[key_to_doc(k), v] for k, v in entry.value.items()]}
    if entry.kind == "keys":
        return {"keys": [key_to_doc(k) for k in entry.value]}
    return entry.value


def parameter_to_doc(p: ParameterEntry) -> dict:
    return {
        "name": p.name,
        "value": _param_value_to_doc(p),
        "description": p.description,
        "tags": sorted(p.tags),
    }


def variable_family_to_doc(f: VariableFamily) -> dict:
    return {
        "name": f.name,
        "index_set": [key_to_doc(k) for k in f.index_set],
        "var_type": f.var_type,
        "default_bounds": [_bound_to_doc(f.default_bounds[0]),
                           _bound_to_doc(f.default_bounds[1])],
        "bound_overrides": [
            [key_to_doc(k), [_bound_to_doc(b[0]), _bound_to_doc(b[1])]]
            for k, b in f.bound_overrides.items()
        ],
        "description": f.description,
        "tags": sorted(f.tags),
    }


def constraint_family_to_doc(f: ConstraintFamily) -> dict:
    return {
        "name": f.name,
        "index_set": [key_to_doc(k) for k in f.index_set],
        "lhs": _lhs_to_doc(f.lhs),
        "sense": f.sense,
        "rhs": _rhs_to_doc(f.rhs),
        "description": f.description,
        "tags": sorted(f.tags),
    }


def objective_component_to_doc(c: ObjectiveComponent) -> dict:
    return {
        "name": c.name,
        "weight": c.weight,
        "terms": [_term_to_doc(t) for t in c.terms],
        "description": c.description,
        "tags": sorted(c.tags),
    }


def expr_to_doc(expr: ValueExpr):
    return _expr_to_doc(expr)


def bound_to_doc(v: float):
    return _bound_to_doc(v)


def bound_from_doc(v, where: str = "bounds") -> float:
    return _bound_from_doc(v, where)


def state_to_doc(state: ModelState) -> dict:
    return {
        "parameters": [parameter_to_doc(p) for p in state.parameters.values()],
        "variable_families": [
            variable_family_to_doc(f) for f in state.variable_families.values()
        ],
        "constraint_families": [
            constraint_family_to_doc(f) for f in state.constraint_families.values()
        ],
        "objective_components": [
            objective_component_to_doc(c) for c in state.objective_components.values()
        ],
        "entity_registry": dict(state.entity_registry),
        "version": state.version,
    }


def save_state(state: ModelState) -> str:
    return json.dumps(state_to_doc(state), indent=2) + "\n"


# -- decoding -------------------------------------------------------------------


def _get(doc: Mapping, key: str, where: str):
    if key not in doc:
        raise ParseError(f"missing required field {key!r}", where)
    return doc[key]


def _bound_from_doc(v, where: str) -> float:
    if v is None or v == "inf":
        return math.inf
    if v == "-inf":
        return -math.inf
    if isinstance(v, (int, float)):
        return float(v)
    raise ParseError(f"bad bound {v!r}", where)


def expr_from_doc(doc, where: str = "expr") -> ValueExpr:
    if isinstance(doc, (int, float)) and not isinstance(doc, bool):
        return Literal(float(doc))
    if isinstance(doc, Mapping):
        if "literal" in doc:
            return Literal(float(doc["literal"]))
        if "param" in doc:
            key = key_from_doc(doc["key"]) if doc.get("key") is not None else None
            project = tuple(int(p) for p in doc["project"]) if doc.get("project") is not None else None
            return ParamRef(str(doc["param"]), key=key, project=project)
    raise ParseError(f"bad value expression {doc!r}", where)


def _term_from_doc(doc, where: str) -> Term:
    if not isinstance(doc, (list, tuple)) or len(doc) != 3:
        raise ParseError(f"term must be [family, index, coeff], got {doc!r}", where)
    return str(doc[0]), key_from_doc(doc[1]), expr_from_doc(doc[2], where)


def lhs_from_doc(doc, where: str):
    if not isinstance(doc, Mapping):
        raise ParseError("lhs must be an object", where)
    kind = str(_get(doc, "kind", where))
    if kind in ("explicit_terms", "materialized_linear"):
        rows = {}
        for pair in doc.get("rows", []):
            rows[key_from_doc(pair[0])] = tuple(
                _term_from_doc(t, where) for t in pair[1])
        return ExplicitTerms(rows=rows)
    if kind == "indexed_sum":
        return IndexedSum(
            var_family=str(_get(doc, "var_family", where)),
            var_positions=tuple(int(p) for p in _get(doc, "var_positions", where)),
            coeff=expr_from_doc(doc.get("coeff", 1.0), where),
        )
    if kind == "semantic":
        return Semantic(kind=str(_get(doc, "semantic_kind", where)),
                        payload=dict(doc.get("payload", {})))
    # any other kind names a registered semantic expander directly
    return Semantic(kind=kind, payload={k: v for k, v in doc.items() if k != "kind"})


def rhs_from_doc(doc, where: str) -> RhsSpec:
    if isinstance(doc, (int, float)) and not isinstance(doc, bool):
        return RhsSpec(default=Literal(float(doc)))
    if not isinstance(doc, Mapping):
        raise ParseError("rhs must be a number or an object", where)
    if "param" in doc or "literal" in doc:
        return RhsSpec(default=expr_from_doc(doc, where))
    default = doc.get("default")
    overrides = {}
    for pair in doc.get("overrides", []):
        overrides[key_from_doc(pair[0])] = expr_from_doc(pair[1], where)
    return RhsSpec(
        default=None if default is None else expr_from_doc(default, where),
        overrides=overrides,
    )


def parameter_from_doc(doc, where: str = "parameters") -> ParameterEntry:
    name = str(_get(doc, "name", where))
    raw = _get(doc, "value", f"{where}.{name}")
    if isinstance(raw, Mapping) and "map" in raw:
        value: Any = {key_from_doc(k): float(v) for k, v in raw["map"]}
    elif isinstance(raw, Mapping) and "keys" in raw:
        value = tuple(key_from_doc(k) for k in raw["keys"])
    elif isinstance(raw, (int, float)) and not isinstance(raw, bool):
        value = float(raw)
    else:
        raise ParseError(f"bad parameter value {raw!r}", f"{where}.{name}")
    return ParameterEntry(
        name=name,
        value=value,
        description=str(doc.get("description", "")),
        tags=frozenset(doc.get("tags", ())),
    )


def variable_family_from_doc(doc, where: str = "variable_families") -> VariableFamily:
    name = str(_get(doc, "name", where))
    where = f"{where}.{name}"
    lo, hi = doc.get("default_bounds", [0.0, None])
    overrides = {}
    for pair in doc.get("bound_overrides", []):
        overrides[key_from_doc(pair[0])] = (
            _bound_from_doc(pair[1][0], where), _bound_from_doc(pair[1][1], where))
    return VariableFamily(
        name=name,
        index_set=tuple(key_from_doc(k) for k in _get(doc, "index_set", where)),
        var_type=str(doc.get("var_type", "continuous")),
        default_bounds=(_bound_from_doc(lo, where), _bound_from_doc(hi, where)),
        bound_overrides=overrides,
        description=str(doc.get("description", "")),
        tags=frozenset(doc.get("tags", ())),
    )


def constraint_family_from_doc(doc, where: str = "constraint_families") -> ConstraintFamily:
    name = str(_get(doc, "name", where))
    where = f"{where}.{name}"
    return ConstraintFamily(
        name=name,
        index_set=tuple(key_from_doc(k) for k in doc.get("index_set", [])),
        lhs=lhs_from_doc(_get(doc, "lhs", where), where),
        sense=str(_get(doc, "sense", where)),
        rhs=rhs_from_doc(_get(doc, "rhs", where), where),
        description=str(doc.get("description", "")),
        tags=frozenset(doc.get("tags", ())),
    )


def objective_component_from_doc(doc, where: str = "objective_components") -> ObjectiveComponent:
    name = str(_get(doc, "name", where))
    where = f"{where}.{name}"
    return ObjectiveComponent(
        name=name,
        weight=float(doc.get("weight", 1.0)),
        terms=tuple(_term_from_doc(t, where) for t in doc.get("terms", [])),
        description=str(doc.get("description", "")),
        tags=frozenset(doc.get("tags", ())),
    )


def state_from_doc(doc: Mapping) -> ModelState:
    if not isinstance(doc, Mapping):
        raise ParseError("state document must be a JSON object", "$")
    for key in STATE_KEYS:
        if key not in doc:
            raise ParseError(f"missing required field {key!r}", "$")
    state = ModelState(version=int(doc["version"]))
    for pdoc in doc["parameters"]:
        state = state.with_parameter(parameter_from_doc(pdoc))
    for fdoc in doc["variable_families"]:
        state = state.with_variable_family(variable_family_from_doc(fdoc))
    for cdoc in doc["constraint_families"]:
        state = state.with_constraint_family(constraint_family_from_doc(cdoc))
    for odoc in doc["objective_components"]:
        state = state.with_objective_component(objective_component_from_doc(odoc))
    registry = doc["entity_registry"]
    if not isinstance(registry, Mapping):
        raise ParseError("entity_registry must be an object", "entity_registry")
    return state.with_entity_labels({str(k): str(v) for k, v in registry.items()})


def load_state(document) -> ModelState:
    if isinstance(document, (str, bytes)):
        try:
            doc = json.loads(document)
        except json.JSONDecodeError as exc:
            raise ParseError(f"invalid JSON: {exc.msg}", f"line {exc.lineno}") from exc
    else:
        doc = document
    return state_from_doc(doc)
