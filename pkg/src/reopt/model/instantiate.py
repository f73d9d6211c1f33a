"""Flatten a ModelState into a concrete Instance.

Pure and deterministic: families appear in registration order, indices in
index-set order, so two calls on the same state yield identical instances.
"""

from __future__ import annotations

import math
from typing import Mapping

from ..errors import UnresolvedReference
from ..keys import IndexKey, flat_key
from .semantics import expand_semantic
from .types import (
    ExplicitTerms,
    IndexedSum,
    Instance,
    InstanceRow,
    InstanceVar,
    Literal,
    ModelState,
    Semantic,
    Term,
    ValueExpr,
)


def resolve_value(expr: ValueExpr, state: ModelState, context: IndexKey) -> float:
    """Resolve a coefficient/rhs expression against the parameter store.

    ParamRef keys default to a projection of the context index (the term's
    variable index, or the row key for right-hand sides).
    """
    if isinstance(expr, Literal):
        return float(expr.value)
    entry = state.parameters.get(expr.name)
    if entry is None:
        raise UnresolvedReference(f"parameter {expr.name!r} is not registered")
    if isinstance(entry.value, (int, float)):
        return float(entry.value)
    if not isinstance(entry.value, Mapping):
        raise UnresolvedReference(f"parameter {expr.name!r} is not numeric")
    if expr.key is not None:
        key = expr.key
    elif expr.project is not None:
        try:
            key = tuple(context[p] for p in expr.project)
        except IndexError:
            raise UnresolvedReference(
                f"projection {expr.project} does not fit index {context}") from None
    else:
        key = context
    if key not in entry.value:
        raise UnresolvedReference(f"parameter {expr.name!r} has no key {key}")
    return float(entry.value[key])


def _check_finite(value: float, what: str) -> float:
    if not math.isfinite(value):
        raise UnresolvedReference(f"{what} resolved to non-finite value {value}")
    return value


def instantiate(state: ModelState) -> Instance:
    variables: list[InstanceVar] = []
    positions: dict[str, int] = {}
    objective: dict[str, float] = {}

    for fam in state.variable_families.values():
        for index in fam.index_set:
            key = flat_key(fam.name, index)
            positions[key] = len(variables)
            lo, hi = fam.bounds(index)
            variables.append(InstanceVar(key, fam.var_type, lo, hi, 0.0))

    for comp in state.objective_components.values():
        for term in comp.terms:
            key = _term_key(term, state)
            coeff = _check_finite(
                resolve_value(term[2], state, term[1]),
                f"objective term {key} in {comp.name!r}")
            objective[key] = objective.get(key, 0.0) + comp.weight * coeff

    variables = [
        InstanceVar(v.key, v.var_type, v.lower, v.upper, objective.get(v.key, 0.0))
        for v in variables
    ]

    rows: list[InstanceRow] = []
    for cfam in state.constraint_families.values():
        lhs = cfam.lhs
        if isinstance(lhs, Semantic):
            for row_key, terms, sense, rhs in expand_semantic(cfam, state, lhs.kind, lhs.payload):
                rows.append(_build_row(cfam.name, row_key, terms, sense, rhs, positions, state))
            continue
        for row_key in cfam.index_set:
            if isinstance(lhs, ExplicitTerms):
                terms = lhs.rows.get(row_key, ())
            elif isinstance(lhs, IndexedSum):
                terms = _indexed_sum_terms(lhs, row_key, state)
            else:  # pragma: no cover - exhaustive over LhsSpec
                raise TypeError(f"unknown lhs spec {type(lhs).__name__}")
            try:
                rhs_expr = cfam.rhs.at(row_key)
            except KeyError:
                raise UnresolvedReference(
                    f"constraint {cfam.name!r} has no rhs for row {row_key}") from None
            rhs = _check_finite(
                resolve_value(rhs_expr, state, row_key), f"rhs of {cfam.name}{row_key}")
            rows.append(_build_row(cfam.name, row_key, terms, cfam.sense, rhs, positions, state))

    return Instance(variables=tuple(variables), rows=tuple(rows))


def _term_key(term: Term, state: ModelState) -> str:
    family, index, _ = term
    fam = state.variable_families.get(family)
    if fam is None:
        raise UnresolvedReference(f"variable family {family!r} is not registered")
    if index not in set(fam.index_set):
        raise UnresolvedReference(f"{family!r} has no index {index}")
    return flat_key(family, index)


def _indexed_sum_terms(lhs: IndexedSum, row_key: IndexKey, state: ModelState) -> tuple[Term, ...]:
    fam = state.variable_families.get(lhs.var_family)
    if fam is None:
        raise UnresolvedReference(f"variable family {lhs.var_family!r} is not registered")
    terms = []
    for index in fam.index_set:
        try:
            projected = tuple(index[p] for p in lhs.var_positions)
        except IndexError:
            raise UnresolvedReference(
                f"positions {lhs.var_positions} do not fit index {index}") from None
        if projected == row_key:
            terms.append((lhs.var_family, index, lhs.coeff))
    return tuple(terms)


def _build_row(family_name: str, row_key: IndexKey, terms, sense: str, rhs: float,
               positions: dict[str, int], state: ModelState) -> InstanceRow:
    coeffs: dict[int, float] = {}
    for term in terms:
        key = _term_key(term, state)
        value = _check_finite(
            resolve_value(term[2], state, term[1]), f"coefficient of {key} in {family_name!r}")
        pos = positions[key]
        coeffs[pos] = coeffs.get(pos, 0.0) + value
    return InstanceRow(
        key=flat_key(family_name, row_key),
        coeffs=tuple(sorted(coeffs.items())),
        sense=sense,
        rhs=_check_finite(rhs, f"rhs of {family_name}{row_key}"),
    )
