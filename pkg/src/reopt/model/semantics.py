"""Registry of semantic constraint kinds.

A semantic family stores only ``(kind, payload)``; a registered expander
turns it into fully explicit rows at instantiation time. Two exam-domain
kinds ship built in: pinning a virtual block to a reserved slot, and
capping total enrollment across a set of slots.
"""

from __future__ import annotations

from typing import Any, Callable, Mapping

from ..errors import UnregisteredSemanticKind, UnresolvedReference
from ..keys import IndexKey, coerce_key
from .types import ConstraintFamily, Literal, ModelState, Term

# (row key, terms, sense, rhs value)
ExpandedRow = tuple[IndexKey, tuple[Term, ...], str, float]

_REGISTRY: dict[str, Callable[[ConstraintFamily, ModelState], list[ExpandedRow]]] = {}


def register_semantic_kind(kind: str, expander) -> None:
    _REGISTRY[kind] = expander


def expand_semantic(family: ConstraintFamily, state: ModelState, kind: str,
                    payload: Mapping[str, Any]) -> list[ExpandedRow]:
    if kind not in _REGISTRY:
        raise UnregisteredSemanticKind(f"semantic kind {kind!r} is not registered")
    return _REGISTRY[kind](family, state)


def registered_kinds() -> tuple[str, ...]:
    return tuple(sorted(_REGISTRY))


def _payload(family: ConstraintFamily) -> Mapping[str, Any]:
    return family.lhs.payload  # type: ignore[union-attr]


def _expand_reserved_virtual_slot(family: ConstraintFamily, state: ModelState) -> list[ExpandedRow]:
    """Pin one (virtual) block to one slot: x[block, slot] = 1."""
    p = _payload(family)
    var_family = p.get("var_family", "assign")
    block = str(p["block"])
    slot = str(p["slot"])
    index = (block, slot)
    fam = state.variable_families.get(var_family)
    if fam is None or index not in set(fam.index_set):
        raise UnresolvedReference(
            f"reserved_virtual_slot in {family.name!r}: no variable {var_family}{index}")
    term: Term = (var_family, index, Literal(1.0))
    return [(index, (term,), "=", 1.0)]


def _expand_slot_load_cap(family: ConstraintFamily, state: ModelState) -> list[ExpandedRow]:
    """Cap enrollment-weighted assignments over a slot subset: sum e[b]*x[b,s] <= cap."""
    p = _payload(family)
    var_family = p.get("var_family", "assign")
    enrollment = p.get("enrollment_param", "block_enrollment")
    slots = {str(s) for s in p["slots"]}
    row_key = coerce_key(p.get("row_id", family.name))
    cap = float(p["cap"])
    fam = state.variable_families.get(var_family)
    if fam is None:
        raise UnresolvedReference(f"slot_load_cap in {family.name!r}: no family {var_family!r}")
    entry = state.parameters.get(enrollment)
    if entry is None or not isinstance(entry.value, Mapping):
        raise UnresolvedReference(
            f"slot_load_cap in {family.name!r}: no keyed parameter {enrollment!r}")
    terms: list[Term] = []
    for index in fam.index_set:
        if len(index) != 2 or index[1] not in slots:
            continue
        weight = entry.value.get((index[0],))
        if weight is None:
            raise UnresolvedReference(
                f"slot_load_cap in {family.name!r}: {enrollment}[{index[0]}] missing")
        terms.append((var_family, index, Literal(float(weight))))
    return [(row_key, tuple(terms), "<=", cap)]


register_semantic_kind("reserved_virtual_slot", _expand_reserved_virtual_slot)
register_semantic_kind("slot_load_cap", _expand_slot_load_cap)
