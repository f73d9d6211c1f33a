"""Patch, action set, planner output, and state diff types."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Mapping, Optional

from ..errors import UnknownOp
from ..ops import PATCH_OPS

INTENTIONS = ("tighten", "relax", "forbid", "prioritize", "update")

PATCH_KEYS = {"op", "target", "scope", "update", "notes"}


def _freeze(value):
    if isinstance(value, dict):
        return {k: _freeze(v) for k, v in value.items()}
    if isinstance(value, list):
        return tuple(_freeze(v) for v in value)
    return value


def _thaw(value):
    if isinstance(value, dict):
        return {k: _thaw(v) for k, v in value.items()}
    if isinstance(value, tuple):
        return [_thaw(v) for v in value]
    return value


@dataclass(frozen=True)
class Patch:
    """One structured model edit.

    ``target`` is a name in the shared namespace, or a pattern spec for
    the pattern ops (a regex string, or ``{"vars": ..., "rows": ...}``
    for UPDATE_COEFFICIENT). ``scope`` selects an index/row key where the
    op needs one. ``update`` is the op-specific payload.
    """

    op: str
    target: Any = None
    scope: Any = None
    update: Mapping[str, Any] = field(default_factory=dict)
    notes: str = ""

    def __post_init__(self):
        if self.op not in PATCH_OPS:
            raise UnknownOp(self.op)
        object.__setattr__(self, "update", _freeze(dict(self.update)))
        if isinstance(self.scope, list):
            object.__setattr__(self, "scope", tuple(str(v) for v in self.scope))
        if isinstance(self.target, dict):
            object.__setattr__(self, "target", _freeze(self.target))

    def to_doc(self) -> dict:
        doc = {
            "op": self.op,
            "target": _thaw(self.target) if isinstance(self.target, (dict, tuple)) else self.target,
            "scope": list(self.scope) if isinstance(self.scope, tuple) else self.scope,
            "update": _thaw(dict(self.update)),
        }
        if self.notes:
            doc["notes"] = self.notes
        return doc

    @staticmethod
    def from_doc(doc: Mapping) -> "Patch":
        if not isinstance(doc, Mapping):
            raise TypeError(f"patch must be an object, got {doc!r}")
        if "op" not in doc:
            raise UnknownOp("<missing>")
        return Patch(
            op=str(doc["op"]),
            target=doc.get("target"),
            scope=doc.get("scope"),
            update=dict(doc.get("update") or {}),
            notes=str(doc.get("notes") or ""),
        )


@dataclass(frozen=True)
class ActionSet:
    """An ordered patch group applied atomically."""

    actions: tuple[Patch, ...] = ()

    def to_doc(self) -> dict:
        return {"actions": [p.to_doc() for p in self.actions]}

    @staticmethod
    def from_doc(doc) -> "ActionSet":
        if isinstance(doc, Mapping):
            items = doc.get("actions", [])
        else:
            items = doc
        return ActionSet(actions=tuple(Patch.from_doc(p) for p in items))


@dataclass(frozen=True)
class PlannerOutput:
    edit_summary: str
    candidate_action_sets: tuple[ActionSet, ...] = ()
    affected_sets: Mapping[str, tuple[str, ...]] = field(default_factory=dict)
    relevant_components: tuple[str, ...] = ()
    planning_hints: Mapping[str, str] = field(default_factory=dict)
    intention: Optional[str] = None

    def to_doc(self) -> dict:
        return {
            "edit_summary": self.edit_summary,
            "affected_sets": {k: list(v) for k, v in self.affected_sets.items()},
            "relevant_components": list(self.relevant_components),
            "candidate_action_sets": [a.to_doc() for a in self.candidate_action_sets],
            "planning_hints": dict(self.planning_hints),
            "intention": self.intention,
        }


@dataclass(frozen=True)
class DiffEntry:
    path: tuple[str, ...]
    before: Any
    after: Any

    @property
    def display_path(self) -> str:
        return ".".join(self.path)

    def to_doc(self) -> dict:
        return {"path": list(self.path), "before": _thaw(self.before),
                "after": _thaw(self.after)}

    @staticmethod
    def from_doc(doc: Mapping) -> "DiffEntry":
        return DiffEntry(tuple(doc["path"]), _freeze(doc["before"]), _freeze(doc["after"]))


@dataclass(frozen=True)
class StateDiff:
    entries: tuple[DiffEntry, ...] = ()

    def __len__(self):
        return len(self.entries)

    def __iter__(self):
        return iter(self.entries)

    def to_doc(self) -> list:
        return [e.to_doc() for e in self.entries]

    @staticmethod
    def from_doc(doc) -> "StateDiff":
        return StateDiff(entries=tuple(DiffEntry.from_doc(e) for e in doc))
