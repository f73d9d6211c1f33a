"""Structured model state: parameters, families, objective, flat instances.

The mutable state is a versioned immutable value; every mutation returns a
new state while old versions stay readable.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Any, Mapping, Optional, Union

from ..errors import DuplicateName, MalformedKeys
from ..keys import IndexKey, coerce_key, homogeneous_arity

INF = math.inf

VAR_TYPES = ("binary", "integer", "continuous")
SENSES = ("<=", ">=", "=")


# -- value expressions ---------------------------------------------------------

@dataclass(frozen=True)
class Literal:
    value: float


@dataclass(frozen=True)
class ParamRef:
    """Parameter lookup, keyed explicitly or by projecting the context index.

    ``project`` lists positions of the context index (a variable index for
    terms, a row key for right-hand sides) that form the lookup key;
    ``None`` uses the whole context index. Scalar parameters ignore keys.
    """

    name: str
    key: Optional[IndexKey] = None
    project: Optional[tuple[int, ...]] = None


ValueExpr = Union[Literal, ParamRef]


# -- left-hand sides -----------------------------------------------------------

Term = tuple[str, IndexKey, ValueExpr]  # (var family, var index, coefficient)


@dataclass(frozen=True)
class ExplicitTerms:
    """Stored row-by-row terms; the only lhs kind pattern coefficient ops touch."""

    rows: Mapping[IndexKey, tuple[Term, ...]]


@dataclass(frozen=True)
class IndexedSum:
    """Sum over one variable family of the members matching the row key.

    A variable index ``i`` belongs to row ``r`` iff
    ``tuple(i[p] for p in var_positions) == r``.
    """

    var_family: str
    var_positions: tuple[int, ...]
    coeff: ValueExpr = Literal(1.0)


@dataclass(frozen=True)
class Semantic:
    """Domain-pack constraint; expanded by a registered kind at instantiation."""

    kind: str
    payload: Mapping[str, Any]


LhsSpec = Union[ExplicitTerms, IndexedSum, Semantic]


@dataclass(frozen=True)
class RhsSpec:
    """Per-row right-hand sides: ``overrides`` win, ``default`` covers the rest."""

    default: Optional[ValueExpr] = None
    overrides: Mapping[IndexKey, ValueExpr] = field(default_factory=dict)

    def at(self, row: IndexKey) -> ValueExpr:
        if row in self.overrides:
            return self.overrides[row]
        if self.default is None:
            raise KeyError(row)
        return self.default


# -- families ------------------------------------------------------------------

@dataclass(frozen=True)
class ParameterEntry:
    """Named model data: a scalar, a keyed map, or a list of index keys."""

    name: str
    value: Union[float, Mapping[IndexKey, float], tuple[IndexKey, ...]]
    description: str = ""
    tags: frozenset[str] = frozenset()

    def __post_init__(self):
        v = self.value
        if isinstance(v, Mapping) and not homogeneous_arity(v.keys()):
            raise MalformedKeys(f"parameter {self.name!r} has mixed key arity")

    @property
    def kind(self) -> str:
        if isinstance(self.value, Mapping):
            return "map"
        if isinstance(self.value, tuple):
            return "keys"
        return "scalar"


@dataclass(frozen=True)
class VariableFamily:
    name: str
    index_set: tuple[IndexKey, ...]
    var_type: str = "continuous"
    default_bounds: tuple[float, float] = (0.0, INF)
    bound_overrides: Mapping[IndexKey, tuple[float, float]] = field(default_factory=dict)
    description: str = ""
    tags: frozenset[str] = frozenset()

    def __post_init__(self):
        if self.var_type not in VAR_TYPES:
            raise ValueError(f"var_type must be one of {VAR_TYPES}, got {self.var_type!r}")
        index_set = set(self.index_set)
        for key in self.bound_overrides:
            if key not in index_set:
                raise ValueError(f"bound override {key} outside index set of {self.name!r}")
        for lo, hi in [self.default_bounds, *self.bound_overrides.values()]:
            if lo > hi:
                raise ValueError(f"inverted bounds ({lo}, {hi}) on {self.name!r}")
            if self.var_type == "binary" and not (0.0 <= lo and hi <= 1.0):
                raise ValueError(f"binary bounds outside [0,1] on {self.name!r}")

    def bounds(self, index: IndexKey) -> tuple[float, float]:
        return self.bound_overrides.get(index, self.default_bounds)


@dataclass(frozen=True)
class ConstraintFamily:
    name: str
    index_set: tuple[IndexKey, ...]
    lhs: LhsSpec
    sense: str
    rhs: RhsSpec
    description: str = ""
    tags: frozenset[str] = frozenset()

    def __post_init__(self):
        if self.sense not in SENSES:
            raise ValueError(f"sense must be one of {SENSES}, got {self.sense!r}")


@dataclass(frozen=True)
class ObjectiveComponent:
    name: str
    weight: float = 1.0
    terms: tuple[Term, ...] = ()
    description: str = ""
    tags: frozenset[str] = frozenset()


# -- the mutable state ----------------------------------------------------------

@dataclass(frozen=True)
class ModelState:
    """Versioned model state; minimization sense is fixed.

    Family and parameter names share one namespace so every patch target
    is unambiguous.
    """

    parameters: Mapping[str, ParameterEntry] = field(default_factory=dict)
    variable_families: Mapping[str, VariableFamily] = field(default_factory=dict)
    constraint_families: Mapping[str, ConstraintFamily] = field(default_factory=dict)
    objective_components: Mapping[str, ObjectiveComponent] = field(default_factory=dict)
    entity_registry: Mapping[str, str] = field(default_factory=dict)
    version: int = 0

    def names(self) -> set[str]:
        return (
            set(self.parameters)
            | set(self.variable_families)
            | set(self.constraint_families)
            | set(self.objective_components)
        )

    def namespace_of(self, name: str) -> Optional[str]:
        if name in self.parameters:
            return "parameter"
        if name in self.variable_families:
            return "variable_family"
        if name in self.constraint_families:
            return "constraint_family"
        if name in self.objective_components:
            return "objective_component"
        return None

    def _check_fresh(self, name: str):
        if name in self.names():
            raise DuplicateName(f"{name!r} already registered")

    def with_parameter(self, entry: ParameterEntry) -> "ModelState":
        self._check_fresh(entry.name)
        return replace(self, parameters={**self.parameters, entry.name: entry})

    def with_variable_family(self, fam: VariableFamily) -> "ModelState":
        self._check_fresh(fam.name)
        return replace(self, variable_families={**self.variable_families, fam.name: fam})

    def with_constraint_family(self, fam: ConstraintFamily) -> "ModelState":
        self._check_fresh(fam.name)
        return replace(self, constraint_families={**self.constraint_families, fam.name: fam})

    def with_objective_component(self, comp: ObjectiveComponent) -> "ModelState":
        self._check_fresh(comp.name)
        return replace(self, objective_components={**self.objective_components, comp.name: comp})

    def with_entity_labels(self, labels: Mapping[str, str]) -> "ModelState":
        return replace(self, entity_registry={**self.entity_registry, **labels})


def new_state() -> ModelState:
    """Empty minimization state at version 0."""
    return ModelState()


def register_parameter(state: ModelState, entry: ParameterEntry) -> ModelState:
    return state.with_parameter(entry)


def register_variable_family(state: ModelState, fam: VariableFamily) -> ModelState:
    return state.with_variable_family(fam)


def register_constraint_family(state: ModelState, fam: ConstraintFamily) -> ModelState:
    return state.with_constraint_family(fam)


def register_objective_component(state: ModelState, comp: ObjectiveComponent) -> ModelState:
    return state.with_objective_component(comp)


# -- flattened instance ----------------------------------------------------------

@dataclass(frozen=True)
class InstanceVar:
    key: str
    var_type: str
    lower: float
    upper: float
    objective: float


@dataclass(frozen=True)
class InstanceRow:
    key: str
    coeffs: tuple[tuple[int, float], ...]  # (variable position, coefficient), position-sorted
    sense: str
    rhs: float


@dataclass(frozen=True)
class Instance:
    """Concrete solvable LP/MIP with deterministic variable and row order."""

    variables: tuple[InstanceVar, ...]
    rows: tuple[InstanceRow, ...]

    def var_positions(self) -> dict[str, int]:
        return {v.key: i for i, v in enumerate(self.variables)}

    def with_bounds(self, overrides: Mapping[str, tuple[float, float]]) -> "Instance":
        """Copy with per-variable bound replacements (used by fix-and-release)."""
        out = []
        for v in self.variables:
            if v.key in overrides:
                lo, hi = overrides[v.key]
                out.append(replace(v, lower=lo, upper=hi))
            else:
                out.append(v)
        return Instance(variables=tuple(out), rows=self.rows)


def make_index_set(keys) -> tuple[IndexKey, ...]:
    """Coerce an iterable of raw indices into an ordered index set."""
    return tuple(coerce_key(k) for k in keys)
