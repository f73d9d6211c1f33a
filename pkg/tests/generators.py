"""Seeded random instance and state generators for property suites."""

from __future__ import annotations

import random

from reopt.model.types import (
    ConstraintFamily,
    ExplicitTerms,
    IndexedSum,
    Instance,
    InstanceRow,
    InstanceVar,
    Literal,
    ObjectiveComponent,
    ParamRef,
    ParameterEntry,
    RhsSpec,
    VariableFamily,
    new_state,
)

SENSES = ("<=", ">=", "=")


def random_lp_instance(rng: random.Random, max_vars: int = 6, max_rows: int = 4) -> Instance:
    n = rng.randint(1, max_vars)
    m = rng.randint(1, max_rows)
    variables = []
    for j in range(n):
        upper = float(rng.randint(1, 10))
        variables.append(InstanceVar(
            key=f"x({j})", var_type="continuous", lower=0.0, upper=upper,
            objective=float(rng.randint(-9, 9))))
    rows = []
    for i in range(m):
        coeffs = [(j, float(rng.randint(-5, 5))) for j in range(n) if rng.random() < 0.8]
        coeffs = [(j, c) for j, c in coeffs if c != 0.0] or [(rng.randrange(n), 1.0)]
        sense = rng.choices(SENSES, weights=(5, 3, 1))[0]
        rhs = float(rng.randint(-10, 25))
        rows.append(InstanceRow(key=f"r({i})", coeffs=tuple(coeffs), sense=sense, rhs=rhs))
    return Instance(variables=tuple(variables), rows=tuple(rows))


def random_binary_instance(rng: random.Random, max_vars: int = 12,
                           max_rows: int = 6) -> Instance:
    n = rng.randint(1, max_vars)
    m = rng.randint(1, max_rows)
    variables = tuple(
        InstanceVar(key=f"b({j})", var_type="binary", lower=0.0, upper=1.0,
                    objective=float(rng.randint(-9, 9)))
        for j in range(n))
    rows = []
    for i in range(m):
        coeffs = [(j, float(rng.randint(-4, 4))) for j in range(n) if rng.random() < 0.7]
        coeffs = [(j, c) for j, c in coeffs if c != 0.0] or [(rng.randrange(n), 1.0)]
        sense = rng.choices(SENSES, weights=(6, 3, 1))[0]
        total = sum(c for _, c in coeffs)
        rhs = float(rng.randint(min(-4, int(total) - 4), max(4, int(total) + 2)))
        rows.append(InstanceRow(key=f"r({i})", coeffs=tuple(coeffs), sense=sense, rhs=rhs))
    return Instance(variables=tuple(variables), rows=rows and tuple(rows))


def random_model_state(rng: random.Random):
    """Small random structured state over dyadic data (exact float sums)."""
    n_items = rng.randint(2, 4)
    n_bins = rng.randint(2, 3)
    items = [f"i{k}" for k in range(n_items)]
    bins = [f"g{k}" for k in range(n_bins)]
    state = new_state()
    state = state.with_parameter(ParameterEntry(
        "weight", {(i,): float(rng.randint(1, 9)) for i in items}, "item weight"))
    state = state.with_parameter(ParameterEntry(
        "cap", {(g,): float(rng.randint(5, 20)) for g in bins}, "bin capacity"))
    state = state.with_parameter(ParameterEntry(
        "price", {(i, g): float(rng.randint(1, 12)) for i in items for g in bins},
        "placement price"))
    index = tuple((i, g) for i in items for g in bins)
    state = state.with_variable_family(VariableFamily(
        "place", index, rng.choice(("continuous", "binary")),
        (0.0, 1.0), {}, "item-to-bin placement"))
    state = state.with_constraint_family(ConstraintFamily(
        "one_bin", tuple((i,) for i in items), IndexedSum("place", (0,)),
        rng.choice(("<=", "=")), RhsSpec(default=Literal(1.0)), "placement count"))
    state = state.with_constraint_family(ConstraintFamily(
        "bin_cap", tuple((g,) for g in bins),
        IndexedSum("place", (1,), coeff=ParamRef("weight", project=(0,))),
        "<=", RhsSpec(default=ParamRef("cap")), "capacity"))
    if rng.random() < 0.5:
        rows = {(i,): (("place", (i, bins[0]), Literal(float(rng.randint(1, 3)))),)
                for i in items}
        state = state.with_constraint_family(ConstraintFamily(
            "extra", tuple((i,) for i in items), ExplicitTerms(rows=rows),
            "<=", RhsSpec(default=Literal(float(rng.randint(2, 8)))), "side constraint"))
    state = state.with_objective_component(ObjectiveComponent(
        "cost", 1.0, tuple(("place", key, ParamRef("price")) for key in index),
        "total placement price"))
    return state.with_entity_labels({f"Item {k}": items[k] for k in range(n_items)})
