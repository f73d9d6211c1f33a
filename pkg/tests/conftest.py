"""Shared fixtures: the toy transportation scenario and builders."""

from __future__ import annotations

import importlib.resources
import json
import math

import pytest

from reopt.model import (
    ConstraintFamily,
    IndexedSum,
    ObjectiveComponent,
    ParamRef,
    ParameterEntry,
    RhsSpec,
    VariableFamily,
    load_state,
    make_index_set,
    new_state,
    register_constraint_family,
    register_objective_component,
    register_parameter,
    register_variable_family,
)

PLANTS = ["P1", "P2"]
CUSTOMERS = ["C1", "C2", "C3"]
COSTS = {
    ("P1", "C1"): 4.0, ("P1", "C2"): 6.0, ("P1", "C3"): 8.0,
    ("P2", "C1"): 5.0, ("P2", "C2"): 4.0, ("P2", "C3"): 3.0,
}


def build_toy_state():
    s = new_state()
    s = register_parameter(s, ParameterEntry(
        "supply", {("P1",): 20.0, ("P2",): 45.0},
        "available supply at each plant", frozenset({"capacity"})))
    s = register_parameter(s, ParameterEntry(
        "demand", {("C1",): 12.0, ("C2",): 15.0, ("C3",): 18.0},
        "quantity each customer requires", frozenset({"demand"})))
    s = register_parameter(s, ParameterEntry(
        "costs", dict(COSTS), "unit transportation cost per route", frozenset({"cost"})))
    routes = make_index_set([(p, c) for p in PLANTS for c in CUSTOMERS])
    s = register_variable_family(s, VariableFamily(
        "flows", routes, "continuous", (0.0, math.inf), {},
        "quantity shipped from a plant to a customer"))
    s = register_constraint_family(s, ConstraintFamily(
        "supply_constraints", make_index_set(PLANTS), IndexedSum("flows", (0,)),
        "<=", RhsSpec(default=ParamRef("supply")), "plant capacity"))
    s = register_constraint_family(s, ConstraintFamily(
        "demand_constraints", make_index_set(CUSTOMERS), IndexedSum("flows", (1,)),
        ">=", RhsSpec(default=ParamRef("demand")), "demand coverage"))
    s = register_objective_component(s, ObjectiveComponent(
        "transport_cost", 1.0,
        tuple(("flows", key, ParamRef("costs")) for key in routes),
        "total transportation cost"))
    return s.with_entity_labels({
        "Plant 1": "P1", "Plant 2": "P2",
        "Customer 1": "C1", "Customer 2": "C2", "Customer 3": "C3",
    })


def data_text(relative: str) -> str:
    return importlib.resources.files("reopt.data").joinpath(relative).read_text()


@pytest.fixture
def toy_state():
    return build_toy_state()


@pytest.fixture
def toy_scenario_state():
    return load_state(data_text("scenarios/toy.json"))


@pytest.fixture
def toy_catalog():
    return json.loads(data_text("catalogs/toy_catalog.json"))


@pytest.fixture
def toy_mock_doc():
    return json.loads(data_text("mock/toy_mock.json"))
