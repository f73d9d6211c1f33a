"""Model-core: builders, instantiation, rendering, serialization, LP export."""

import math
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from reopt.errors import (
    DuplicateName,
    MalformedKeys,
    ParseError,
    UnregisteredSemanticKind,
    UnresolvedReference,
)
from reopt.model import (
    ConstraintFamily,
    ParameterEntry,
    RhsSpec,
    Semantic,
    VariableFamily,
    instantiate,
    load_state,
    new_state,
    read_lp,
    render_for_planner,
    save_state,
    write_lp,
)
from reopt.model.types import Literal, make_index_set
from reopt.solve import solve_lp, solve_mip

from .conftest import data_text
from .generators import random_model_state


class TestNewState:
    def test_empty(self):
        s = new_state()
        assert s.version == 0
        assert not s.names()

    def test_toy_registration_counts(self, toy_state):
        assert len(toy_state.variable_families) == 1
        assert len(toy_state.constraint_families) == 2
        assert len(toy_state.objective_components) == 1

    def test_empty_round_trip_byte_identical(self):
        text = save_state(new_state())
        assert save_state(load_state(text)) == text


class TestRegistration:
    def test_duplicate_parameter(self, toy_state):
        with pytest.raises(DuplicateName):
            toy_state.with_parameter(ParameterEntry("supply", 1.0))

    def test_namespace_is_shared_across_kinds(self, toy_state):
        with pytest.raises(DuplicateName):
            toy_state.with_variable_family(
                VariableFamily("supply", make_index_set(["a"])))

    def test_heterogeneous_key_arity(self):
        with pytest.raises(MalformedKeys):
            ParameterEntry("bad", {("a",): 1.0, ("a", "b"): 2.0})

    def test_bound_override_outside_index_set(self):
        with pytest.raises(ValueError):
            VariableFamily("v", make_index_set(["a"]),
                           bound_overrides={("zz",): (0.0, 1.0)})

    def test_binary_bounds_checked(self):
        with pytest.raises(ValueError):
            VariableFamily("v", make_index_set(["a"]), var_type="binary",
                           default_bounds=(0.0, 2.0))

    def test_namespaces_disjoint(self, toy_state):
        names = [
            set(toy_state.parameters),
            set(toy_state.variable_families),
            set(toy_state.constraint_families),
            set(toy_state.objective_components),
        ]
        for i in range(len(names)):
            for j in range(i + 1, len(names)):
                assert not names[i] & names[j]


class TestInstantiate:
    def test_toy_shape(self, toy_state):
        inst = instantiate(toy_state)
        assert len(inst.variables) == 6
        assert len(inst.rows) == 5
        senses = [r.sense for r in inst.rows]
        assert senses == ["<=", "<=", ">=", ">=", ">="]

    def test_empty_state(self):
        inst = instantiate(new_state())
        assert inst.variables == () and inst.rows == ()

    def test_bound_override_lands_in_instance(self, toy_state):
        fam = toy_state.variable_families["flows"]
        patched = fam.__class__(**{**fam.__dict__,
                                   "bound_overrides": {("P2", "C2"): (0.0, 5.0)}})
        state = toy_state.__class__(**{
            **toy_state.__dict__,
            "variable_families": {**toy_state.variable_families, "flows": patched}})
        inst = instantiate(state)
        var = next(v for v in inst.variables if v.key == "flows(P2,C2)")
        assert var.upper == 5.0

    def test_deterministic(self, toy_state):
        assert instantiate(toy_state) == instantiate(toy_state)

    def test_unresolved_parameter(self, toy_state):
        bad = ConstraintFamily(
            "ghost", make_index_set(["P1"]),
            toy_state.constraint_families["supply_constraints"].lhs,
            "<=", RhsSpec(default=None))
        with pytest.raises(UnresolvedReference):
            instantiate(toy_state.with_constraint_family(bad))

    def test_unregistered_semantic_kind(self, toy_state):
        bad = ConstraintFamily(
            "mystery", (), Semantic("no_such_kind", {}), "<=",
            RhsSpec(default=Literal(0.0)))
        with pytest.raises(UnregisteredSemanticKind):
            instantiate(toy_state.with_constraint_family(bad))

    def test_registration_order_permutation_same_objective(self):
        rng = random.Random(7)
        state = random_model_state(rng)
        inst = instantiate(state)
        # rebuild with constraint families registered in reverse order
        reordered = new_state()
        for p in state.parameters.values():
            reordered = reordered.with_parameter(p)
        for f in state.variable_families.values():
            reordered = reordered.with_variable_family(f)
        for f in reversed(list(state.constraint_families.values())):
            reordered = reordered.with_constraint_family(f)
        for c in state.objective_components.values():
            reordered = reordered.with_objective_component(c)
        inst2 = instantiate(reordered)
        assert [r.key for r in inst2.rows] != [r.key for r in inst.rows] \
            or len(inst.rows) <= 1
        r1, r2 = solve_mip(inst), solve_mip(inst2)
        assert r1.status == r2.status
        if r1.status == "optimal":
            assert r1.objective == pytest.approx(r2.objective, abs=1e-9)


class TestRender:
    def test_all_names_present(self, toy_state):
        text = render_for_planner(toy_state)
        for name in ("flows", "supply_constraints", "demand_constraints",
                     "transport_cost", "supply", "demand", "costs"):
            assert name in text

    def test_deterministic(self, toy_state):
        assert render_for_planner(toy_state) == render_for_planner(toy_state)

    def test_truncation_cap(self):
        big = new_state().with_variable_family(VariableFamily(
            "huge", make_index_set([f"e{i}" for i in range(10_000)])))
        text = render_for_planner(big, index_cap=100)
        listed = [ln for ln in text.splitlines() if ln.strip().startswith("(e")]
        assert len(listed) == 100
        assert "9900 more entries truncated" in text

    def test_entity_labels_rendered(self, toy_state):
        assert '"Plant 1" -> P1' in render_for_planner(toy_state)

    def test_allowed_ops_listed(self, toy_state):
        text = render_for_planner(toy_state)
        assert "UPDATE_PARAMETER" in text and "REMOVE_CONSTRAINT_FAMILY" in text


class TestSerialization:
    def test_toy_round_trip(self, toy_state):
        assert load_state(save_state(toy_state)) == toy_state

    def test_missing_field_names_it(self):
        with pytest.raises(ParseError) as err:
            load_state('{"parameters": []}')
        assert "variable_families" in str(err.value)

    def test_invalid_json_location(self):
        with pytest.raises(ParseError):
            load_state("{not json")

    def test_packaged_toy_file_solves_to_162(self):
        state = load_state(data_text("scenarios/toy.json"))
        result = solve_lp(instantiate(state))
        assert result.objective == pytest.approx(162.0, abs=1e-6)

    def test_packaged_file_equals_builder(self, toy_state, toy_scenario_state):
        assert instantiate(toy_scenario_state) == instantiate(toy_state)

    @settings(max_examples=40, deadline=None)
    @given(st.integers(min_value=0, max_value=10_000))
    def test_round_trip_random_states(self, seed):
        state = random_model_state(random.Random(seed))
        assert load_state(save_state(state)) == state


class TestLpFormat:
    def test_toy_export_read_back_same_optimum(self, toy_state):
        inst = instantiate(toy_state)
        text = write_lp(inst)
        parsed = read_lp(text)
        assert solve_lp(parsed).objective == pytest.approx(
            solve_lp(inst).objective, abs=1e-9)

    def test_sections_present(self, toy_state):
        text = write_lp(instantiate(toy_state))
        for section in ("Minimize", "Subject To", "Bounds", "End"):
            assert section in text

    def test_integer_sections(self):
        state = load_state(data_text("scenarios/exam_toy.json"))
        text = write_lp(instantiate(state))
        assert "Binaries" in text

    def test_free_and_fixed_bounds(self):
        state = new_state().with_variable_family(VariableFamily(
            "x", make_index_set(["a", "b"]),
            default_bounds=(-math.inf, math.inf),
            bound_overrides={("b",): (3.0, 3.0)}))
        text = write_lp(instantiate(state))
        assert "x(a) free" in text
        assert "x(b) = 3" in text

    def test_round_trip_random_instances(self):
        from .generators import random_lp_instance

        rng = random.Random(3)
        for _ in range(25):
            inst = random_lp_instance(rng)
            back = read_lp(write_lp(inst))
            a, b = solve_lp(inst), solve_lp(back)
            assert a.status == b.status
            if a.status == "optimal":
                assert a.objective == pytest.approx(b.objective, abs=1e-9)
