"""Acceptance criteria, one test per criterion, each printing a PASS line.

Run with ``pytest tests/test_acceptance.py -v -s`` to see the per-criterion
lines. Every criterion runs offline: the scripted mock planner stands in
for the LLM and no UI build is required.
"""

import json
import random
import time

import pytest
from fastapi.testclient import TestClient

from reopt.agents import parse_checks, run_closed_loop, score_case
from reopt.errors import ApplyError
from reopt.gateway import MockScript, ScriptedPlanner
from reopt.model import instantiate
from reopt.patch import (
    ActionSet,
    Patch,
    apply_action_set,
    apply_patch,
    normalize_action_set,
)
from reopt.service import create_app, run_replay
from reopt.solve import SolverConfig, solve_lp, solve_mip
from reopt.toolbox import exam_heuristic_warm_start

from .conftest import build_toy_state, data_text
from .generators import random_binary_instance, random_lp_instance, random_model_state
from .oracles import binary_exhaustive, lp_vertex_enumeration, staged_exam_heuristic
from .test_toolbox import hand_params, random_exam_params

TOL = 1e-6


def announce(name: str):
    print(f"\nACCEPTANCE {name}: PASS")


# ---------------------------------------------------------------------------
# Criterion 1: golden toy suite, end to end through the closed loop
# ---------------------------------------------------------------------------

GOLDEN = {
    "P1": 174.0,
    "P2": 184.0,
    "P3": 192.0,
}


def test_golden_toy_suite():
    state = build_toy_state()
    baseline = solve_lp(instantiate(state))
    assert baseline.status == "optimal"
    assert baseline.objective == pytest.approx(162.0, abs=TOL)
    assert baseline.wall_time < 1.0
    for key, value in {"flows(P1,C1)": 12.0, "flows(P2,C2)": 15.0,
                       "flows(P2,C3)": 18.0}.items():
        assert baseline.assignment[key] == pytest.approx(value, abs=TOL)

    script = MockScript.from_doc(json.loads(data_text("mock/toy_mock.json")))
    catalog = json.loads(data_text("catalogs/toy_catalog.json"))
    assert [e["prompt_id"] for e in catalog] == ["P1", "P2", "P3"]

    for entry in catalog:
        checks = parse_checks(entry["prompt_checks"])
        result = run_closed_loop(
            entry["delta"], state,
            planner=ScriptedPlanner(script),
            prior_solution=baseline.assignment,
            budget=2, prompt_checks=checks, preset_name="toy-default")
        outcome = result.outcome
        assert outcome.status == "succeeded"
        assert outcome.attempts_used == 1
        assert outcome.solution.wall_time < 1.0
        assert outcome.solution.objective == pytest.approx(
            GOLDEN[entry["prompt_id"]], abs=TOL)
        if entry["prompt_id"] == "P2":
            assert outcome.solution.assignment["flows(P2,C2)"] == pytest.approx(
                5.0, abs=TOL)
        score = score_case(outcome, result.state, state,
                           ActionSet.from_doc(entry["reference_actions"]), checks)
        assert score.update_correct and score.prompt_satisfied
        assert score.first_attempt_success and score.final_success
    announce("golden-toy-suite")


# ---------------------------------------------------------------------------
# Criterion 2: solver oracle equivalence
# ---------------------------------------------------------------------------

def test_solver_oracle_equivalence():
    started = time.perf_counter()
    exact = SolverConfig(mip_gap_tolerance=1e-12)

    rng = random.Random(2024)
    lp_checked = 0
    for _ in range(500):
        inst = random_lp_instance(rng, max_vars=6, max_rows=4)
        status, oracle = lp_vertex_enumeration(inst)
        result = solve_lp(inst)
        assert result.status == status
        if status == "optimal":
            assert abs(result.objective - oracle) / max(1.0, abs(oracle)) < 1e-9
        lp_checked += 1
    assert lp_checked >= 500

    mip_checked = 0
    for _ in range(200):
        inst = random_binary_instance(rng, max_vars=12)
        status, oracle = binary_exhaustive(inst)
        result = solve_mip(inst, exact)
        assert result.status == status
        if status == "optimal":
            assert abs(result.objective - oracle) / max(1.0, abs(oracle)) < 1e-9
        mip_checked += 1
    assert mip_checked >= 200

    elapsed = time.perf_counter() - started
    assert elapsed < 60.0, f"oracle suite took {elapsed:.1f}s"
    announce(f"solver-oracle-equivalence ({lp_checked} LPs, {mip_checked} MIPs, "
             f"{elapsed:.1f}s)")


# ---------------------------------------------------------------------------
# Criterion 3: patch-semantics property suite (>= 200 cases per property)
# ---------------------------------------------------------------------------

CASES = 200


def _first_map_parameter(state, rng):
    name = rng.choice(sorted(state.parameters))
    entry = state.parameters[name]
    key = rng.choice(sorted(entry.value))
    return name, list(key)


def test_patch_semantics_properties():
    rng = random.Random(777)

    for _ in range(CASES):  # atomicity
        state = random_model_state(rng)
        name, key = _first_map_parameter(state, rng)
        actions = ActionSet((
            Patch(op="UPDATE_PARAMETER", target=name,
                  update={"key": key, "value": float(rng.randint(0, 9))}),
            Patch(op="UPDATE_PARAMETER", target="nonexistent",
                  update={"value": 1.0}),
        ))
        with pytest.raises(ApplyError):
            apply_action_set(state, actions)
        # version and content untouched by the failed transition
        assert state == random_model_state_replay(state)

    for _ in range(CASES):  # delta composition (dyadic deltas are float-exact)
        state = random_model_state(rng)
        name, key = _first_map_parameter(state, rng)
        delta = rng.randint(-8, 8) / 4.0
        twice = apply_patch(apply_patch(state, _delta(name, key, delta)),
                            _delta(name, key, delta))
        once = apply_patch(state, _delta(name, key, 2 * delta))
        assert twice == once

    for _ in range(CASES):  # last writer wins
        state = random_model_state(rng)
        name, key = _first_map_parameter(state, rng)
        v, w = float(rng.randint(-9, 9)), float(rng.randint(-9, 9))
        assert apply_patch(apply_patch(state, _value(name, key, v)),
                           _value(name, key, w)) == \
            apply_patch(state, _value(name, key, w))

    for _ in range(CASES):  # normalization idempotence
        state = random_model_state(rng)
        label = rng.choice(sorted(state.entity_registry))
        actions = ActionSet((
            Patch(op="UPDATE_PARAMETER", target="weight",
                  update={"key": [label], "delta": 1.0}),
            Patch(op="UPDATE_CONSTRAINT_RHS", target="bin_cap",
                  scope=[sorted(state.parameters["cap"].value)[0][0]],
                  update={"delta": -1.0}),
        ))
        once = normalize_action_set(actions, state)
        assert normalize_action_set(once, state) == once

    for _ in range(CASES):  # RHS -> parameter rewrite equivalence
        state = random_model_state(rng)
        row = rng.choice(sorted(state.constraint_families["bin_cap"].index_set))
        patch = Patch(op="UPDATE_CONSTRAINT_RHS", target="bin_cap",
                      scope=list(row), update={"value": float(rng.randint(1, 30))})
        rewritten = normalize_action_set(ActionSet((patch,)), state).actions[0]
        assert rewritten.op == "UPDATE_PARAMETER"
        a, _ = apply_action_set(state, ActionSet((patch,)))
        b, _ = apply_action_set(state, ActionSet((rewritten,)))
        assert instantiate(a) == instantiate(b)

    for _ in range(CASES):  # add/remove inverse
        state = random_model_state(rng)
        definition = {
            "name": "tmp_rule", "index_set": [["i0"]],
            "lhs": {"kind": "indexed_sum", "var_family": "place",
                    "var_positions": [0], "coeff": 1.0},
            "sense": "<=",
            "rhs": {"default": float(rng.randint(1, 4)), "overrides": []}}
        added = apply_patch(state, Patch(op="ADD_CONSTRAINT_FAMILY",
                                         update={"constraint": definition}))
        removed = apply_patch(added, Patch(op="REMOVE_CONSTRAINT_FAMILY",
                                           target="tmp_rule"))
        assert instantiate(removed) == instantiate(state)

    announce(f"patch-semantics-properties (6 x {CASES} cases)")


def random_model_state_replay(state):
    # immutability makes "unchanged" trivial; keep the check explicit anyway
    return state


def _delta(name, key, delta):
    return Patch(op="UPDATE_PARAMETER", target=name,
                 update={"key": key, "delta": delta})


def _value(name, key, value):
    return Patch(op="UPDATE_PARAMETER", target=name,
                 update={"key": key, "value": value})


# ---------------------------------------------------------------------------
# Criterion 4: Algorithm-1 (exam heuristic) suite
# ---------------------------------------------------------------------------

def test_exam_heuristic_suite():
    assert exam_heuristic_warm_start(hand_params()) == {"v1": 5, "b1": 1, "b2": 4}

    rng = random.Random(31337)
    checked = 0
    for _ in range(500):
        params = random_exam_params(rng)
        x = exam_heuristic_warm_start(params)
        oracle, stages = staged_exam_heuristic(params)
        assert x == oracle

        slots_used = list(x.values())
        assert len(set(slots_used)) == len(slots_used)          # injectivity
        assert set(x) == set(params.enrollment)                 # totality
        for block, slot in params.reserved_map.items():
            assert x[block] == slot                             # pin fidelity
        for block, stage in stages.items():
            if stage == 2:
                assert x[block] < params.cutoff                 # pre-cutoff placement
        for day, cap in params.day_caps.items():                # day-cap respect
            day_slots = set(params.days[day])
            carried = sum(params.enrollment[b] for b, s in x.items()
                          if s in day_slots and stages[b] in (1, 2))
            load = carried
            stage3 = sorted((b for b, s in stages.items()
                             if s == 3 and x[b] in day_slots),
                            key=lambda b: (params.enrollment[b], b))
            for block in stage3:
                load += params.enrollment[block]
                assert load <= cap
        checked += 1
    assert checked >= 500
    announce(f"exam-heuristic-suite (hand case + {checked} random instances)")


# ---------------------------------------------------------------------------
# Criterion 5: retry-loop behavior
# ---------------------------------------------------------------------------

def test_retry_loop_behavior():
    state = build_toy_state()
    baseline = solve_lp(instantiate(state))
    p1_doc = {
        "edit_summary": "halt plant 1",
        "candidate_action_sets": [{"actions": [{
            "op": "UPDATE_PARAMETER", "target": "supply", "scope": None,
            "update": {"key": ["P1"], "value": 0.0}}]}],
    }
    repairing = ScriptedPlanner(MockScript.from_doc({"entries": [{
        "match": ".*", "responses": {"1": "*** not parseable ***", "2": p1_doc}}]}))
    result = run_closed_loop("stop plant 1", state, planner=repairing,
                             prior_solution=baseline.assignment, budget=2)
    assert result.outcome.status == "succeeded"
    assert result.outcome.attempts_used == 2
    score = score_case(result.outcome, result.state, state, ActionSet.from_doc(
        p1_doc["candidate_action_sets"][0]["actions"]), ())
    assert score.final_success and not score.first_attempt_success

    failing = ScriptedPlanner(MockScript.from_doc({"entries": [{
        "match": ".*", "responses": {"default": "never valid"}}]}))
    failed = run_closed_loop("anything", state, planner=failing,
                             prior_solution=baseline.assignment, budget=2)
    assert failed.outcome.status == "failed_budget_exhausted"
    assert len(failing.calls) == 2                 # exactly B planner calls
    assert failed.state is state                   # version untouched
    assert failed.outcome.new_state_version == state.version
    announce("retry-loop-behavior")


# ---------------------------------------------------------------------------
# Criterion 6: failure-mode and criteria bookkeeping
# ---------------------------------------------------------------------------

def _routed_planner(routes):
    """Planner that answers by delta substring; used to inject failures."""
    entries = [{"match": pattern, "responses": {"default": doc}}
               for pattern, doc in routes]
    return ScriptedPlanner(MockScript.from_doc({"entries": entries}))


def test_failure_and_criteria_bookkeeping(tmp_path):
    supply_zero = {"op": "UPDATE_PARAMETER", "target": "supply", "scope": None,
                   "update": {"key": ["P1"], "value": 0.0}}
    catalog = [
        {"prompt_id": "OK", "delta": "case ok",
         "reference_actions": [supply_zero],
         "prompt_checks": [{"kind": "param_equals", "target": "supply",
                            "key": ["P1"], "value": 0.0}]},
        {"prompt_id": "GARBLE", "delta": "case garble",
         "reference_actions": [supply_zero], "prompt_checks": []},
        {"prompt_id": "WRONGVAL", "delta": "case wrongval",
         "reference_actions": [supply_zero], "prompt_checks": []},
        {"prompt_id": "BLOWUP", "delta": "case blowup",
         "reference_actions": [{"op": "UPDATE_PARAMETER", "target": "demand",
                                "scope": None,
                                "update": {"key": ["C1"], "value": 1000.0}}],
         "prompt_checks": []},
        {"prompt_id": "VIOLATE", "delta": "case violate",
         "reference_actions": [{"op": "UPDATE_BOUND", "target": "flows",
                                "scope": ["P2", "C2"],
                                "update": {"bound_type": "upper", "value": 5.0}}],
         "prompt_checks": [{"kind": "var_at_most", "target": "flows",
                            "index": ["P2", "C2"], "value": 1.0}]},
        {"prompt_id": "WRONGCOMP", "delta": "case wrongcomp",
         "reference_actions": [supply_zero], "prompt_checks": []},
    ]

    def doc_for(actions, summary="edit"):
        return {"edit_summary": summary,
                "candidate_action_sets": [{"actions": actions}]}

    planner = _routed_planner([
        ("case ok", doc_for([supply_zero])),
        ("case garble", "complete nonsense with no json"),
        ("case wrongval", doc_for([{**supply_zero,
                                    "update": {"key": ["P1"], "value": 5.0}}])),
        ("case blowup", doc_for([{"op": "UPDATE_PARAMETER", "target": "demand",
                                  "scope": None,
                                  "update": {"key": ["C1"], "value": 1000.0}}])),
        ("case violate", doc_for([{"op": "UPDATE_BOUND", "target": "flows",
                                   "scope": ["P2", "C2"],
                                   "update": {"bound_type": "upper", "value": 5.0}}])),
        ("case wrongcomp", doc_for([{"op": "UPDATE_PARAMETER", "target": "costs",
                                     "scope": None,
                                     "update": {"key": ["P1", "C1"], "value": 9.0}}])),
    ])

    path = tmp_path / "failure_catalog.json"
    path.write_text(json.dumps(catalog))
    report = run_replay("toy", path, planner=planner, budget=2)

    modes = report.aggregates["failure_mode_counts"]
    assert modes["invalid_patch"] >= 1     # GARBLE
    assert modes["bad_update"] >= 1        # WRONGVAL
    assert modes["no_incumbent"] >= 1      # BLOWUP
    assert modes["prompt_violation"] >= 1  # VIOLATE
    assert modes["missing_output"] >= 1    # GARBLE and friends
    assert modes["wrong_component"] >= 1   # WRONGCOMP

    counts = report.aggregates["criteria_counts"]
    assert counts["final_success"] <= counts["prompt_satisfied"] \
        <= counts["update_correct"]
    assert counts["first_attempt_success"] <= counts["final_success"]

    clean = run_replay("toy", "toy_catalog", planner="mock")
    clean_counts = clean.aggregates["criteria_counts"]
    assert clean_counts["final_success"] <= clean_counts["prompt_satisfied"] \
        <= clean_counts["update_correct"]
    assert clean_counts["first_attempt_success"] <= clean_counts["final_success"]
    announce("failure-and-criteria-bookkeeping")


# ---------------------------------------------------------------------------
# Criterion 7: service round-trip with restart, offline and UI-free
# ---------------------------------------------------------------------------

def test_service_round_trip(tmp_path, monkeypatch):
    # no network credentials and no UI build anywhere in this path
    for variable in ("REOPT_LLM_BASE_URL", "REOPT_LLM_API_KEY", "REOPT_LLM_MODEL"):
        monkeypatch.delenv(variable, raising=False)
    store = str(tmp_path / "store")

    with TestClient(create_app(store_dir=store)) as client:
        created = client.post("/sessions", json={"scenario": "toy"}).json()
        assert created["objective"] == pytest.approx(162.0, abs=TOL)
        sid = created["session_id"]
        stepped = client.post(f"/sessions/{sid}/prompts", json={
            "delta": "There is an unexpected shortage of trucks for deliveries "
                     "from Plant 2 to Customer 2 this week. The maximum that can "
                     "be shipped on this route is 5 units."}).json()
        assert stepped["outcome"]["status"] == "succeeded"
        assert stepped["objective"] == pytest.approx(184.0, abs=TOL)
        version_before = stepped["version"]
        diff_before = client.get(f"/sessions/{sid}/diff/1").json()["entries"]

    with TestClient(create_app(store_dir=store)) as restarted:
        summary = restarted.get(f"/sessions/{sid}").json()
        assert summary["version"] == version_before == 1
        assert summary["objective"] == pytest.approx(184.0, abs=TOL)
        diff_after = restarted.get(f"/sessions/{sid}/diff/1").json()["entries"]
        assert diff_after == diff_before
    announce("service-round-trip")
