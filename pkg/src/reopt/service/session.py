"""Session state: versioned model history, solution history, event log.

Prompt handling is synchronous with a single writer per session; the
store is written as events happen and restore replays committed action
sets from the scenario baseline.
"""

from __future__ import annotations

import threading
import uuid
from dataclasses import dataclass, field
from datetime import datetime, timezone
from typing import Callable, Mapping, Optional, Sequence, Union

from ..errors import ReoptError
from ..gateway.client import chat_complete, config_from_env
from ..gateway.mock import ScriptedPlanner
from ..model.instantiate import instantiate
from ..model.types import ModelState
from ..patch.types import StateDiff
from ..solve.backends import solve
from ..solve.types import SolveResult, SolverConfig
from ..agents.checks import parse_checks
from ..agents.loop import LoopResult, run_closed_loop
from .scenarios import Scenario, load_scenario
from .store import append_event, list_session_ids, read_events


class ConcurrentPrompt(ReoptError):
    """A prompt is already in flight for this session."""


class UnknownSession(ReoptError):
    pass


def _now() -> str:
    return datetime.now(timezone.utc).isoformat()


@dataclass
class Session:
    id: str
    scenario: Scenario
    states: dict[int, ModelState]
    solutions: dict[int, SolveResult]
    events: list[dict] = field(default_factory=list)
    created_at: str = field(default_factory=_now)
    updated_at: str = field(default_factory=_now)
    truncated_store: bool = False
    lock: threading.Lock = field(default_factory=threading.Lock, repr=False)

    @property
    def version(self) -> int:
        return max(self.states)

    @property
    def state(self) -> ModelState:
        return self.states[self.version]

    @property
    def solution(self) -> SolveResult:
        return self.solutions[self.version]

    def summary(self) -> dict:
        return {
            "session_id": self.id,
            "scenario_name": self.scenario.name,
            "version": self.version,
            "objective": self.solution.objective,
            "solution": self.solution.to_doc(),
            "families": {
                "parameters": len(self.state.parameters),
                "variable_families": len(self.state.variable_families),
                "constraint_families": len(self.state.constraint_families),
                "objective_components": len(self.state.objective_components),
            },
            "created_at": self.created_at,
            "updated_at": self.updated_at,
            "store_truncated": self.truncated_store,
        }


Planner = Union[str, Callable]


class SessionManager:
    def __init__(self, store_dir: Optional[str] = None,
                 base_config: Optional[SolverConfig] = None):
        self.store_dir = store_dir
        self.base_config = base_config or SolverConfig()
        self.sessions: dict[str, Session] = {}

    # -- lifecycle -------------------------------------------------------------

    def create(self, scenario_ref, session_id: Optional[str] = None) -> Session:
        scenario = load_scenario(scenario_ref)
        config = scenario.tuned_config(self.base_config) or self.base_config
        baseline = solve(instantiate(scenario.state), config)
        session = Session(
            id=session_id or uuid.uuid4().hex[:12],
            scenario=scenario,
            states={scenario.state.version: scenario.state},
            solutions={scenario.state.version: baseline},
        )
        record = {
            "type": "created",
            "ts": session.created_at,
            "scenario": dict(scenario.doc) if scenario.doc else None,
            "scenario_name": scenario.name,
            "version": scenario.state.version,
            "baseline": baseline.to_doc(),
        }
        session.events.append(record)
        self.sessions[session.id] = session
        if self.store_dir:
            append_event(self.store_dir, session.id, record)
        return session

    def get(self, session_id: str) -> Session:
        if session_id not in self.sessions:
            raise UnknownSession(f"no session {session_id!r}")
        return self.sessions[session_id]

    # -- prompting --------------------------------------------------------------

    def _resolve_planner(self, session: Session, planner: Planner):
        if callable(planner):
            return planner
        if planner == "mock":
            script = session.scenario.mock()
            if script is None:
                raise ReoptError(
                    f"scenario {session.scenario.name!r} ships no mock script; "
                    "use --planner llm or pass a planner callable")
            return ScriptedPlanner(script)
        if planner == "llm":
            gateway = config_from_env()
            return lambda request: chat_complete(request, gateway)
        raise ReoptError(f"unknown planner {planner!r}")

    def prompt(self, session_id: str, delta: str, budget: int = 2,
               checks: Sequence[Mapping] = (), planner: Planner = "mock",
               strategy: Optional[str] = None, backend: str = "builtin") -> dict:
        """Run the closed loop for one delta; 409-style error if one is in flight."""
        session = self.get(session_id)
        if not session.lock.acquire(blocking=False):
            raise ConcurrentPrompt(f"session {session_id} already has a prompt in flight")
        try:
            planner_fn = self._resolve_planner(session, planner)
            scenario = session.scenario
            previous_objective = session.solution.objective
            result = run_closed_loop(
                delta, session.state,
                planner=planner_fn,
                prior_solution=session.solution.assignment,
                budget=budget,
                prompt_checks=parse_checks(checks),
                config=self.base_config,
                tuned_config=scenario.tuned_config(self.base_config),
                preset_name=scenario.preset,
                heuristics=scenario.heuristics,
                heuristic_builders=scenario.heuristic_builders(),
                framing=scenario.framing,
                backend=backend,
                force_strategy=None if strategy in (None, "auto") else strategy,
            )
            return self._commit(session, delta, result, previous_objective)
        finally:
            session.lock.release()

    def _commit(self, session: Session, delta: str, result: LoopResult,
                previous_objective) -> dict:
        outcome = result.outcome
        if outcome.succeeded:
            session.states[result.state.version] = result.state
            session.solutions[result.state.version] = outcome.solution
        session.updated_at = _now()
        record = {
            "type": "step",
            "ts": session.updated_at,
            "delta": delta,
            "planner_output": (result.planner_output.to_doc()
                               if result.planner_output else None),
            "strategy": result.choice.to_doc() if result.choice else None,
            "diff": result.diff.to_doc() if result.diff is not None else [],
            "outcome": outcome.to_doc(),
            "version": session.version,
        }
        session.events.append(record)
        if self.store_dir:
            append_event(self.store_dir, session.id, record)
        return self.step_response(session, record, previous_objective)

    @staticmethod
    def step_response(session: Session, record: dict, previous_objective) -> dict:
        outcome = record["outcome"]
        return {
            "session_id": session.id,
            "scenario_name": session.scenario.name,
            "delta": record["delta"],
            "outcome": outcome,
            "planner_output": record["planner_output"],
            "strategy": record["strategy"],
            "diff": record["diff"],
            "version": session.version,
            "objective": session.solution.objective,
            "previous_objective": previous_objective,
        }

    # -- persistence -----------------------------------------------------------

    def restore(self, session_id: str) -> Session:
        """Rebuild a session by replaying committed action sets from the
        scenario baseline recorded in the store."""
        if not self.store_dir:
            raise ReoptError("no store directory configured")
        records, truncated = read_events(self.store_dir, session_id)
        if not records or records[0].get("type") != "created":
            raise UnknownSession(f"no stored session {session_id!r}")
        head = records[0]
        scenario = load_scenario(head["scenario"])
        state = scenario.state
        session = Session(
            id=session_id,
            scenario=scenario,
            states={state.version: state},
            solutions={state.version: SolveResult.from_doc(head["baseline"])},
            created_at=head.get("ts", _now()),
            truncated_store=truncated,
        )
        session.events.append(head)
        from ..patch.apply import apply_action_set  # local import avoids cycle
        from ..patch.types import ActionSet

        for record in records[1:]:
            session.events.append(record)
            outcome = record.get("outcome") or {}
            if record.get("type") != "step" or outcome.get("status") != "succeeded":
                continue
            actions = ActionSet.from_doc(outcome["applied_action_set"])
            state, _ = apply_action_set(state, actions)
            if state.version != record["version"]:
                raise ReoptError(
                    f"replay version drift: got {state.version}, "
                    f"stored {record['version']}")
            session.states[state.version] = state
            session.solutions[state.version] = SolveResult.from_doc(outcome["solution"])
            session.updated_at = record.get("ts", session.updated_at)
        self.sessions[session_id] = session
        return session

    def restore_all(self) -> list[str]:
        if not self.store_dir:
            return []
        restored = []
        for session_id in list_session_ids(self.store_dir):
            self.restore(session_id)
            restored.append(session_id)
        return restored

    def diff_doc(self, session_id: str, version: int) -> StateDiff:
        from ..patch.diff import diff_states

        session = self.get(session_id)
        if version not in session.states or version - 1 not in session.states:
            raise UnknownSession(f"session {session_id} has no committed version {version}")
        return diff_states(session.states[version - 1], session.states[version])
