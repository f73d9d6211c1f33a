"""The bounded closed loop: plan, normalize, select, validate-and-solve.

Failure at any stage becomes the repair context for the next attempt;
once the budget is exhausted the state and stored solution stay exactly
as they were.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Mapping, Optional, Sequence

from ..errors import PlannerFailure, ReoptError, UnmappableLabel
from ..model.types import ModelState
from ..patch.normalize import normalize_action_set
from ..patch.types import PlannerOutput, StateDiff
from ..solve.types import SolverConfig
from ..toolbox.catalog import list_strategies
from .checks import PromptCheck
from .planning import Planner, plan
from .records import CandidateLogEntry, FailureRecord, StepOutcome, StrategyChoice
from .selection import Selector, select_strategy
from .validation import HeuristicBuilder, validate_and_solve

_PLAN_REPAIR = ("Return a single JSON object with edit_summary and "
                "candidate_action_sets containing executable patches.")
_NORMALIZE_REPAIR = ("Use registered entity ids or labels from the model "
                     "representation; do not invent new names.")


@dataclass(frozen=True)
class LoopResult:
    """StepOutcome plus the artifacts a session needs to commit."""

    outcome: StepOutcome
    state: ModelState
    diff: Optional[StateDiff]
    planner_output: Optional[PlannerOutput]
    choice: Optional[StrategyChoice]


def run_closed_loop(delta: str, state: ModelState, *,
                    planner: Planner,
                    selector: Optional[Selector] = None,
                    prior_solution: Optional[Mapping[str, float]] = None,
                    budget: int = 2,
                    prompt_checks: Sequence[PromptCheck] = (),
                    config: Optional[SolverConfig] = None,
                    tuned_config: Optional[SolverConfig] = None,
                    preset_name: Optional[str] = None,
                    heuristics: tuple[str, ...] = (),
                    heuristic_builders: Optional[Mapping[str, HeuristicBuilder]] = None,
                    framing: Optional[str] = None,
                    backend: str = "builtin",
                    force_strategy: Optional[str] = None) -> LoopResult:
    """Run one prompt through the loop with at most ``budget`` attempts.

    ``force_strategy`` bypasses the selector (the no-selector ablation
    passes "scratch").
    """
    if budget < 1:
        raise ValueError("budget must be at least 1")
    repair: Optional[FailureRecord] = None
    history: list[tuple[str, str, str]] = []
    log: list[CandidateLogEntry] = []
    attempts = 0
    planner_output: Optional[PlannerOutput] = None
    choice: Optional[StrategyChoice] = None

    def note_failure(record: FailureRecord) -> FailureRecord:
        nonlocal repair
        record = replace(record, attempt_history=tuple(history))
        history.append((record.failure_stage, record.failure_kind,
                        record.failure_message))
        repair = record
        return record

    while attempts < budget:
        attempts += 1
        try:
            planner_output = plan(delta, state, repair, planner, framing=framing)
        except PlannerFailure as exc:
            log.append(CandidateLogEntry(attempts, -1, "apply_error", stage="plan_parse",
                                         kind=type(exc.__cause__ or exc).__name__,
                                         message=str(exc)))
            note_failure(FailureRecord("plan_parse", type(exc.__cause__ or exc).__name__,
                                       str(exc), _PLAN_REPAIR))
            continue
        if not planner_output.candidate_action_sets:
            note_failure(FailureRecord("plan_parse", "empty_plan",
                                       "planner returned no candidate action sets",
                                       _PLAN_REPAIR))
            continue
        try:
            normalized = [normalize_action_set(a, state)
                          for a in planner_output.candidate_action_sets]
        except (UnmappableLabel, ReoptError) as exc:
            log.append(CandidateLogEntry(attempts, -1, "apply_error", stage="normalize",
                                         kind=type(exc).__name__, message=str(exc)))
            note_failure(FailureRecord("normalize", type(exc).__name__, str(exc),
                                       _NORMALIZE_REPAIR))
            continue
        catalog = list_strategies(state, prior_solution, preset_name=preset_name,
                                  heuristics=heuristics)
        if force_strategy is not None:
            choice = StrategyChoice(force_strategy, (), "strategy forced by caller")
        else:
            choice = select_strategy(normalized, planner_output.relevant_components,
                                     state, prior_solution, catalog, selector,
                                     planner_output.planning_hints)
        outcome = validate_and_solve(
            normalized, choice, state, prompt_checks,
            config=config, tuned_config=tuned_config,
            prior_solution=prior_solution, backend=backend,
            heuristic_builders=heuristic_builders, attempt=attempts)
        log.extend(outcome.log)
        if outcome.ok:
            best = outcome.best
            return LoopResult(
                outcome=StepOutcome(
                    status="succeeded",
                    applied_action_set=best.action_set,
                    new_state_version=best.state.version,
                    solution=best.result,
                    attempts_used=attempts,
                    candidate_log=tuple(log),
                ),
                state=best.state,
                diff=best.diff,
                planner_output=planner_output,
                choice=choice,
            )
        note_failure(outcome.failure)

    return LoopResult(
        outcome=StepOutcome(
            status="failed_budget_exhausted",
            applied_action_set=None,
            new_state_version=state.version,
            solution=None,
            attempts_used=attempts,
            candidate_log=tuple(log),
            failure=repair,
        ),
        state=state,
        diff=None,
        planner_output=planner_output,
        choice=choice,
    )
