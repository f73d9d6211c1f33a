"""Best-improvement candidate validation.

Each candidate action set is applied to a copy, instantiated, solved
under the chosen strategy, and screened by the prompt checks; the
lowest-objective prompt-satisfying candidate wins (ties to the earliest).
When every candidate fails, the aggregated failure record feeds the
retry loop.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Mapping, Optional, Sequence

from ..errors import ApplyError, ReoptError
from ..model.instantiate import instantiate
from ..model.types import Instance, ModelState
from ..patch.apply import apply_action_set
from ..patch.types import ActionSet, StateDiff
from ..solve.backends import get_backend
from ..solve.types import SolveResult, SolverConfig, WarmStart
from ..toolbox.warmstarts import direct_warm_start, fix_and_release
from .checks import PromptCheck, evaluate_checks
from .records import CandidateLogEntry, FailureRecord, StrategyChoice

HeuristicBuilder = Callable[[ModelState, Mapping[str, float], Instance], WarmStart]

_STAGE_ORDER = {"plan_parse": 0, "normalize": 1, "apply": 2, "solve": 3, "prompt_check": 4}

_REPAIR_HINTS = {
    "apply": "Adjust the patch so it validates and applies cleanly against the "
             "current model state; check target names, index keys, and payload fields.",
    "solve": "The patched model produced no usable incumbent; reconsider whether "
             "the edit over-tightens the model or targets the wrong component.",
    "prompt_check": "The solution violates a prompt-specific requirement; make the "
                    "edit enforce the requested condition directly.",
}


@dataclass(frozen=True)
class ValidatedCandidate:
    index: int
    action_set: ActionSet
    state: ModelState
    diff: StateDiff
    instance: Instance
    result: SolveResult


@dataclass(frozen=True)
class ValidationOutcome:
    best: Optional[ValidatedCandidate]
    failure: Optional[FailureRecord]
    log: tuple[CandidateLogEntry, ...]

    @property
    def ok(self) -> bool:
        return self.best is not None


_PATTERN_OPS = frozenset({
    "UPDATE_COEFFICIENT", "FIX_VARIABLES_BY_PATTERN", "UPDATE_CONSTRAINT_RHS_BY_PATTERN",
})


def patch_targets(action_set: ActionSet) -> tuple[str, ...]:
    """Component names an action set targets (pattern specs are not names)."""
    return tuple(p.target for p in action_set.actions
                 if isinstance(p.target, str) and p.op not in _PATTERN_OPS)


def affected_keys(before: Instance, after: Instance) -> set[str]:
    """Variables a state transition touches: changed bounds or objective
    coefficients, membership in any changed/added/removed row, or being
    new to the instance."""
    touched: set[str] = set()
    before_vars = {v.key: v for v in before.variables}
    for var in after.variables:
        old = before_vars.get(var.key)
        if old is None or (old.lower, old.upper, old.objective) != (
                var.lower, var.upper, var.objective):
            touched.add(var.key)
    before_rows = {r.key: r for r in before.rows}
    after_rows = {r.key: r for r in after.rows}
    before_keys = [v.key for v in before.variables]
    after_keys = [v.key for v in after.variables]
    for key in before_rows.keys() | after_rows.keys():
        b, a = before_rows.get(key), after_rows.get(key)
        b_terms = {(before_keys[p], c) for p, c in b.coeffs} if b else None
        a_terms = {(after_keys[p], c) for p, c in a.coeffs} if a else None
        if b is not None and a is not None and b_terms == a_terms \
                and (b.sense, b.rhs) == (a.sense, a.rhs):
            continue
        for terms in (b_terms, a_terms):
            if terms:
                touched.update(k for k, _ in terms)
    return touched


def _configure(choice: StrategyChoice, config: SolverConfig,
               tuned_config: Optional[SolverConfig]) -> SolverConfig:
    if "tuned" in choice.solve_strategy and tuned_config is not None:
        return tuned_config
    return config


def _warm_start_for(choice: StrategyChoice, prior, base_instance: Instance,
                    new_state: ModelState, instance: Instance,
                    heuristic_builders: Mapping[str, HeuristicBuilder]
                    ) -> tuple[Optional[WarmStart], Instance]:
    strategy = choice.solve_strategy
    if prior is None or strategy in ("scratch", "tuned"):
        return None, instance
    if strategy in ("warm", "warm+tuned"):
        return direct_warm_start(prior, instance).warm_start, instance
    if strategy == "fix_and_release":
        affected = affected_keys(base_instance, instance)
        warm, overrides = fix_and_release(prior, affected, instance)
        return warm, instance.with_bounds(overrides)
    if strategy == "heuristic_warm":
        for builder in heuristic_builders.values():
            return builder(new_state, prior, instance), instance
    return None, instance


def validate_and_solve(action_sets: Sequence[ActionSet], choice: StrategyChoice,
                       state: ModelState, prompt_checks: Sequence[PromptCheck] = (),
                       *, config: Optional[SolverConfig] = None,
                       tuned_config: Optional[SolverConfig] = None,
                       prior_solution: Optional[Mapping[str, float]] = None,
                       backend: str = "builtin",
                       heuristic_builders: Optional[Mapping[str, HeuristicBuilder]] = None,
                       attempt: int = 1) -> ValidationOutcome:
    config = config or SolverConfig()
    solver = get_backend(backend)
    base_instance: Optional[Instance] = None
    log: list[CandidateLogEntry] = []
    best: Optional[ValidatedCandidate] = None

    for index, action_set in enumerate(action_sets):
        targets = patch_targets(action_set)
        try:
            new_state, diff = apply_action_set(state, action_set)
            instance = instantiate(new_state)
        except (ApplyError, ReoptError) as exc:
            log.append(CandidateLogEntry(
                attempt, index, "apply_error", stage="apply",
                kind=type(exc).__name__, message=str(exc), targets=targets))
            continue
        try:
            if base_instance is None:
                base_instance = instantiate(state)
            warm, solve_instance = _warm_start_for(
                choice, prior_solution, base_instance, new_state, instance,
                heuristic_builders or {})
            run_config = _configure(choice, config, tuned_config)
            result = solver(solve_instance, run_config, warm_start=warm)
        except ReoptError as exc:
            # unexpected solver-side error: surfaced, distinct from clean infeasibility
            log.append(CandidateLogEntry(
                attempt, index, "solve_error", stage="solve",
                kind=type(exc).__name__, message=str(exc), targets=targets))
            continue
        if not result.has_incumbent:
            log.append(CandidateLogEntry(
                attempt, index, "no_incumbent", stage="solve", kind="no_incumbent",
                message=f"solver status {result.status}", targets=targets))
            continue
        failures = [r for r in evaluate_checks(prompt_checks, new_state, instance, result)
                    if not r.ok]
        if failures:
            log.append(CandidateLogEntry(
                attempt, index, "prompt_violation", objective=result.objective,
                stage="prompt_check", kind="prompt_violation",
                message="; ".join(f.message for f in failures), targets=targets))
            continue
        log.append(CandidateLogEntry(
            attempt, index, "ok", objective=result.objective, targets=targets))
        candidate = ValidatedCandidate(index, action_set, new_state, diff, instance, result)
        if best is None or result.objective < best.result.objective:
            best = candidate

    if best is not None:
        return ValidationOutcome(best=best, failure=None, log=tuple(log))
    return ValidationOutcome(best=None, failure=_aggregate_failure(log), log=tuple(log))


def _aggregate_failure(log: Sequence[CandidateLogEntry]) -> FailureRecord:
    if not log:
        return FailureRecord(
            failure_stage="plan_parse", failure_kind="empty_plan",
            failure_message="the planner proposed no candidate action sets",
            repair_instruction="Return at least one executable candidate action set.")
    deepest = max(log, key=lambda e: _STAGE_ORDER.get(e.stage or "apply", 2))
    stage = deepest.stage or "apply"
    message = "; ".join(
        f"candidate {e.index}: [{e.stage}/{e.kind}] {e.message}" for e in log)
    return FailureRecord(
        failure_stage=stage,
        failure_kind=deepest.kind or "unknown",
        failure_message=message,
        repair_instruction=_REPAIR_HINTS.get(stage, "Revise the proposed edit."),
    )
