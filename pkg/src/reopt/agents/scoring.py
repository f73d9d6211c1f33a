"""Reference-based scoring: failure-mode classification and the nested
success criteria.

Update correctness is judged semantically: the applied action set and the
reference edit must yield identical instances, not identical patch text.
"""

from __future__ import annotations

from typing import Optional, Sequence

from ..errors import ReoptError
from ..model.instantiate import instantiate
from ..model.types import ModelState
from ..patch.apply import apply_action_set
from ..patch.normalize import normalize_action_set
from ..patch.types import ActionSet
from ..solve.feasibility import check_feasible
from .checks import PromptCheck, evaluate_checks
from .records import CaseScore, StepOutcome
from .validation import patch_targets


def states_equivalent(a: ModelState, b: ModelState) -> bool:
    try:
        return instantiate(a) == instantiate(b)
    except ReoptError:
        return False


def apply_reference(state: ModelState, reference_actions: ActionSet) -> ModelState:
    normalized = normalize_action_set(reference_actions, state)
    new_state, _ = apply_action_set(state, normalized)
    return new_state


def classify_failure(candidate_log, outcome: StepOutcome,
                     reference_targets: Optional[Sequence[str]] = None,
                     update_correct: Optional[bool] = None) -> frozenset[str]:
    """Map a run's records onto the failure-mode taxonomy (modes are not
    mutually exclusive)."""
    modes: set[str] = set()
    for entry in candidate_log:
        if entry.stage in ("plan_parse", "normalize", "apply"):
            modes.add("invalid_patch")
        elif entry.stage == "solve" and entry.kind == "no_incumbent":
            modes.add("no_incumbent")
        elif entry.stage == "prompt_check":
            modes.add("prompt_violation")
    if not outcome.succeeded:
        modes.add("missing_output")
    if reference_targets is not None:
        expected = set(reference_targets)
        attempted: set[str] = set()
        for entry in candidate_log:
            attempted.update(entry.targets)
        if outcome.applied_action_set is not None:
            attempted.update(patch_targets(outcome.applied_action_set))
        if attempted - expected:
            modes.add("wrong_component")
    if update_correct is False and outcome.succeeded:
        modes.add("bad_update")
    return frozenset(modes)


def score_case(outcome: StepOutcome, loop_state: ModelState, base_state: ModelState,
               reference_actions: ActionSet,
               prompt_checks: Sequence[PromptCheck] = (),
               feasibility_tolerance: float = 1e-6) -> CaseScore:
    """Score one closed-loop run against its reference edit and checks."""
    update_correct = False
    if outcome.succeeded:
        try:
            reference_state = apply_reference(base_state, reference_actions)
            update_correct = states_equivalent(reference_state, loop_state)
        except ReoptError:
            update_correct = False

    prompt_satisfied = False
    if update_correct and outcome.solution is not None and outcome.solution.has_incumbent:
        instance = instantiate(loop_state)
        feasible = not check_feasible(instance, outcome.solution.assignment,
                                      feasibility_tolerance)
        checks_ok = all(r.ok for r in evaluate_checks(
            prompt_checks, loop_state, instance, outcome.solution))
        prompt_satisfied = feasible and checks_ok

    final_success = prompt_satisfied
    first_attempt_success = final_success and outcome.attempts_used == 1
    modes = classify_failure(
        outcome.candidate_log, outcome,
        reference_targets=patch_targets(reference_actions),
        update_correct=update_correct)
    return CaseScore(
        update_correct=update_correct,
        prompt_satisfied=prompt_satisfied,
        first_attempt_success=first_attempt_success,
        final_success=final_success,
        failure_modes=modes,
    )
