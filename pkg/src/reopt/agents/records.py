"""Typed records flowing through the closed loop."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, Optional

from ..patch.types import ActionSet
from ..solve.types import SolveResult

STAGES = ("plan_parse", "normalize", "apply", "solve", "prompt_check")

FAILURE_MODES = (
    "wrong_component",
    "invalid_patch",
    "bad_update",
    "no_incumbent",
    "prompt_violation",
    "missing_output",
)


@dataclass(frozen=True)
class FailureRecord:
    """Typed failure context fed back to the planner on retry."""

    failure_stage: str
    failure_kind: str
    failure_message: str
    repair_instruction: str = ""
    attempt_history: tuple[tuple[str, str, str], ...] = ()

    def __post_init__(self):
        if self.failure_stage not in STAGES:
            raise ValueError(f"failure_stage must be one of {STAGES}")

    def to_doc(self) -> dict:
        return {
            "failure_stage": self.failure_stage,
            "failure_kind": self.failure_kind,
            "failure_message": self.failure_message,
            "repair_instruction": self.repair_instruction,
            "attempt_history": [list(t) for t in self.attempt_history],
        }

    @staticmethod
    def from_doc(doc: Mapping) -> "FailureRecord":
        return FailureRecord(
            failure_stage=doc["failure_stage"],
            failure_kind=doc.get("failure_kind", ""),
            failure_message=doc.get("failure_message", ""),
            repair_instruction=doc.get("repair_instruction", ""),
            attempt_history=tuple(tuple(t) for t in doc.get("attempt_history", [])),
        )


@dataclass(frozen=True)
class StrategyChoice:
    solve_strategy: str
    toolbox_plan: tuple[str, ...] = ()
    rationale: str = ""
    confidence: Optional[float] = None

    def __post_init__(self):
        if self.confidence is not None and not (0.0 <= self.confidence <= 1.0):
            raise ValueError("confidence must lie in [0,1]")

    def to_doc(self) -> dict:
        return {
            "solve_strategy": self.solve_strategy,
            "toolbox_plan": list(self.toolbox_plan),
            "rationale": self.rationale,
            "confidence": self.confidence,
        }

    @staticmethod
    def from_doc(doc: Mapping) -> "StrategyChoice":
        return StrategyChoice(
            solve_strategy=doc["solve_strategy"],
            toolbox_plan=tuple(doc.get("toolbox_plan", ())),
            rationale=doc.get("rationale", ""),
            confidence=doc.get("confidence"),
        )


@dataclass(frozen=True)
class CandidateLogEntry:
    """One candidate's fate inside one attempt."""

    attempt: int
    index: int
    status: str  # ok | apply_error | solve_error | no_incumbent | prompt_violation
    objective: Optional[float] = None
    stage: Optional[str] = None
    kind: Optional[str] = None
    message: str = ""
    targets: tuple[str, ...] = ()

    def to_doc(self) -> dict:
        return {
            "attempt": self.attempt,
            "index": self.index,
            "status": self.status,
            "objective": self.objective,
            "stage": self.stage,
            "kind": self.kind,
            "message": self.message,
            "targets": list(self.targets),
        }

    @staticmethod
    def from_doc(doc: Mapping) -> "CandidateLogEntry":
        return CandidateLogEntry(
            attempt=int(doc.get("attempt", 1)),
            index=int(doc["index"]),
            status=doc["status"],
            objective=doc.get("objective"),
            stage=doc.get("stage"),
            kind=doc.get("kind"),
            message=doc.get("message", ""),
            targets=tuple(doc.get("targets", ())),
        )


@dataclass(frozen=True)
class StepOutcome:
    status: str  # succeeded | failed_budget_exhausted
    applied_action_set: Optional[ActionSet]
    new_state_version: int
    solution: Optional[SolveResult]
    attempts_used: int
    candidate_log: tuple[CandidateLogEntry, ...] = ()
    failure: Optional[FailureRecord] = None

    @property
    def succeeded(self) -> bool:
        return self.status == "succeeded"

    def to_doc(self) -> dict:
        return {
            "status": self.status,
            "applied_action_set": (self.applied_action_set.to_doc()
                                   if self.applied_action_set else None),
            "new_state_version": self.new_state_version,
            "solution": self.solution.to_doc() if self.solution else None,
            "attempts_used": self.attempts_used,
            "candidate_log": [e.to_doc() for e in self.candidate_log],
            "failure": self.failure.to_doc() if self.failure else None,
        }

    @staticmethod
    def from_doc(doc: Mapping) -> "StepOutcome":
        return StepOutcome(
            status=doc["status"],
            applied_action_set=(ActionSet.from_doc(doc["applied_action_set"])
                                if doc.get("applied_action_set") else None),
            new_state_version=int(doc["new_state_version"]),
            solution=(SolveResult.from_doc(doc["solution"])
                      if doc.get("solution") else None),
            attempts_used=int(doc["attempts_used"]),
            candidate_log=tuple(CandidateLogEntry.from_doc(e)
                                for e in doc.get("candidate_log", [])),
            failure=(FailureRecord.from_doc(doc["failure"])
                     if doc.get("failure") else None),
        )


@dataclass(frozen=True)
class CaseScore:
    """Nested success booleans; the containment chain is enforced."""

    update_correct: bool
    prompt_satisfied: bool
    first_attempt_success: bool
    final_success: bool
    failure_modes: frozenset[str] = frozenset()

    def __post_init__(self):
        if self.final_success and not self.prompt_satisfied:
            raise ValueError("final_success implies prompt_satisfied")
        if self.prompt_satisfied and not self.update_correct:
            raise ValueError("prompt_satisfied implies update_correct")
        if self.first_attempt_success and not self.final_success:
            raise ValueError("first_attempt_success implies final_success")
        unknown = self.failure_modes - set(FAILURE_MODES)
        if unknown:
            raise ValueError(f"unknown failure modes: {sorted(unknown)}")

    def to_doc(self) -> dict:
        return {
            "update_correct": self.update_correct,
            "prompt_satisfied": self.prompt_satisfied,
            "first_attempt_success": self.first_attempt_success,
            "final_success": self.final_success,
            "failure_modes": sorted(self.failure_modes),
        }

    @staticmethod
    def from_doc(doc: Mapping) -> "CaseScore":
        return CaseScore(
            update_correct=bool(doc["update_correct"]),
            prompt_satisfied=bool(doc["prompt_satisfied"]),
            first_attempt_success=bool(doc["first_attempt_success"]),
            final_success=bool(doc["final_success"]),
            failure_modes=frozenset(doc.get("failure_modes", ())),
        )
