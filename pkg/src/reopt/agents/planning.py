"""Planner invocation: assemble request, call the contract, parse."""

from __future__ import annotations

from typing import Callable, Optional

from ..errors import MalformedDocument, MissingKey, PlannerFailure, ReoptError, UnknownOp
from ..gateway.prompts import assemble_planner_prompt
from ..gateway.types import ChatRequest
from ..model.render import render_for_planner
from ..model.types import ModelState
from ..patch.parse import parse_planner_output
from ..patch.types import PlannerOutput
from .records import FailureRecord

Planner = Callable[[ChatRequest], str]


def plan(delta: str, state: ModelState, repair_context: Optional[FailureRecord],
         planner: Planner, framing: Optional[str] = None,
         index_cap: int = 200) -> PlannerOutput:
    """One planning pass. Wraps transport/parse problems in PlannerFailure."""
    render = render_for_planner(state, index_cap=index_cap)
    request = assemble_planner_prompt(render, delta, repair=repair_context, framing=framing)
    try:
        text = planner(request)
    except ReoptError as exc:
        raise PlannerFailure(f"planner call failed: {exc}") from exc
    try:
        return parse_planner_output(text)
    except (MalformedDocument, MissingKey, UnknownOp) as exc:
        raise PlannerFailure(f"planner output unusable: {exc}") from exc
