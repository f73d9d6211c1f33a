"""Planner-output document parsing."""

from __future__ import annotations

from typing import Mapping

from ..errors import MalformedDocument, MissingKey, NoObjectFound
from ..jsontools import extract_json
from .types import INTENTIONS, ActionSet, PlannerOutput


def planner_output_from_doc(doc: Mapping) -> PlannerOutput:
    if "edit_summary" not in doc:
        raise MissingKey("edit_summary")
    if "candidate_action_sets" in doc:
        raw_sets = doc["candidate_action_sets"] or []
    elif "actions" in doc:
        # flat form: one implicit candidate set
        raw_sets = [{"actions": doc["actions"]}]
    else:
        raise MissingKey("candidate_action_sets")
    affected = {
        str(k): tuple(str(x) for x in (v if isinstance(v, (list, tuple)) else [v]))
        for k, v in (doc.get("affected_sets") or {}).items()
    }
    hints = {str(k): str(v) for k, v in (doc.get("planning_hints") or {}).items()}
    intention = doc.get("intention")
    return PlannerOutput(
        edit_summary=str(doc["edit_summary"]),
        candidate_action_sets=tuple(ActionSet.from_doc(s) for s in raw_sets),
        affected_sets=affected,
        relevant_components=tuple(str(c) for c in (doc.get("relevant_components") or [])),
        planning_hints=hints,
        intention=intention if intention in INTENTIONS else None,
    )


def parse_planner_output(document: str) -> PlannerOutput:
    """Parse raw planner text: strip fences, locate the outermost object,
    map required keys. Missing optional keys default to empty."""
    try:
        doc = extract_json(document)
    except NoObjectFound as exc:
        raise MalformedDocument(str(exc)) from exc
    return planner_output_from_doc(doc)
