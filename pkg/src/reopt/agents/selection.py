"""Strategy selection: LLM-backed or the deterministic fallback.

Whatever the selector returns, the result is catalog-legal; illegal or
unusable output is coerced to scratch with a logged warning.
"""

from __future__ import annotations

import logging
from typing import Callable, Mapping, Optional

from ..errors import NoObjectFound, ReoptError
from ..gateway.prompts import assemble_selector_prompt
from ..gateway.types import ChatRequest
from ..jsontools import extract_json
from ..model.types import ModelState
from ..ops import STRUCTURAL_OPS
from ..toolbox.catalog import StrategyCatalog
from .records import StrategyChoice

log = logging.getLogger(__name__)

Selector = Callable[[ChatRequest], str]

_TOOLBOX_PLANS = {
    "warm": ("direct_warm_start",),
    "warm+tuned": ("direct_warm_start", "load_preset"),
    "tuned": ("load_preset",),
    "scratch": (),
    "heuristic_warm": ("heuristic_warm_start",),
    "fix_and_release": ("fix_and_release",),
}


def derive_hints(action_sets, hints: Optional[Mapping[str, str]]) -> dict[str, str]:
    out = dict(hints or {})
    if "edit_scope" not in out:
        structural = any(p.op in STRUCTURAL_OPS
                         for a in action_sets for p in a.actions)
        out["edit_scope"] = "structural" if structural else "local"
    return out


def fallback_choice(catalog: StrategyCatalog, hints: Mapping[str, str]) -> StrategyChoice:
    """Deterministic preference order: warm+tuned for reuse-friendly local
    edits, warm for local edits, tuned/scratch for structural ones."""
    available = set(catalog.available_names())
    scope = hints.get("edit_scope", "local")
    reuse = hints.get("expected_reuse", "")
    if scope == "structural":
        if "tuned" in available:
            return StrategyChoice("tuned", _TOOLBOX_PLANS["tuned"],
                                  "structural edit: tuned configuration without warm reuse")
        return StrategyChoice("scratch", (), "structural edit: plain re-solve")
    if "warm+tuned" in available and reuse == "high":
        return StrategyChoice("warm+tuned", _TOOLBOX_PLANS["warm+tuned"],
                              "local edit with high expected reuse: warm start plus tuned preset")
    if "warm" in available:
        return StrategyChoice("warm", _TOOLBOX_PLANS["warm"],
                              "local edit: prior-solution reuse via warm start")
    if "tuned" in available:
        return StrategyChoice("tuned", _TOOLBOX_PLANS["tuned"],
                              "no prior solution: tuned configuration")
    return StrategyChoice("scratch", (), "no prior solution or preset: plain solve")


def select_strategy(action_sets, relevant_components, state: ModelState,
                    prior_solution, catalog: StrategyCatalog,
                    selector: Optional[Selector] = None,
                    hints: Optional[Mapping[str, str]] = None) -> StrategyChoice:
    hints = derive_hints(action_sets, hints)
    if selector is None:
        return fallback_choice(catalog, hints)
    request = assemble_selector_prompt(
        action_sets, catalog, hints=hints,
        prior_available=prior_solution is not None)
    try:
        doc = extract_json(selector(request))
        choice = StrategyChoice(
            solve_strategy=str(doc["solve_strategy"]),
            toolbox_plan=tuple(str(t) for t in doc.get("toolbox_plan", ())),
            rationale=str(doc.get("rationale", "")),
            confidence=doc.get("confidence"),
        )
    except (ReoptError, NoObjectFound, KeyError, TypeError, ValueError) as exc:
        log.warning("selector output unusable (%s); coercing to scratch", exc)
        return StrategyChoice("scratch", (), f"selector output unusable: {exc}")
    if not catalog.is_available(choice.solve_strategy):
        log.warning("selector chose unavailable strategy %r; coercing to scratch",
                    choice.solve_strategy)
        return StrategyChoice("scratch", (),
                              f"coerced: {choice.solve_strategy!r} not in catalog")
    return choice
