"""The strategy catalog the selector chooses from."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, Optional

from ..model.types import ModelState

STRATEGY_DESCRIPTIONS = {
    "warm": "install the prior solution as the solver's starting incumbent",
    "warm+tuned": "prior-solution warm start plus the tuned configuration preset",
    "tuned": "solve from scratch under the tuned configuration preset",
    "scratch": "plain solve with default configuration and no primal reuse",
    "heuristic_warm": "construction-heuristic warm start rebuilt after the edit",
    "fix_and_release": "pin unaffected variables to the prior solution, free the rest",
}

_ORDER = ("warm", "warm+tuned", "tuned", "scratch", "heuristic_warm", "fix_and_release")


@dataclass(frozen=True)
class CatalogEntry:
    name: str
    available: bool
    description: str


@dataclass(frozen=True)
class StrategyCatalog:
    entries: tuple[CatalogEntry, ...]

    def available_names(self) -> tuple[str, ...]:
        return tuple(e.name for e in self.entries if e.available)

    def is_available(self, name: str) -> bool:
        return name in self.available_names()


def list_strategies(state: ModelState,
                    prior: Optional[Mapping[str, float]] = None,
                    preset_name: Optional[str] = None,
                    heuristics: tuple[str, ...] = ()) -> StrategyCatalog:
    """Evaluate availability predicates; scratch is always offered."""
    has_prior = prior is not None and len(prior) > 0
    has_preset = preset_name is not None
    available = {
        "warm": has_prior,
        "warm+tuned": has_prior and has_preset,
        "tuned": has_preset,
        "scratch": True,
        "heuristic_warm": bool(heuristics) and has_prior,
        "fix_and_release": has_prior,
    }
    entries = []
    for name in _ORDER:
        desc = STRATEGY_DESCRIPTIONS[name]
        if name in ("warm+tuned", "tuned") and has_preset:
            desc += f" (preset {preset_name!r})"
        entries.append(CatalogEntry(name, available[name], desc))
    return StrategyCatalog(entries=tuple(entries))
