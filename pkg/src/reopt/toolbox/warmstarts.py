"""Primal-reuse strategies: direct warm starts and fix-and-release."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping

from ..errors import MissingPriorValue, ReoptError
from ..model.types import Instance
from ..solve.types import WarmStart


@dataclass(frozen=True)
class WarmStartReport:
    warm_start: WarmStart
    coverage: float
    dropped_keys: tuple[str, ...]


def direct_warm_start(prior: Mapping[str, float], instance: Instance) -> WarmStartReport:
    """Intersect a prior assignment with the instance's variables.

    Never fails on mismatch; stale keys are dropped and reported, and
    coverage is the matched fraction of the instance's variables.
    """
    keys = {v.key for v in instance.variables}
    values = {k: float(v) for k, v in prior.items() if k in keys}
    dropped = tuple(sorted(k for k in prior if k not in keys))
    coverage = len(values) / len(keys) if keys else 0.0
    return WarmStartReport(
        warm_start=WarmStart(values=values, source_label="direct"),
        coverage=coverage,
        dropped_keys=dropped,
    )


def fix_and_release(prior: Mapping[str, float], affected_keys, instance: Instance
                    ) -> tuple[WarmStart, dict[str, tuple[float, float]]]:
    """Pin unaffected variables to their prior values, free the affected ones.

    Returns the warm start (the full prior restricted to the instance) and
    the bound overrides implementing the pinning; apply them with
    ``instance.with_bounds``.
    """
    keys = {v.key for v in instance.variables}
    affected = set(affected_keys)
    stray = affected - keys - set(prior)
    if stray:
        raise ReoptError(f"affected keys outside instance and prior: {sorted(stray)[:5]}")
    overrides: dict[str, tuple[float, float]] = {}
    for var in instance.variables:
        if var.key in affected:
            continue
        if var.key not in prior:
            raise MissingPriorValue(f"unaffected variable {var.key} has no prior value")
        value = float(prior[var.key])
        overrides[var.key] = (value, value)
    values = {k: float(v) for k, v in prior.items() if k in keys}
    return WarmStart(values=values, source_label="fix_and_release"), overrides
