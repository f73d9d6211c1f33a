"""Declarative prompt checks evaluated against (state, instance, incumbent).

Each prompt-catalog entry ships its checks as small JSON predicates;
domain metrics are scenario-registered callables behind metric checks.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Any, Callable, Mapping

from ..keys import coerce_key, flat_key
from ..model.types import Instance, ModelState
from ..solve.types import SolveResult

CHECK_TOLERANCE = 1e-6

MetricFn = Callable[[ModelState, Instance, SolveResult], float]
_METRICS: dict[str, MetricFn] = {}


def register_metric(name: str, fn: MetricFn) -> None:
    _METRICS[name] = fn


def get_metric(name: str):
    return _METRICS.get(name)


@dataclass(frozen=True)
class CheckResult:
    ok: bool
    message: str


@dataclass(frozen=True)
class PromptCheck:
    kind: str
    spec: Mapping[str, Any]

    def to_doc(self) -> dict:
        return {"kind": self.kind, **{k: v for k, v in self.spec.items()}}

    @staticmethod
    def from_doc(doc: Mapping) -> "PromptCheck":
        if "kind" not in doc:
            raise ValueError(f"prompt check needs a kind: {doc!r}")
        return PromptCheck(kind=str(doc["kind"]),
                           spec={k: v for k, v in doc.items() if k != "kind"})


def parse_checks(docs) -> tuple[PromptCheck, ...]:
    return tuple(PromptCheck.from_doc(d) for d in docs or ())


def _var_value(check: PromptCheck, result: SolveResult) -> float:
    key = flat_key(str(check.spec["target"]), coerce_key(check.spec["index"]))
    if result.assignment is None or key not in result.assignment:
        raise KeyError(key)
    return float(result.assignment[key])


def _pattern_sum(pattern: str, result: SolveResult) -> float:
    rx = re.compile(pattern)
    return sum(v for k, v in (result.assignment or {}).items() if rx.search(k))


def evaluate_check(check: PromptCheck, state: ModelState, instance: Instance,
                   result: SolveResult, tol: float = CHECK_TOLERANCE) -> CheckResult:
    kind, spec = check.kind, check.spec
    try:
        if kind in ("var_at_most", "var_at_least", "var_equals"):
            value = _var_value(check, result)
            bound = float(spec["value"])
            ok = (value <= bound + tol if kind == "var_at_most"
                  else value >= bound - tol if kind == "var_at_least"
                  else abs(value - bound) <= tol)
            return CheckResult(ok, f"{kind}: {spec['target']}{tuple(spec['index'])} = {value} vs {bound}")
        if kind == "param_equals":
            entry = state.parameters.get(str(spec.get("target", spec.get("name"))))
            if entry is None:
                return CheckResult(False, f"param_equals: no parameter {spec!r}")
            if spec.get("key") is not None:
                current = entry.value.get(coerce_key(spec["key"]))
                if current is None:
                    return CheckResult(False, f"param_equals: no key {spec['key']}")
            else:
                current = entry.value
            ok = abs(float(current) - float(spec["value"])) <= tol
            return CheckResult(ok, f"param_equals: {current} vs {spec['value']}")
        if kind == "obj_at_most":
            ok = result.objective is not None and result.objective <= float(spec["value"]) + tol
            return CheckResult(ok, f"obj_at_most: {result.objective} vs {spec['value']}")
        if kind in ("pattern_sum_at_most", "pattern_sum_at_least"):
            total = _pattern_sum(str(spec["pattern"]), result)
            bound = float(spec["value"])
            ok = total <= bound + tol if kind.endswith("at_most") else total >= bound - tol
            return CheckResult(ok, f"{kind}: {total} vs {bound} over {spec['pattern']!r}")
        if kind == "linear_at_most":
            assignment = result.assignment or {}
            total = sum(float(w) * assignment.get(k, 0.0) for k, w in spec["terms"])
            ok = total <= float(spec["value"]) + tol
            return CheckResult(ok, f"linear_at_most: {total} vs {spec['value']}")
        if kind in ("metric_at_least", "fulfillment_at_least"):
            metric = str(spec.get("metric", "fulfillment"))
            fn = _METRICS.get(metric)
            if fn is None:
                return CheckResult(False, f"metric {metric!r} is not registered")
            value = fn(state, instance, result)
            ok = value >= float(spec["value"]) - tol
            return CheckResult(ok, f"{metric}: {value} vs {spec['value']}")
    except (KeyError, TypeError, ValueError) as exc:
        return CheckResult(False, f"{kind}: not evaluable ({exc})")
    return CheckResult(False, f"unknown check kind {kind!r}")


def evaluate_checks(checks, state, instance, result,
                    tol: float = CHECK_TOLERANCE) -> list[CheckResult]:
    """All check results; the incumbent satisfies the prompt iff every ok."""
    return [evaluate_check(c, state, instance, result, tol) for c in checks]
