"""Four-stage exam warm-start construction.

Builds a total injective block-to-slot assignment: pin reserved slots,
front-load large exams before the cutoff, fill capped days cheapest-first
without breaching the cap, then fall back to the cached base assignment.
Every sort breaks ties by ascending block id.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping

from ..errors import InfeasibleInput

Slot = int  # slots are ordered positions; lower means earlier


@dataclass(frozen=True)
class ExamWarmStartParams:
    enrollment: Mapping[str, int]              # block -> students (virtual blocks: 0)
    slots: tuple[Slot, ...]                    # ordered slot universe
    days: Mapping[str, tuple[Slot, ...]]       # day id -> its slots (a partition)
    reserved_map: Mapping[str, Slot] = field(default_factory=dict)
    large_threshold: float = float("inf")
    cutoff: Slot = 0
    day_caps: Mapping[str, float] = field(default_factory=dict)
    base_assignment: Mapping[str, Slot] = field(default_factory=dict)

    def __post_init__(self):
        slots = set(self.slots)
        day_slots = [s for ds in self.days.values() for s in ds]
        if sorted(day_slots) != sorted(slots):
            raise ValueError("day slots must partition the slot set")
        pins = list(self.reserved_map.values())
        if len(pins) != len(set(pins)):
            raise ValueError("reserved slots must be distinct")
        if any(s not in slots for s in pins):
            raise ValueError("reserved slot outside the slot set")
        missing = set(self.enrollment) - set(self.base_assignment)
        if missing:
            raise ValueError(f"base assignment misses blocks: {sorted(missing)[:5]}")


def exam_heuristic_warm_start(params: ExamWarmStartParams) -> dict[str, Slot]:
    blocks = sorted(params.enrollment)
    if len(blocks) > len(params.slots):
        raise InfeasibleInput(
            f"{len(blocks)} blocks cannot fit into {len(params.slots)} slots")
    e = {b: params.enrollment[b] for b in blocks}
    assignment: dict[str, Slot] = {}
    free: set[Slot] = set(params.slots)

    def place(block: str, slot: Slot):
        assignment[block] = slot
        free.discard(slot)

    # Stage 1: pin reserved slots
    for block in sorted(params.reserved_map):
        place(block, params.reserved_map[block])

    # Stage 2: front-load large exams
    large = [b for b in blocks if b not in assignment and e[b] >= params.large_threshold]
    for block in sorted(large, key=lambda b: (-e[b], b)):
        pre_cutoff = {s for s in free if s < params.cutoff}
        if pre_cutoff:
            place(block, min(pre_cutoff))

    # Stage 3: enforce day-load caps
    for day in sorted(params.day_caps):
        day_slots = set(params.days.get(day, ()))
        load = sum(e[b] for b, s in assignment.items() if s in day_slots)
        for block in sorted((b for b in blocks if b not in assignment),
                            key=lambda b: (e[b], b)):
            open_slots = free & day_slots
            if not open_slots or load + e[block] > params.day_caps[day]:
                break
            place(block, min(open_slots))
            load += e[block]

    # Stage 4: default placement at the base assignment
    for block in blocks:
        if block in assignment:
            continue
        base = params.base_assignment[block]
        place(block, base if base in free else min(free))

    return assignment


def params_from_state(state, prior: Mapping[str, float],
                      var_family: str = "assign") -> ExamWarmStartParams:
    """Derive heuristic parameters from the exam-scenario conventions.

    Expects the parameters ``block_enrollment``, ``slot_order``,
    ``slots_per_day``, ``large_threshold``, ``frontload_cutoff``,
    ``reserved_map``, and ``day_caps``; slot positions are 1-based
    indices into ``slot_order``. The base assignment comes from the
    prior incumbent's active assignment variables.
    """
    from ..keys import split_flat_key

    def param(name: str, default=None):
        entry = state.parameters.get(name)
        if entry is None:
            if default is None:
                raise KeyError(f"exam heuristic needs parameter {name!r}")
            return default
        return entry.value

    slot_ids = [k[0] for k in param("slot_order")]
    position = {s: i + 1 for i, s in enumerate(slot_ids)}
    per_day = int(param("slots_per_day", 3.0))
    days = {
        str(d + 1): tuple(range(d * per_day + 1, min((d + 1) * per_day, len(slot_ids)) + 1))
        for d in range((len(slot_ids) + per_day - 1) // per_day)
    }
    enrollment = {k[0]: int(v) for k, v in param("block_enrollment").items()}
    base: dict[str, int] = {}
    for key, value in prior.items():
        family, idx = split_flat_key(key)
        if family == var_family and len(idx) == 2 and value > 0.5 and idx[0] in enrollment:
            base[idx[0]] = position.get(idx[1], 1)
    for block in enrollment:
        base.setdefault(block, 1)
    return ExamWarmStartParams(
        enrollment=enrollment,
        slots=tuple(range(1, len(slot_ids) + 1)),
        days=days,
        reserved_map={k[0]: int(v) for k, v in param("reserved_map", {}).items()},
        large_threshold=float(param("large_threshold", float("inf"))),
        cutoff=int(param("frontload_cutoff", 0.0)),
        day_caps={str(int(float(k[0]))): float(v)
                  for k, v in param("day_caps", {}).items()},
        base_assignment=base,
    )


def build_exam_warm_start(state, prior: Mapping[str, float], instance):
    """Heuristic-warm-start builder wired into the strategy toolbox."""
    from ..keys import flat_key
    from ..solve.types import WarmStart

    var_family = next(
        (f.name for f in state.variable_families.values()
         if f.var_type == "binary" and f.index_set and len(f.index_set[0]) == 2),
        "assign")
    params = params_from_state(state, prior, var_family=var_family)
    placement = exam_heuristic_warm_start(params)
    slot_ids = [k[0] for k in state.parameters["slot_order"].value]
    chosen = {(block, slot_ids[pos - 1]) for block, pos in placement.items()}
    values = {
        v.key: 1.0 if split_pair(v.key) in chosen else 0.0
        for v in instance.variables
        if v.key.startswith(f"{var_family}(")
    }
    return WarmStart(values=values, source_label="heuristic")


def split_pair(key: str) -> tuple[str, str]:
    from ..keys import split_flat_key

    _, idx = split_flat_key(key)
    return (idx[0], idx[1]) if len(idx) == 2 else ("", "")
