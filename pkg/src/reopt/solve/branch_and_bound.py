"""Exact branch-and-bound over the LP relaxation.

Single-threaded and deterministic: no randomness, heap ties broken by
insertion order. A feasible warm start becomes the initial incumbent;
an infeasible or partial one only steers branching direction.
"""

from __future__ import annotations

import heapq
import math
import time
from typing import Callable, Optional

import numpy as np

from ..errors import NumericalFailure
from ..model.types import Instance
from .feasibility import check_feasible
from .lp import LPData, lp_data_from_instance, snap_integers, solve_lp, solve_lp_arrays
from .types import SolveResult, SolverConfig, WarmStart, relative_gap

_PRUNE_EPS = 1e-10


def _install_warm_start(instance: Instance, data: LPData, warm_start: WarmStart,
                        tol: float):
    """Returns (incumbent x or None, branching hints)."""
    positions = {k: i for i, k in enumerate(data.keys)}
    values = {k: float(v) for k, v in warm_start.values.items() if k in positions}
    if len(values) == len(data.keys):
        if not check_feasible(instance, values, tol):
            x = snap_integers(data, np.array([values[k] for k in data.keys]), tol)
            return x, {}
    return None, {positions[k]: v for k, v in values.items()}


def solve_mip(instance: Instance, config: SolverConfig | None = None,
              warm_start: Optional[WarmStart] = None,
              stop: Optional[Callable[[], bool]] = None) -> SolveResult:
    config = config or SolverConfig()
    data = lp_data_from_instance(instance)
    if not data.integer_mask.any():
        return solve_lp(instance, config)

    start = time.perf_counter()
    deadline = start + config.time_limit
    tol = config.feasibility_tolerance

    incumbent_x: Optional[np.ndarray] = None
    incumbent_obj = math.inf
    hints: dict[int, float] = {}
    if warm_start is not None:
        incumbent_x, hints = _install_warm_start(instance, data, warm_start, tol)
        if incumbent_x is not None:
            incumbent_obj = float(data.c @ incumbent_x)

    # node = (bound, seq, lower, upper); bound is the parent LP objective
    seq = 0
    open_nodes: list = [(-math.inf, seq, data.lower.copy(), data.upper.copy())]
    use_heap = config.node_selection == "best_bound"
    node_count = 0
    interrupted = False
    stop_bound: Optional[float] = None  # valid global bound recorded at early stop

    def prune_cut() -> float:
        return incumbent_obj - _PRUNE_EPS * max(1.0, abs(incumbent_obj))

    while open_nodes:
        if (stop is not None and stop()) or time.perf_counter() > deadline:
            interrupted = True
            break
        if use_heap:
            bound, _, lower, upper = heapq.heappop(open_nodes)
            if bound >= prune_cut():
                # heap is bound-ordered: every remaining node prunes too
                stop_bound = incumbent_obj if incumbent_x is not None else bound
                open_nodes = []
                break
            if incumbent_x is not None and relative_gap(incumbent_obj, bound) <= config.mip_gap_tolerance and bound > -math.inf:
                stop_bound = bound
                open_nodes = []
                break
        else:
            bound, _, lower, upper = open_nodes.pop()
            if bound >= prune_cut():
                continue

        try:
            out = solve_lp_arrays(data, lower, upper, max(deadline - time.perf_counter(), 1e-3))
        except NumericalFailure:
            if time.perf_counter() > deadline:
                interrupted = True
                break
            raise
        node_count += 1
        if out.status == "unbounded":
            if node_count == 1:
                return SolveResult("unbounded", None, None, None, None,
                                   time.perf_counter() - start, node_count)
            raise NumericalFailure("child node unbounded under a bounded root")
        if out.status == "infeasible":
            continue
        obj = float(out.objective)
        if obj >= prune_cut():
            continue
        x = out.x
        fractional = [
            int(j) for j in np.where(data.integer_mask)[0]
            if abs(x[j] - round(x[j])) > tol
        ]
        if not fractional:
            xs = snap_integers(data, x, tol)
            incumbent_x = xs
            incumbent_obj = float(data.c @ xs)
            continue

        # most-fractional branching; ties to the lowest variable index
        j = max(fractional, key=lambda k: (min(x[k] - math.floor(x[k]),
                                               math.ceil(x[k]) - x[k]), -k))
        floor_v = math.floor(x[j])
        down_upper = upper.copy()
        down_upper[j] = floor_v
        up_lower = lower.copy()
        up_lower[j] = floor_v + 1

        hint = hints.get(j)
        if hint is not None:
            down_first = hint <= floor_v
        else:
            down_first = (x[j] - floor_v) <= 0.5
        children = [(lower.copy(), down_upper), (up_lower, upper.copy())]
        if not down_first:
            children.reverse()
        if use_heap:
            for lo, hi in children:
                seq += 1
                heapq.heappush(open_nodes, (obj, seq, lo, hi))
        else:
            # stack pops from the end: push the preferred child last
            for lo, hi in reversed(children):
                seq += 1
                open_nodes.append((obj, seq, lo, hi))

    wall = time.perf_counter() - start
    if interrupted:
        if incumbent_x is None:
            return SolveResult("no_incumbent", None, None, None, None, wall, node_count)
        open_bounds = [n[0] for n in open_nodes if n[0] > -math.inf]
        best_bound = min(open_bounds) if open_bounds else incumbent_obj
        best_bound = min(best_bound, incumbent_obj)
        gap = relative_gap(incumbent_obj, best_bound)
        status = "feasible_time_limit"
        return SolveResult(status, _assignment(data, incumbent_x), incumbent_obj,
                           best_bound, gap, wall, node_count)

    if incumbent_x is None:
        return SolveResult("infeasible", None, None, None, None, wall, node_count)
    best_bound = incumbent_obj if stop_bound is None else min(stop_bound, incumbent_obj)
    gap = relative_gap(incumbent_obj, best_bound)
    return SolveResult("optimal", _assignment(data, incumbent_x), incumbent_obj,
                       best_bound, gap, wall, node_count)


def _assignment(data: LPData, x: np.ndarray) -> dict[str, float]:
    return {k: float(v) for k, v in zip(data.keys, x)}
