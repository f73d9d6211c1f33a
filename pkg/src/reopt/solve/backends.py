"""Named solver backends behind one observable contract.

A backend is any callable ``(instance, config, warm_start=None, stop=None)
-> SolveResult`` matching the built-in kernel's behavior. Alternate
backends (external solvers, test doubles) register under a name.
"""

from __future__ import annotations

from typing import Callable, Optional

from ..errors import BackendUnavailable
from ..model.types import Instance
from .branch_and_bound import solve_mip
from .types import SolveResult, SolverConfig, WarmStart

Backend = Callable[..., SolveResult]

_BACKENDS: dict[str, Backend] = {"builtin": solve_mip}


def register_backend(name: str, backend: Backend) -> None:
    _BACKENDS[name] = backend


def available_backends() -> tuple[str, ...]:
    return tuple(sorted(_BACKENDS))


def get_backend(name: str) -> Backend:
    if name not in _BACKENDS:
        raise BackendUnavailable(f"no solver backend named {name!r}")
    return _BACKENDS[name]


def solve(instance: Instance, config: SolverConfig | None = None,
          warm_start: Optional[WarmStart] = None, backend: str = "builtin",
          stop=None) -> SolveResult:
    return get_backend(backend)(instance, config, warm_start=warm_start, stop=stop)
