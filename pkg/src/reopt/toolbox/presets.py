"""Named tuned-configuration presets.

A preset is a flat ``key = value`` text file named ``<preset>.prm`` whose
keys are SolverConfig fields; loading merges it over the defaults.
"""

from __future__ import annotations

import importlib.resources
from pathlib import Path
from typing import Iterable, Optional

from ..errors import UnknownPreset
from ..solve.types import SolverConfig

_FIELD_TYPES = {
    "time_limit": float,
    "mip_gap_tolerance": float,
    "feasibility_tolerance": float,
    "node_selection": str,
    "branching": str,
    "random_seed": int,
}


def parse_preset(text: str, name: str) -> dict:
    values: dict = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#")[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise UnknownPreset(f"preset {name!r} line {lineno}: expected key = value")
        key, _, value = (part.strip() for part in line.partition("="))
        if key not in _FIELD_TYPES:
            raise UnknownPreset(f"preset {name!r} has unknown field {key!r}")
        values[key] = _FIELD_TYPES[key](value)
    return values


def _builtin_preset_text(name: str) -> Optional[str]:
    resource = importlib.resources.files("reopt.data").joinpath(f"presets/{name}.prm")
    try:
        return resource.read_text()
    except (FileNotFoundError, ModuleNotFoundError):
        return None


def load_preset(name: str, search_paths: Iterable[str] = (),
                base: SolverConfig | None = None) -> SolverConfig:
    """Find ``<name>.prm`` in the search paths or the shipped presets and
    merge it over ``base`` (defaults when omitted)."""
    text = None
    for root in search_paths:
        candidate = Path(root) / f"{name}.prm"
        if candidate.is_file():
            text = candidate.read_text()
            break
    if text is None:
        text = _builtin_preset_text(name)
    if text is None:
        raise UnknownPreset(f"no preset named {name!r}")
    values = parse_preset(text, name)
    base = base or SolverConfig()
    return base.merged(preset_name=name, **values)
