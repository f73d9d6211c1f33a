"""Scenario resolution: packaged names, file paths, or inline documents.

A scenario file is a state document plus optional decorations: a preset
name, a mock-script reference, heuristic names, and planner framing text.
"""

from __future__ import annotations

import importlib.resources
import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Mapping, Optional, Union

from ..errors import UnknownPreset, UnknownScenario
from ..gateway.mock import MockScript
from ..model.io import state_from_doc
from ..model.types import ModelState
from ..solve.types import SolverConfig
from ..toolbox import HEURISTIC_BUILDERS
from ..toolbox.presets import load_preset


@dataclass(frozen=True)
class Scenario:
    name: str
    state: ModelState
    preset: Optional[str] = None
    mock_script: Optional[str] = None
    heuristics: tuple[str, ...] = ()
    framing: Optional[str] = None
    base_dir: Optional[Path] = None
    doc: Mapping = field(default_factory=dict)

    def tuned_config(self, base: SolverConfig | None = None) -> Optional[SolverConfig]:
        if self.preset is None:
            return None
        paths = [str(self.base_dir)] if self.base_dir else []
        try:
            return load_preset(self.preset, search_paths=paths, base=base)
        except UnknownPreset:
            return None

    def heuristic_builders(self) -> dict:
        return {name: HEURISTIC_BUILDERS[name]
                for name in self.heuristics if name in HEURISTIC_BUILDERS}

    def mock(self) -> Optional[MockScript]:
        if not self.mock_script:
            return None
        ref = self.mock_script
        if self.base_dir is not None:
            local = self.base_dir / f"{ref}.json"
            if local.is_file():
                return MockScript.from_file(local)
            if Path(ref).is_file():
                return MockScript.from_file(ref)
        resource = importlib.resources.files("reopt.data").joinpath(f"mock/{ref}.json")
        try:
            return MockScript.from_doc(json.loads(resource.read_text()))
        except FileNotFoundError:
            return None


def _scenario_from_doc(doc: Mapping, name: str, base_dir: Optional[Path]) -> Scenario:
    return Scenario(
        name=str(doc.get("scenario_name", name)),
        state=state_from_doc(doc),
        preset=doc.get("preset"),
        mock_script=doc.get("mock_script"),
        heuristics=tuple(doc.get("heuristics", ())),
        framing=doc.get("framing"),
        base_dir=base_dir,
        doc=doc,
    )


def packaged_scenario_names() -> tuple[str, ...]:
    root = importlib.resources.files("reopt.data").joinpath("scenarios")
    return tuple(sorted(p.name[:-5] for p in root.iterdir() if p.name.endswith(".json")))


def load_scenario(ref: Union[str, Path, Mapping]) -> Scenario:
    """Accepts an inline document, a file path, or a packaged scenario name."""
    if isinstance(ref, Mapping):
        return _scenario_from_doc(ref, name="inline", base_dir=None)
    path = Path(ref)
    if path.is_file():
        doc = json.loads(path.read_text())
        return _scenario_from_doc(doc, name=path.stem, base_dir=path.parent)
    resource = importlib.resources.files("reopt.data").joinpath(f"scenarios/{ref}.json")
    try:
        text = resource.read_text()
    except FileNotFoundError:
        raise UnknownScenario(
            f"no scenario file or packaged scenario named {ref!r} "
            f"(packaged: {', '.join(packaged_scenario_names())})") from None
    return _scenario_from_doc(json.loads(text), name=str(ref), base_dir=None)


def load_catalog(ref: Union[str, Path]) -> list[dict]:
    """A catalog is a JSON list of {prompt_id, delta, reference_actions,
    prompt_checks, domain_metrics?} entries."""
    path = Path(ref)
    if path.is_file():
        doc = json.loads(path.read_text())
    else:
        resource = importlib.resources.files("reopt.data").joinpath(f"catalogs/{ref}.json")
        try:
            doc = json.loads(resource.read_text())
        except FileNotFoundError:
            raise UnknownScenario(f"no catalog file or packaged catalog named {ref!r}") from None
    if not isinstance(doc, list):
        raise UnknownScenario("catalog must be a JSON list of prompt entries")
    errors = []
    for i, entry in enumerate(doc):
        for key in ("prompt_id", "delta"):
            if key not in entry:
                errors.append(f"entry {i}: missing {key!r}")
    if errors:
        raise UnknownScenario("malformed catalog: " + "; ".join(errors))
    return doc
