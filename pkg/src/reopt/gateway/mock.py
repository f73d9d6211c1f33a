"""Scripted planner/selector doubles.

A mock script maps delta-match rules to per-attempt responses, so the
whole closed loop runs with zero network access. Responses are a
deterministic function of (matched delta, attempt number); the attempt
number is recovered from the assembled request itself.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Mapping, Union

from ..errors import MockScriptError
from .prompts import DELTA_MARKER, REPAIR_PRELUDE
from .types import ChatRequest

_ATTEMPT_LINE = re.compile(r"^- attempt \d+ failure:", re.MULTILINE)


def delta_from_request(request: ChatRequest) -> str:
    marker = request.user.rfind(DELTA_MARKER)
    if marker < 0:
        return request.user
    return request.user[marker + len(DELTA_MARKER):].strip()


def attempt_from_request(request: ChatRequest) -> int:
    if REPAIR_PRELUDE not in request.user:
        return 1
    return 2 + len(_ATTEMPT_LINE.findall(request.user))


@dataclass(frozen=True)
class MockEntry:
    match: str                                   # regex searched over the delta text
    responses: Mapping[str, Union[str, Mapping]]  # attempt number (or "default") -> response

    def response_for(self, attempt: int) -> Union[str, Mapping]:
        key = str(attempt)
        if key in self.responses:
            return self.responses[key]
        if "default" in self.responses:
            return self.responses["default"]
        raise MockScriptError(f"no scripted response for attempt {attempt} of {self.match!r}")


@dataclass(frozen=True)
class MockScript:
    entries: tuple[MockEntry, ...]

    @staticmethod
    def from_doc(doc: Mapping) -> "MockScript":
        return MockScript(entries=tuple(
            MockEntry(match=str(e["match"]), responses=dict(e["responses"]))
            for e in doc.get("entries", [])
        ))

    @staticmethod
    def from_file(path) -> "MockScript":
        return MockScript.from_doc(json.loads(Path(path).read_text()))

    def lookup(self, delta: str, attempt: int) -> str:
        for entry in self.entries:
            if re.search(entry.match, delta):
                response = entry.response_for(attempt)
                return response if isinstance(response, str) else json.dumps(response)
        raise MockScriptError(f"no mock entry matches delta {delta[:80]!r}")


@dataclass
class ScriptedPlanner:
    """Planner contract implementation driven by a MockScript.

    ``calls`` records every request for budget instrumentation.
    """

    script: MockScript
    calls: list = field(default_factory=list)

    def __call__(self, request: ChatRequest) -> str:
        delta = delta_from_request(request)
        attempt = attempt_from_request(request)
        self.calls.append((delta, attempt))
        return self.script.lookup(delta, attempt)


@dataclass
class ScriptedSelector:
    """Selector contract double returning a fixed document per call index."""

    responses: tuple[Union[str, Mapping[str, Any]], ...]
    calls: list = field(default_factory=list)

    def __call__(self, request: ChatRequest) -> str:
        index = min(len(self.calls), len(self.responses) - 1)
        self.calls.append(request)
        response = self.responses[index]
        return response if isinstance(response, str) else json.dumps(response)
