"""Defensive JSON extraction from model responses."""

from __future__ import annotations

import json
import re

from .errors import NoObjectFound

_FENCE = re.compile(r"```[a-zA-Z0-9_-]*\n(.*?)```", re.DOTALL)


def strip_fences(text: str) -> str:
    """Replace fenced code blocks with their bodies."""
    return _FENCE.sub(lambda m: m.group(1), text)


def _balanced_spans(text: str):
    depth = 0
    start = -1
    in_string = False
    escape = False
    for i, ch in enumerate(text):
        if in_string:
            if escape:
                escape = False
            elif ch == "\\":
                escape = True
            elif ch == '"':
                in_string = False
            continue
        if ch == '"':
            in_string = True
        elif ch == "{":
            if depth == 0:
                start = i
            depth += 1
        elif ch == "}":
            if depth > 0:
                depth -= 1
                if depth == 0:
                    yield text[start:i + 1]


def extract_json(text: str) -> dict:
    """Strip markdown fences, find the outermost balanced object, parse it."""
    stripped = strip_fences(text)
    candidates = list(_balanced_spans(stripped))
    for span in sorted(candidates, key=len, reverse=True):
        try:
            doc = json.loads(span)
        except json.JSONDecodeError:
            continue
        if isinstance(doc, dict):
            return doc
    raise NoObjectFound("no parsable JSON object in response")
