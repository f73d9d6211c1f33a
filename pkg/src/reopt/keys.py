"""Index-key handling.

Every index is an ordered tuple of string entity ids; scalar indices are
1-tuples. Flat keys like ``flows(P2,C2)`` name one variable or one
constraint row and double as the match surface for pattern patches and
the LP export.
"""

from __future__ import annotations

import re
from typing import Iterable

IndexKey = tuple[str, ...]

_FLAT_RE = re.compile(r"^(?P<family>[^()]+)\((?P<idx>.*)\)$")


def coerce_key(value) -> IndexKey:
    """Promote planner-style indices (string, list, tuple) to an IndexKey."""
    if isinstance(value, tuple):
        return tuple(str(v) for v in value)
    if isinstance(value, list):
        return tuple(str(v) for v in value)
    if isinstance(value, (str, int)):
        return (str(value),)
    raise TypeError(f"cannot coerce {value!r} to an index key")


def flat_key(family: str, index: IndexKey) -> str:
    return f"{family}({','.join(index)})"


def split_flat_key(key: str) -> tuple[str, IndexKey]:
    m = _FLAT_RE.match(key)
    if not m:
        return key, ()
    idx = m.group("idx")
    return m.group("family"), tuple(idx.split(",")) if idx else ()


def key_to_doc(key: IndexKey) -> list[str]:
    return list(key)


def key_from_doc(doc) -> IndexKey:
    if not isinstance(doc, (list, tuple)):
        raise TypeError(f"index key must be an array of strings, got {doc!r}")
    return tuple(str(v) for v in doc)


def homogeneous_arity(keys: Iterable[IndexKey]) -> bool:
    arities = {len(k) for k in keys}
    return len(arities) <= 1
