"""Append-only on-disk event store with per-record checksums.

One JSONL file per session; each line wraps a record with a sha256 of its
canonical serialization. A truncated final line (crash mid-append) is
tolerated and reported; any other damage raises StoreCorruption.
"""

from __future__ import annotations

import hashlib
import json
from pathlib import Path

from ..errors import StoreCorruption


def _checksum(record: dict) -> str:
    canonical = json.dumps(record, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canonical.encode()).hexdigest()


def session_file(store_dir, session_id: str) -> Path:
    return Path(store_dir) / f"{session_id}.jsonl"


def append_event(store_dir, session_id: str, record: dict) -> None:
    path = session_file(store_dir, session_id)
    path.parent.mkdir(parents=True, exist_ok=True)
    line = json.dumps({"record": record, "checksum": _checksum(record)},
                      separators=(",", ":"))
    with path.open("a") as fh:
        fh.write(line + "\n")
        fh.flush()


def read_events(store_dir, session_id: str) -> tuple[list[dict], bool]:
    """(records, truncated). Replays through the last complete record."""
    path = session_file(store_dir, session_id)
    if not path.is_file():
        return [], False
    records: list[dict] = []
    lines = path.read_text().splitlines()
    for i, line in enumerate(lines):
        if not line.strip():
            continue
        try:
            wrapper = json.loads(line)
        except json.JSONDecodeError:
            if i == len(lines) - 1:
                return records, True  # crash-truncated tail
            raise StoreCorruption(f"{path.name}: unparsable record at line {i + 1}")
        record = wrapper.get("record")
        if record is None or wrapper.get("checksum") != _checksum(record):
            raise StoreCorruption(f"{path.name}: checksum mismatch at line {i + 1}")
        records.append(record)
    return records, False


def list_session_ids(store_dir) -> list[str]:
    root = Path(store_dir)
    if not root.is_dir():
        return []
    return sorted(p.stem for p in root.glob("*.jsonl"))
