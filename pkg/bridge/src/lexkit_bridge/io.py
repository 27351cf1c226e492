"""Line-oriented input readers and atomic output writing.

Output files appear atomically: rows are materialized into a temporary file
in the destination directory and renamed over the target only after every
row was written. A crash mid-generation leaves no partial output behind.
"""

from __future__ import annotations

import json
import os
from pathlib import Path


class BridgeError(Exception):
    """Any bridge failure that should abort with a nonzero exit."""


def read_jsonl(path) -> list[dict]:
    rows = []
    p = Path(path)
    if not p.exists():
        raise BridgeError(f"input file not found: {p}")
    with open(p, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            if not line.strip():
                continue
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as exc:
                raise BridgeError(f"{p}:{lineno}: invalid JSON: {exc.msg}") from exc
            if not isinstance(obj, dict):
                raise BridgeError(f"{p}:{lineno}: record must be an object")
            rows.append(obj)
    return rows


def atomic_write_lines(path, lines) -> int:
    """Write an iterable of text lines atomically; returns the line count.

    `lines` may be a generator; if it raises, the temporary file is removed
    and the destination is left untouched.
    """
    target = Path(path)
    target.parent.mkdir(parents=True, exist_ok=True)
    tmp = target.with_name(target.name + ".tmp")
    count = 0
    try:
        with open(tmp, "w", encoding="utf-8") as fh:
            for line in lines:
                fh.write(line if line.endswith("\n") else line + "\n")
                count += 1
            fh.flush()
            os.fsync(fh.fileno())
        os.replace(tmp, target)
    except BaseException:
        tmp.unlink(missing_ok=True)
        raise
    return count


def dedup(rows: list[dict], key_fields: tuple[str, ...], warn) -> list[dict]:
    """Drop duplicate records by key, warning once per duplicate."""
    seen = set()
    out = []
    for row in rows:
        key = tuple(row.get(k) for k in key_fields)
        if key in seen:
            warn(f"duplicate input record {key}; dropped")
            continue
        seen.add(key)
        out.append(row)
    return out
