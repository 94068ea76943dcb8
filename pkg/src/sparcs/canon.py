"""Canonical JSON text used by every file format and wire payload.

Canonical form: UTF-8, 2-space indent, LF line endings, keys in insertion
order, single trailing newline. Serializing a parsed document reproduces
the original bytes for any file written by this module.
"""

from __future__ import annotations

import json
from pathlib import Path


def dumps(obj) -> str:
    return json.dumps(obj, ensure_ascii=False, indent=2) + "\n"


def dump_bytes(obj) -> bytes:
    return dumps(obj).encode("utf-8")


def loads(text: str | bytes):
    return json.loads(text)


def write_file(path: str | Path, obj) -> None:
    Path(path).write_bytes(dump_bytes(obj))


def read_file(path: str | Path):
    return json.loads(Path(path).read_text(encoding="utf-8"))
