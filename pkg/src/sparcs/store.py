"""File-backed document store with optimistic versioning.

Documents live as canonical JSON files under one directory per
collection; a sidecar ``.v`` file carries the integer version. Writes to
one document id are serialized by a per-id lock and must present the
expected version; reads return the stored bytes unchanged, so round-trips
are byte-identical.
"""

from __future__ import annotations

import threading
from collections import defaultdict
from pathlib import Path

from .errors import SparcsError

COLLECTIONS = ("scenarios", "workflows", "blocks", "models", "sessions")


class VersionConflict(SparcsError):
    """Expected version does not match the stored version."""


class MissingDocument(SparcsError):
    """No document under that id."""


def _safe_id(doc_id: str) -> str:
    if not doc_id or any(c in doc_id for c in "/\\") or doc_id.startswith("."):
        raise SparcsError(f"invalid document id {doc_id!r}")
    return doc_id


class DocumentStore:
    def __init__(self, root: str | Path):
        self.root = Path(root)
        for name in COLLECTIONS:
            (self.root / name).mkdir(parents=True, exist_ok=True)
        self._locks = defaultdict(threading.Lock)
        self._registry_lock = threading.Lock()

    def _lock(self, collection: str, doc_id: str) -> threading.Lock:
        with self._registry_lock:
            return self._locks[(collection, doc_id)]

    def _paths(self, collection: str, doc_id: str):
        if collection not in COLLECTIONS:
            raise SparcsError(f"unknown collection {collection!r}")
        base = self.root / collection / _safe_id(doc_id)
        return base.with_suffix(".json"), base.with_suffix(".v")

    def list(self, collection: str) -> list:
        if collection not in COLLECTIONS:
            raise SparcsError(f"unknown collection {collection!r}")
        out = []
        for path in sorted((self.root / collection).glob("*.json")):
            version = int(path.with_suffix(".v").read_text() or "0")
            out.append({"id": path.stem, "version": version})
        return out

    def get(self, collection: str, doc_id: str) -> tuple:
        """(canonical bytes, version)."""
        doc_path, v_path = self._paths(collection, doc_id)
        with self._lock(collection, doc_id):
            if not doc_path.is_file():
                raise MissingDocument(f"{collection}/{doc_id}")
            return doc_path.read_bytes(), int(v_path.read_text())

    def put(self, collection: str, doc_id: str, data: bytes, expected_version: int | None) -> int:
        """Create (expected_version None) or replace; returns the new version."""
        doc_path, v_path = self._paths(collection, doc_id)
        with self._lock(collection, doc_id):
            current = int(v_path.read_text()) if doc_path.is_file() else None
            if current is None:
                if expected_version not in (None, 0):
                    raise VersionConflict(f"{collection}/{doc_id}: no stored version")
                new_version = 1
            else:
                if expected_version != current:
                    raise VersionConflict(
                        f"{collection}/{doc_id}: expected {expected_version}, stored {current}"
                    )
                new_version = current + 1
            doc_path.write_bytes(data)
            v_path.write_text(str(new_version))
            return new_version

    def delete(self, collection: str, doc_id: str, expected_version: int | None) -> None:
        doc_path, v_path = self._paths(collection, doc_id)
        with self._lock(collection, doc_id):
            if not doc_path.is_file():
                raise MissingDocument(f"{collection}/{doc_id}")
            current = int(v_path.read_text())
            if expected_version is not None and expected_version != current:
                raise VersionConflict(
                    f"{collection}/{doc_id}: expected {expected_version}, stored {current}"
                )
            doc_path.unlink()
            v_path.unlink()

    def exists(self, collection: str, doc_id: str) -> bool:
        doc_path, _ = self._paths(collection, doc_id)
        return doc_path.is_file()
