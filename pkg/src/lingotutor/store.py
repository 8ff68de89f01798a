"""Local persistence: append-only event log and JSON document store.

Deliberately free of database dependencies. Events append as NDJSON
lines; documents snapshot as whole JSON files written atomically.
"""

from __future__ import annotations

import json
import os
import threading
from pathlib import Path


class EventLog:
    """Append-only NDJSON log; appends are serialized by a lock."""

    def __init__(self, path: str | Path):
        self.path = Path(path)
        self.path.parent.mkdir(parents=True, exist_ok=True)
        self._lock = threading.Lock()

    def append(self, record: dict) -> None:
        line = json.dumps(record, ensure_ascii=False, sort_keys=True)
        with self._lock:
            with open(self.path, "a", encoding="utf-8") as fh:
                fh.write(line + "\n")

    def read_all(self) -> list[dict]:
        if not self.path.is_file():
            return []
        out = []
        with open(self.path, encoding="utf-8") as fh:
            for line in fh:
                line = line.strip()
                if line:
                    out.append(json.loads(line))
        return out


class DocumentStore:
    """Named JSON snapshots under one directory, written atomically."""

    def __init__(self, root: str | Path):
        self.root = Path(root)
        self.root.mkdir(parents=True, exist_ok=True)
        self._lock = threading.Lock()

    def _path(self, name: str) -> Path:
        return self.root / f"{name}.json"

    def save(self, name: str, document: dict) -> None:
        path = self._path(name)
        path.parent.mkdir(parents=True, exist_ok=True)
        tmp = path.with_suffix(".json.tmp")
        with self._lock:
            with open(tmp, "w", encoding="utf-8") as fh:
                json.dump(document, fh, ensure_ascii=False, sort_keys=True, indent=1)
            os.replace(tmp, path)

    def load(self, name: str, default: dict | None = None) -> dict | None:
        path = self._path(name)
        if not path.is_file():
            return default
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)

    def delete(self, name: str) -> None:
        with self._lock:
            self._path(name).unlink(missing_ok=True)

    def names(self, prefix: str = "") -> list[str]:
        out = []
        for path in sorted(self.root.rglob("*.json")):
            rel = path.relative_to(self.root).with_suffix("")
            name = str(rel)
            if name.startswith(prefix):
                out.append(name)
        return out
