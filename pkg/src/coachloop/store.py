"""Embedded append-only persistence.

One JSON-lines log per collection; every committed write is flushed and
fsynced so a killed process loses nothing it acknowledged. ``compact()``
rewrites a log to one line per live document (atomic rename)."""

from __future__ import annotations

import json
import os
from pathlib import Path
from typing import Dict, Iterator, List, Optional

COLLECTIONS = (
    "patients",
    "sessions",
    "cases",
    "snapshots",
    "decisions",
    "outbound",
    "notifications",
)


class Store:
    def __init__(self, data_dir):
        self.data_dir = Path(data_dir)
        self.data_dir.mkdir(parents=True, exist_ok=True)
        self._docs: Dict[str, Dict[str, dict]] = {c: {} for c in COLLECTIONS}
        self._order: Dict[str, List[str]] = {c: [] for c in COLLECTIONS}
        self._files = {}
        self._load()

    def _path(self, collection: str) -> Path:
        return self.data_dir / f"{collection}.jsonl"

    def _load(self) -> None:
        for collection in COLLECTIONS:
            path = self._path(collection)
            if not path.exists():
                continue
            with path.open("r", encoding="utf-8") as fh:
                for line in fh:
                    line = line.strip()
                    if not line:
                        continue
                    rec = json.loads(line)
                    self._apply(collection, rec["id"], rec["doc"])

    def _apply(self, collection: str, doc_id: str, doc: dict) -> None:
        if doc_id not in self._docs[collection]:
            self._order[collection].append(doc_id)
        self._docs[collection][doc_id] = doc

    def _file(self, collection: str):
        if collection not in self._files:
            self._files[collection] = self._path(collection).open(
                "a", encoding="utf-8"
            )
        return self._files[collection]

    def put(self, collection: str, doc_id: str, doc: dict) -> None:
        if collection not in self._docs:
            raise KeyError(f"unknown collection: {collection}")
        fh = self._file(collection)
        fh.write(json.dumps({"id": doc_id, "doc": doc}, sort_keys=True) + "\n")
        fh.flush()
        os.fsync(fh.fileno())
        self._apply(collection, doc_id, doc)

    def get(self, collection: str, doc_id: str) -> Optional[dict]:
        return self._docs[collection].get(doc_id)

    def exists(self, collection: str, doc_id: str) -> bool:
        return doc_id in self._docs[collection]

    def ids(self, collection: str) -> List[str]:
        return list(self._order[collection])

    def all(self, collection: str) -> Iterator[tuple]:
        for doc_id in self._order[collection]:
            yield doc_id, self._docs[collection][doc_id]

    def count(self, collection: str) -> int:
        return len(self._docs[collection])

    def append_decision(self, doc: dict) -> int:
        """Append to the decision log with a monotone sequence number."""
        seq = self.count("decisions")
        doc = dict(doc, seq=seq)
        self.put("decisions", str(seq), doc)
        return seq

    def state(self) -> dict:
        """Full store contents, for durability comparisons."""
        return {
            c: {doc_id: doc for doc_id, doc in self.all(c)} for c in COLLECTIONS
        }

    def compact(self) -> None:
        for collection in COLLECTIONS:
            if collection in self._files:
                self._files[collection].close()
                del self._files[collection]
            path = self._path(collection)
            tmp = path.with_suffix(".jsonl.tmp")
            with tmp.open("w", encoding="utf-8") as fh:
                for doc_id in self._order[collection]:
                    fh.write(
                        json.dumps(
                            {"id": doc_id, "doc": self._docs[collection][doc_id]},
                            sort_keys=True,
                        )
                        + "\n"
                    )
                fh.flush()
                os.fsync(fh.fileno())
            tmp.replace(path)

    def close(self) -> None:
        for fh in self._files.values():
            fh.close()
        self._files.clear()
