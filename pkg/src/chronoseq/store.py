"""Content-addressed artifact store: JSON documents plus JSON-Lines blobs.

Artifact ids are derived from canonical content, so re-running a batch
stage with identical inputs and config reproduces the same id. Writes are
atomic (write-temp-then-rename) and loads verify checksums.
"""

from __future__ import annotations

import hashlib
import json
import os
import threading
from pathlib import Path
from typing import Iterator

KIND_PREFIX = {
    "dataset": "ds",
    "derivation": "drv",
    "run": "run",
    "motif_run": "mrun",
}


class CorruptArtifactError(RuntimeError):
    """Stored bytes do not match their recorded checksum."""


class UnknownArtifactError(KeyError):
    """No artifact with the requested id."""


def canonical_json(payload: dict) -> str:
    return json.dumps(payload, sort_keys=True, separators=(",", ":"), ensure_ascii=False)


def _atomic_write(path: Path, data: bytes) -> None:
    tmp = path.with_suffix(path.suffix + ".tmp")
    tmp.write_bytes(data)
    os.replace(tmp, path)


class ArtifactStore:
    def __init__(self, root: str | Path):
        self.root = Path(root)
        self.objects_dir = self.root / "objects"
        self.blobs_dir = self.root / "blobs"
        self.index_path = self.root / "index.json"
        self.objects_dir.mkdir(parents=True, exist_ok=True)
        self.blobs_dir.mkdir(parents=True, exist_ok=True)
        self._lock = threading.Lock()

    # -- index -----------------------------------------------------------------

    def _read_index(self) -> dict:
        if not self.index_path.exists():
            return {"seq": 0, "artifacts": {}}
        return json.loads(self.index_path.read_text(encoding="utf-8"))

    def _record(self, artifact_id: str, kind: str, meta: dict | None) -> None:
        with self._lock:
            index = self._read_index()
            if artifact_id not in index["artifacts"]:
                index["seq"] += 1
                index["artifacts"][artifact_id] = {
                    "kind": kind,
                    "seq": index["seq"],
                    "meta": meta or {},
                }
                _atomic_write(
                    self.index_path,
                    json.dumps(index, indent=1, sort_keys=True).encode("utf-8"),
                )

    def list_ids(self, kind: str, **meta_filter) -> list[str]:
        """Artifact ids of one kind, oldest first, filtered on index metadata."""
        index = self._read_index()
        entries = [
            (entry["seq"], artifact_id)
            for artifact_id, entry in index["artifacts"].items()
            if entry["kind"] == kind
            and all(entry["meta"].get(k) == v for k, v in meta_filter.items())
        ]
        return [artifact_id for _, artifact_id in sorted(entries)]

    def latest(self, kind: str, **meta_filter) -> str | None:
        ids = self.list_ids(kind, **meta_filter)
        return ids[-1] if ids else None

    # -- JSON artifacts ----------------------------------------------------------

    def put(self, kind: str, payload: dict, meta: dict | None = None) -> str:
        """Store a JSON artifact; the id is content-addressed."""
        if kind not in KIND_PREFIX:
            raise ValueError(f"unknown artifact kind {kind!r}")
        body = canonical_json(payload)
        digest = hashlib.sha256(body.encode("utf-8")).hexdigest()
        artifact_id = f"{KIND_PREFIX[kind]}-{digest[:16]}"
        path = self.objects_dir / f"{artifact_id}.json"
        if not path.exists():
            envelope = {
                "id": artifact_id,
                "kind": kind,
                "sha256": digest,
                "payload": payload,
            }
            _atomic_write(
                path, json.dumps(envelope, sort_keys=True, indent=1).encode("utf-8")
            )
        self._record(artifact_id, kind, meta)
        return artifact_id

    def load(self, artifact_id: str) -> dict:
        """Load and checksum-verify an artifact's payload."""
        path = self.objects_dir / f"{artifact_id}.json"
        if not path.exists():
            raise UnknownArtifactError(artifact_id)
        envelope = json.loads(path.read_text(encoding="utf-8"))
        payload = envelope.get("payload")
        digest = hashlib.sha256(canonical_json(payload).encode("utf-8")).hexdigest()
        if digest != envelope.get("sha256"):
            raise CorruptArtifactError(f"checksum mismatch for {artifact_id}")
        return payload

    def kind_of(self, artifact_id: str) -> str | None:
        entry = self._read_index()["artifacts"].get(artifact_id)
        return entry["kind"] if entry else None

    def exists(self, artifact_id: str) -> bool:
        return (self.objects_dir / f"{artifact_id}.json").exists()

    # -- JSON-Lines blobs ---------------------------------------------------------

    def put_blob(self, lines: list[str]) -> str:
        """Store a JSON-Lines blob; returns its content hash id."""
        body = ("\n".join(lines) + "\n") if lines else ""
        data = body.encode("utf-8")
        blob_id = hashlib.sha256(data).hexdigest()[:24]
        path = self.blobs_dir / f"{blob_id}.jsonl"
        if not path.exists():
            _atomic_write(path, data)
        return blob_id

    def blob_path(self, blob_id: str) -> Path:
        return self.blobs_dir / f"{blob_id}.jsonl"

    def read_blob(self, blob_id: str) -> Iterator[str]:
        """Stream blob lines after verifying the content hash."""
        path = self.blob_path(blob_id)
        if not path.exists():
            raise UnknownArtifactError(blob_id)
        data = path.read_bytes()
        if hashlib.sha256(data).hexdigest()[:24] != blob_id:
            raise CorruptArtifactError(f"checksum mismatch for blob {blob_id}")
        for line in data.decode("utf-8").splitlines():
            if line:
                yield line
