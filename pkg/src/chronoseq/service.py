"""Application core shared by the HTTP server and the batch CLI.

Owns the artifact store, translates between artifacts and in-memory
pipeline objects, and manages timeline sessions. Artifacts are immutable
once written; timelines are mutable session state guarded by per-timeline
locks.
"""

from __future__ import annotations

import io
import json
import threading
import time
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .alignment import AlignmentEngine, Timeline
from .events import derive_events, rebuild_day_strings, segment_days
from .ingest import SampleSet, ingest_samples
from .mining import FrequentSequence, MiningConfig, MiningResult, find_occurrences, mine
from .model import DerivationConfig, EventRecord, ValidationError, parse_timestamp
from .motifs import (
    Motif,
    MotifConfig,
    MotifOccurrence,
    cluster_motifs,
    locate_motif,
    motif_events,
    window_transform,
)
from .store import ArtifactStore, UnknownArtifactError


@dataclass
class Session:
    session_id: str
    timeline_ids: set[str] = field(default_factory=set)
    last_access: float = field(default_factory=time.monotonic)

    def touch(self) -> None:
        self.last_access = time.monotonic()


class SessionStore:
    def __init__(self) -> None:
        self._sessions: dict[str, Session] = {}
        self._lock = threading.Lock()

    def get(self, session_id: str = "default") -> Session:
        with self._lock:
            session = self._sessions.get(session_id)
            if session is None:
                session = Session(session_id=session_id)
                self._sessions[session_id] = session
            session.touch()
            return session

    def evict_idle(self, max_idle_s: float) -> list[str]:
        """Drop sessions idle longer than max_idle_s; returns evicted ids."""
        now = time.monotonic()
        with self._lock:
            stale = [
                sid
                for sid, session in self._sessions.items()
                if now - session.last_access > max_idle_s
            ]
            for sid in stale:
                del self._sessions[sid]
            return stale


class ChronoseqService:
    """Batch stages plus timeline/session state over one data directory."""

    def __init__(self, data_dir: str | Path):
        self.store = ArtifactStore(data_dir)
        self.sessions = SessionStore()
        self._samples_cache: dict[str, SampleSet] = {}
        self._derivation_cache: dict[str, tuple[list[EventRecord], list]] = {}
        self._engines: dict[str, AlignmentEngine] = {}
        self._timeline_runs: dict[str, str] = {}
        self._timeline_locks: dict[str, threading.Lock] = {}
        self._lock = threading.Lock()

    # -- ingestion ---------------------------------------------------------------

    def ingest_csv(self, source: str | Path | io.TextIOBase) -> tuple[str, dict]:
        samples, report = ingest_samples(source)
        lines = []
        for (pid, stream) in sorted(samples.series):
            times, values = samples.series[(pid, stream)]
            for t, v in zip(times.tolist(), values.tolist()):
                lines.append(json.dumps([pid, stream, int(t), v]))
        blob_id = self.store.put_blob(lines)
        payload = {
            "samples_blob": blob_id,
            "report": report.to_json_dict(),
            "participants": samples.participants,
            "streams": samples.streams,
            "total_samples": samples.total_samples,
        }
        dataset_id = self.store.put("dataset", payload, meta={})
        self._samples_cache[dataset_id] = samples
        return dataset_id, report.to_json_dict()

    def load_samples(self, dataset_id: str) -> SampleSet:
        if dataset_id in self._samples_cache:
            return self._samples_cache[dataset_id]
        payload = self.store.load(dataset_id)
        buckets: dict[tuple[str, str], tuple[list[int], list[float]]] = {}
        for line in self.store.read_blob(payload["samples_blob"]):
            pid, stream, t, v = json.loads(line)
            times, values = buckets.setdefault((pid, stream), ([], []))
            times.append(t)
            values.append(v)
        samples = SampleSet.from_arrays(
            {
                key: (np.asarray(ts, dtype=np.int64), np.asarray(vs, dtype=np.float64))
                for key, (ts, vs) in buckets.items()
            }
        )
        self._samples_cache[dataset_id] = samples
        return samples

    def dataset_info(self, dataset_id: str) -> dict:
        payload = self.store.load(dataset_id)
        return {
            "dataset_id": dataset_id,
            "participants": payload["participants"],
            "streams": payload["streams"],
            "total_samples": payload["total_samples"],
            "report": payload["report"],
            "derivations": self.store.list_ids("derivation", dataset_id=dataset_id),
        }

    # -- derivation ----------------------------------------------------------------

    def derive(self, dataset_id: str, config: DerivationConfig) -> str:
        samples = self.load_samples(dataset_id)
        result = derive_events(samples, config)
        lines = [json.dumps(ev.to_json_dict(), sort_keys=True) for ev in result.events]
        events_blob = self.store.put_blob(lines)
        payload = {
            "dataset_id": dataset_id,
            "config": config.to_json_dict(),
            "events_blob": events_blob,
            "warnings": result.warnings,
            "thresholds": result.thresholds,
            "event_count": len(result.events),
            "day_count": len(result.day_strings),
        }
        derivation_id = self.store.put(
            "derivation", payload, meta={"dataset_id": dataset_id}
        )
        self._derivation_cache[derivation_id] = (result.events, result.day_strings)
        return derivation_id

    def load_derivation(self, derivation_id: str) -> tuple[list[EventRecord], list]:
        if derivation_id in self._derivation_cache:
            return self._derivation_cache[derivation_id]
        payload = self.store.load(derivation_id)
        events = [
            EventRecord.from_json_dict(json.loads(line))
            for line in self.store.read_blob(payload["events_blob"])
        ]
        day_strings = segment_days(events)
        self._derivation_cache[derivation_id] = (events, day_strings)
        return events, day_strings

    def latest_derivation(self, dataset_id: str) -> str | None:
        return self.store.latest("derivation", dataset_id=dataset_id)

    # -- mining ---------------------------------------------------------------------

    def mine_run(
        self, dataset_id: str, config: MiningConfig, derivation_id: str | None = None
    ) -> str:
        derivation_id = derivation_id or self.latest_derivation(dataset_id)
        if derivation_id is None:
            raise ValidationError(
                f"dataset {dataset_id} has no derivation; run derive first"
            )
        _events, day_strings = self.load_derivation(derivation_id)
        result = mine(day_strings, config)
        payload = result.to_json_dict()
        payload["dataset_id"] = dataset_id
        payload["derivation_id"] = derivation_id
        run_id = self.store.put(
            "run", payload, meta={"dataset_id": dataset_id, "derivation_id": derivation_id}
        )
        self._engines[run_id] = AlignmentEngine(run_id, day_strings, result)
        return run_id

    def load_run(self, run_id: str) -> dict:
        return self.store.load(run_id)

    def engine_for_run(self, run_id: str) -> AlignmentEngine:
        with self._lock:
            if run_id in self._engines:
                return self._engines[run_id]
        payload = self.store.load(run_id)
        _events, day_strings = self.load_derivation(payload["derivation_id"])
        sequences = [
            FrequentSequence(
                id=seq["id"],
                symbols=tuple(seq["symbols"]),
                support_days=seq["support_days"],
                total_occurrences=seq["total_occurrences"],
                occurrences=(),
                intra_offsets=tuple(seq["intra_offsets"]),
            )
            for seq in payload["sequences"]
        ]
        result = MiningResult(
            config=MiningConfig.from_json_dict(payload["config"]),
            resolved_min_support=payload["resolved_min_support"],
            total_days=payload["total_days"],
            sequences=sequences,
        )
        engine = AlignmentEngine(run_id, day_strings, result)
        with self._lock:
            self._engines.setdefault(run_id, engine)
            return self._engines[run_id]

    def stream_occurrences(self, run_id: str, sequence_id: str):
        """JSON-Lines occurrence listing recomputed from the run's inputs."""
        engine = self.engine_for_run(run_id)
        pattern = engine.pattern_of(sequence_id)
        max_gap = engine.result.config.max_gap
        for key in sorted(engine.day_strings):
            for occ in find_occurrences(pattern, engine.day_strings[key], max_gap):
                yield json.dumps(occ.to_json_dict(), sort_keys=True)

    # -- timelines ---------------------------------------------------------------------

    def timeline_lock(self, timeline_id: str) -> threading.Lock:
        with self._lock:
            return self._timeline_locks.setdefault(timeline_id, threading.Lock())

    def create_timeline(
        self, run_id: str, focal: list[str], session_id: str = "default"
    ) -> Timeline:
        engine = self.engine_for_run(run_id)
        timeline = engine.create_timeline(focal)
        self._timeline_runs[timeline.id] = run_id
        self.sessions.get(session_id).timeline_ids.add(timeline.id)
        return timeline

    def get_timeline(self, timeline_id: str) -> tuple[AlignmentEngine, Timeline]:
        run_id = self._timeline_runs.get(timeline_id)
        if run_id is None:
            raise UnknownArtifactError(timeline_id)
        engine = self.engine_for_run(run_id)
        timeline = engine.timelines.get(timeline_id)
        if timeline is None:
            raise UnknownArtifactError(timeline_id)
        return engine, timeline

    def clone_timeline(self, timeline_id: str, session_id: str = "default") -> Timeline:
        engine, timeline = self.get_timeline(timeline_id)
        clone = engine.clone_timeline(timeline)
        self._timeline_runs[clone.id] = timeline.run_id
        self.sessions.get(session_id).timeline_ids.add(clone.id)
        return clone

    # -- motifs ------------------------------------------------------------------------

    def motif_run(self, dataset_id: str, config: MotifConfig) -> str:
        samples = self.load_samples(dataset_id)
        windows = window_transform(samples, config)
        motifs = cluster_motifs(windows, config)
        located = {
            motif.motif_id: locate_motif(motif, samples, config) for motif in motifs
        }
        occ_lines = []
        for motif in motifs:
            for occ in located[motif.motif_id]:
                row = occ.to_json_dict()
                row["motif_id"] = motif.motif_id
                occ_lines.append(json.dumps(row, sort_keys=True))
        payload = {
            "dataset_id": dataset_id,
            "config": config.to_json_dict(),
            "motifs": [
                dict(motif.to_json_dict(), occurrence_count=len(located[motif.motif_id]))
                for motif in motifs
            ],
            "occurrences_blob": self.store.put_blob(occ_lines),
            "window_count": len(windows.windows),
            "warnings": windows.warnings,
        }
        motif_run_id = self.store.put(
            "motif_run", payload, meta={"dataset_id": dataset_id}
        )
        return motif_run_id

    def load_motif_run(self, motif_run_id: str) -> dict:
        return self.store.load(motif_run_id)

    def motif_occurrences(self, motif_run_id: str, motif_id: str | None = None):
        payload = self.store.load(motif_run_id)
        for line in self.store.read_blob(payload["occurrences_blob"]):
            if motif_id is None or json.loads(line).get("motif_id") == motif_id:
                yield line

    def promote_motif(
        self, global_motif_id: str, derivation_id: str | None = None
    ) -> dict:
        """Add a motif's occurrences as MOTIF events on top of a derivation.

        The global id is `<motif_run_id>.<motif_id>`. Produces a new
        derivation artifact; promotion is idempotent by content addressing.
        """
        if "." not in global_motif_id:
            raise ValidationError(
                f"motif id {global_motif_id!r} must look like <motif_run_id>.<motif_id>"
            )
        motif_run_id, motif_id = global_motif_id.rsplit(".", 1)
        run_payload = self.store.load(motif_run_id)
        matching = [m for m in run_payload["motifs"] if m["motif_id"] == motif_id]
        if not matching:
            raise UnknownArtifactError(global_motif_id)
        dataset_id = run_payload["dataset_id"]
        derivation_id = derivation_id or self.latest_derivation(dataset_id)
        if derivation_id is None:
            raise ValidationError(
                f"dataset {dataset_id} has no derivation; run derive first"
            )
        base_events, _ = self.load_derivation(derivation_id)
        motif = Motif(
            motif_id=f"{motif_run_id}.{motif_id}",
            centroid=tuple(matching[0]["centroid"]),
            sax_word=matching[0]["sax_word"],
            member_count=matching[0]["member_count"],
            occurrences=[],
        )
        occurrences = [
            MotifOccurrence(
                participant_id=row["participant_id"],
                start=parse_timestamp(row["start"]),
                end=parse_timestamp(row["end"]),
                distance=row["distance"],
            )
            for row in map(json.loads, self.motif_occurrences(motif_run_id, motif_id))
        ]
        if not occurrences:
            raise ValidationError(f"motif {global_motif_id} has no located occurrences")
        extra = motif_events(motif, occurrences)
        merged = sorted(
            dict.fromkeys(base_events + extra),
            key=lambda e: (e.participant_id, e.start, e.kind, e.end),
        )
        day_strings = rebuild_day_strings(base_events, extra)
        base_payload = self.store.load(derivation_id)
        lines = [json.dumps(ev.to_json_dict(), sort_keys=True) for ev in merged]
        # provenance stays in index metadata so re-promotion reproduces the
        # same content-addressed id
        payload = {
            "dataset_id": dataset_id,
            "config": base_payload["config"],
            "events_blob": self.store.put_blob(lines),
            "warnings": base_payload.get("warnings", []),
            "thresholds": base_payload.get("thresholds", {}),
            "event_count": len(merged),
            "day_count": len(day_strings),
        }
        new_derivation_id = self.store.put(
            "derivation",
            payload,
            meta={
                "dataset_id": dataset_id,
                "base_derivation_id": derivation_id,
                "promoted_motif": global_motif_id,
            },
        )
        self._derivation_cache[new_derivation_id] = (merged, day_strings)
        return {
            "derivation_id": new_derivation_id,
            "motif_events": len(extra),
            "dataset_id": dataset_id,
        }

    # -- day strings --------------------------------------------------------------------

    def day_strings_json(
        self,
        dataset_id: str,
        derivation_id: str | None = None,
        participant: str | None = None,
        date_filter: str | None = None,
    ) -> list[dict]:
        derivation_id = derivation_id or self.latest_derivation(dataset_id)
        if derivation_id is None:
            raise ValidationError(
                f"dataset {dataset_id} has no derivation; run derive first"
            )
        _events, day_strings = self.load_derivation(derivation_id)
        out = []
        for ds in day_strings:
            if participant and ds.participant_id != participant:
                continue
            if date_filter and ds.day.isoformat() != date_filter:
                continue
            out.append(
                {
                    "participant_id": ds.participant_id,
                    "day": ds.day.isoformat(),
                    "events": [ev.to_json_dict() for ev in ds.events],
                    "symbols": ds.symbols,
                }
            )
        return out
