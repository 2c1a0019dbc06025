"""CSV ingestion of raw sensor samples into per-(participant, stream) arrays."""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Iterator, TextIO

import numpy as np

from .model import (
    STREAM_SMOKING,
    STREAM_STRESS,
    STRESS_SENTINEL,
    ValidationError,
    parse_timestamp,
)

EXPECTED_HEADER = ["participant_id", "stream", "timestamp", "value"]


@dataclass
class IngestReport:
    """Outcome of one ingestion: row counts, rejections with reasons, participants."""

    rows: int = 0
    accepted: int = 0
    deduplicated: int = 0
    rejected: list[tuple[int, str]] = field(default_factory=list)
    participants: list[str] = field(default_factory=list)
    stream_counts: dict[str, int] = field(default_factory=dict)

    @property
    def rejected_count(self) -> int:
        return len(self.rejected)

    def to_json_dict(self) -> dict:
        return {
            "rows": self.rows,
            "accepted": self.accepted,
            "deduplicated": self.deduplicated,
            "rejected": [{"line": line, "reason": reason} for line, reason in self.rejected],
            "participants": self.participants,
            "stream_counts": self.stream_counts,
        }


@dataclass
class SampleSet:
    """Timestamped samples stored sorted per (participant, stream).

    series maps (participant_id, stream) to (times, values) where times is a
    strictly increasing int64 epoch-seconds array.
    """

    series: dict[tuple[str, str], tuple[np.ndarray, np.ndarray]] = field(default_factory=dict)

    @property
    def participants(self) -> list[str]:
        return sorted({pid for pid, _ in self.series})

    @property
    def streams(self) -> list[str]:
        return sorted({stream for _, stream in self.series})

    @property
    def total_samples(self) -> int:
        return sum(len(t) for t, _ in self.series.values())

    def get(self, participant_id: str, stream: str) -> tuple[np.ndarray, np.ndarray]:
        empty = np.empty(0)
        times, values = self.series.get(
            (participant_id, stream), (empty.astype(np.int64), empty)
        )
        return times, values

    @classmethod
    def from_records(
        cls, records: Iterable[tuple[str, str, int, float]]
    ) -> SampleSet:
        """Build from (participant_id, stream, epoch_s, value) tuples (trusted input)."""
        buckets: dict[tuple[str, str], tuple[list[int], list[float]]] = {}
        for pid, stream, t, v in records:
            times, values = buckets.setdefault((pid, stream), ([], []))
            times.append(int(t))
            values.append(float(v))
        return cls._from_buckets(buckets)[0]

    @classmethod
    def from_arrays(
        cls, arrays: dict[tuple[str, str], tuple[np.ndarray, np.ndarray]]
    ) -> SampleSet:
        """Build from pre-sorted arrays; validates ordering only."""
        series: dict[tuple[str, str], tuple[np.ndarray, np.ndarray]] = {}
        for key, (times, values) in arrays.items():
            times = np.asarray(times, dtype=np.int64)
            values = np.asarray(values, dtype=np.float64)
            if len(times) != len(values):
                raise ValidationError(f"length mismatch for {key}")
            if len(times) > 1 and not np.all(np.diff(times) > 0):
                raise ValidationError(f"timestamps for {key} must be strictly increasing")
            series[key] = (times, values)
        return cls(series=series)

    @classmethod
    def _from_buckets(
        cls, buckets: dict[tuple[str, str], tuple[list[int], list[float]]]
    ) -> tuple[SampleSet, int]:
        series: dict[tuple[str, str], tuple[np.ndarray, np.ndarray]] = {}
        deduplicated = 0
        for key, (times_list, values_list) in buckets.items():
            times = np.asarray(times_list, dtype=np.int64)
            values = np.asarray(values_list, dtype=np.float64)
            order = np.argsort(times, kind="stable")
            times = times[order]
            values = values[order]
            if len(times) > 1:
                # keep the first sample at each timestamp
                keep = np.concatenate(([True], np.diff(times) > 0))
                deduplicated += int((~keep).sum())
                times = times[keep]
                values = values[keep]
            series[key] = (times, values)
        return cls(series=series), deduplicated


def _validate_value(stream: str, value: float) -> str | None:
    """Return a rejection reason for stream-specific value constraints, or None."""
    if stream == STREAM_STRESS:
        if not (value == STRESS_SENTINEL or 0.0 <= value <= 1.0):
            return "stress value outside [0,1] and not -1"
    elif stream == STREAM_SMOKING:
        if value not in (0.0, 1.0):
            return "smoking value not in {0,1}"
    return None


def _iter_rows(source: TextIO) -> Iterator[tuple[int, list[str]]]:
    reader = csv.reader(source)
    for line_no, row in enumerate(reader, start=1):
        yield line_no, row


def ingest_samples(source: str | Path | TextIO) -> tuple[SampleSet, IngestReport]:
    """Ingest a `participant_id,stream,timestamp,value` CSV (header required).

    Malformed rows are rejected with a reason and ingestion continues; an
    empty file (or header-only with zero data rows accepted) raises.
    """
    if isinstance(source, (str, Path)):
        with open(source, "r", encoding="utf-8", newline="") as handle:
            return ingest_samples(handle)

    report = IngestReport()
    buckets: dict[tuple[str, str], tuple[list[int], list[float]]] = {}

    rows = _iter_rows(source)
    try:
        _, header = next(rows)
    except StopIteration:
        raise ValidationError("empty CSV: no header row") from None
    if [col.strip().lower() for col in header] != EXPECTED_HEADER:
        raise ValidationError(
            f"bad header {header!r}; expected {','.join(EXPECTED_HEADER)}"
        )

    for line_no, row in rows:
        if not row or (len(row) == 1 and not row[0].strip()):
            continue
        report.rows += 1
        if len(row) != 4:
            report.rejected.append((line_no, f"expected 4 fields, got {len(row)}"))
            continue
        pid, stream, ts_raw, value_raw = (cell.strip() for cell in row)
        if not pid or not stream:
            report.rejected.append((line_no, "empty participant_id or stream"))
            continue
        try:
            timestamp = parse_timestamp(ts_raw)
        except ValidationError:
            report.rejected.append((line_no, f"bad timestamp {ts_raw!r}"))
            continue
        try:
            value = float(value_raw)
        except ValueError:
            report.rejected.append((line_no, "non-numeric value"))
            continue
        if not np.isfinite(value):
            report.rejected.append((line_no, "non-finite value"))
            continue
        reason = _validate_value(stream, value)
        if reason is not None:
            report.rejected.append((line_no, reason))
            continue
        times, values = buckets.setdefault((pid, stream), ([], []))
        times.append(timestamp)
        values.append(value)
        report.accepted += 1

    if report.rows == 0:
        raise ValidationError("empty CSV: no data rows")

    samples, deduplicated = SampleSet._from_buckets(buckets)
    report.deduplicated = deduplicated
    report.accepted -= deduplicated
    report.participants = samples.participants
    report.stream_counts = {
        stream: sum(
            len(times) for (_, s), (times, _) in samples.series.items() if s == stream
        )
        for stream in samples.streams
    }
    return samples, report


def samples_to_csv(samples: SampleSet) -> str:
    """Serialize back to the ingestion CSV format (canonical ordering)."""
    out = io.StringIO()
    writer = csv.writer(out)
    writer.writerow(EXPECTED_HEADER)
    for (pid, stream) in sorted(samples.series):
        times, values = samples.series[(pid, stream)]
        for t, v in zip(times.tolist(), values.tolist()):
            writer.writerow([pid, stream, int(t), repr(v)])
    return out.getvalue()
