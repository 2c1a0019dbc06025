"""Shared domain types: events, day strings, and pipeline configuration."""

from __future__ import annotations

import math
from dataclasses import dataclass
from datetime import date, datetime, timezone

SECONDS_PER_DAY = 86400

KIND_ACTIVITY_STRESS = "ACTIVITY_STRESS"
KIND_SMOKE = "SMOKE"
KIND_MOTIF = "MOTIF"

ACTIVITY_LEVELS = ("none", "low", "high")
STRESS_LEVELS = ("none", "low", "high", "unknown", "masked")

# Canonical stream names; arbitrary stream names are accepted at ingestion.
STREAM_ACTIVITY = "activity"
STREAM_STRESS = "stress"
STREAM_SMOKING = "smoking"

STRESS_SENTINEL = -1.0


class ValidationError(ValueError):
    """Raised when inputs violate a pipeline contract."""


def to_epoch(ts: datetime) -> int:
    """Datetime -> UTC epoch seconds (naive datetimes are treated as UTC)."""
    if ts.tzinfo is None:
        ts = ts.replace(tzinfo=timezone.utc)
    return int(ts.timestamp())


def epoch_to_iso(epoch_s: int | float) -> str:
    return (
        datetime.fromtimestamp(int(epoch_s), tz=timezone.utc)
        .strftime("%Y-%m-%dT%H:%M:%SZ")
    )


def epoch_day(epoch_s: int | float) -> date:
    """Calendar day (UTC) containing the instant."""
    return datetime.fromtimestamp(int(epoch_s), tz=timezone.utc).date()


def day_start_epoch(day: date) -> int:
    return to_epoch(datetime(day.year, day.month, day.day, tzinfo=timezone.utc))


def parse_timestamp(raw: str) -> int:
    """Parse ISO-8601 UTC ('2024-01-01T09:00:00Z') or integer epoch seconds."""
    text = raw.strip()
    if not text:
        raise ValidationError("empty timestamp")
    try:
        return int(text)
    except ValueError:
        pass
    try:
        dt = datetime.fromisoformat(text.replace("Z", "+00:00"))
    except ValueError as exc:
        raise ValidationError(f"bad timestamp {raw!r}") from exc
    if dt.tzinfo is None:
        dt = dt.replace(tzinfo=timezone.utc)
    return int(dt.timestamp())


@dataclass(frozen=True)
class EventRecord:
    """A discrete, labeled, time-bounded event; the alphabet unit for mining.

    Events never cross midnight and events of one (participant, kind) never
    overlap. Times are UTC epoch seconds with start < end.
    """

    participant_id: str
    day: date
    start: int
    end: int
    kind: str
    activity_level: str | None = None
    stress_level: str | None = None
    motif_id: str | None = None

    def __post_init__(self) -> None:
        if self.start >= self.end:
            raise ValidationError(f"event start {self.start} >= end {self.end}")
        if epoch_day(self.start) != self.day or epoch_day(self.end - 1) != self.day:
            raise ValidationError("event crosses a calendar-day boundary")
        if self.kind == KIND_ACTIVITY_STRESS:
            if self.activity_level not in ACTIVITY_LEVELS:
                raise ValidationError(f"bad activity level {self.activity_level!r}")
            if self.stress_level not in STRESS_LEVELS:
                raise ValidationError(f"bad stress level {self.stress_level!r}")
            if self.activity_level == "high" and self.stress_level != "masked":
                raise ValidationError("stress must be masked under high activity")
        elif self.kind == KIND_MOTIF:
            if not self.motif_id:
                raise ValidationError("motif event requires motif_id")
        elif self.kind != KIND_SMOKE:
            raise ValidationError(f"unknown event kind {self.kind!r}")

    @property
    def symbol(self) -> str:
        """Canonical alphabet label; equal iff all symbol-relevant fields equal."""
        if self.kind == KIND_ACTIVITY_STRESS:
            return f"act:{self.activity_level}|str:{self.stress_level}"
        if self.kind == KIND_SMOKE:
            return "smoke"
        return f"motif:{self.motif_id}"

    def to_json_dict(self) -> dict:
        out = {
            "participant_id": self.participant_id,
            "day": self.day.isoformat(),
            "start": epoch_to_iso(self.start),
            "end": epoch_to_iso(self.end),
            "kind": self.kind,
        }
        if self.kind == KIND_ACTIVITY_STRESS:
            out["activity_level"] = self.activity_level
            out["stress_level"] = self.stress_level
        if self.kind == KIND_MOTIF:
            out["motif_id"] = self.motif_id
        return out

    @classmethod
    def from_json_dict(cls, data: dict) -> EventRecord:
        return cls(
            participant_id=data["participant_id"],
            day=date.fromisoformat(data["day"]),
            start=parse_timestamp(data["start"]),
            end=parse_timestamp(data["end"]),
            kind=data["kind"],
            activity_level=data.get("activity_level"),
            stress_level=data.get("stress_level"),
            motif_id=data.get("motif_id"),
        )


@dataclass
class DayString:
    """Ordered events of one (participant, calendar day): the unit sequence for mining."""

    participant_id: str
    day: date
    events: list[EventRecord]

    @property
    def key(self) -> tuple[str, str]:
        return (self.participant_id, self.day.isoformat())

    @property
    def symbols(self) -> list[str]:
        return [ev.symbol for ev in self.events]


@dataclass(frozen=True)
class DerivationConfig:
    """Parameters of the sensor-stream -> event derivation.

    interval_s-aligned windows start at midnight UTC, so interval_s must
    divide 86400. stress_low/stress_high override the per-participant
    quantile defaults and apply to normalized values in [0, 1].
    """

    interval_s: int = 300
    gap_threshold_s: int = 3600
    low_quantile: float = 0.25
    high_quantile: float = 0.75
    stress_low: float | None = None
    stress_high: float | None = None

    def __post_init__(self) -> None:
        if self.interval_s <= 0 or SECONDS_PER_DAY % self.interval_s != 0:
            raise ValidationError(f"interval_s {self.interval_s} must divide 86400")
        if self.gap_threshold_s <= 0:
            raise ValidationError("gap_threshold_s must be positive")
        if not (0.0 < self.low_quantile < self.high_quantile < 1.0):
            raise ValidationError("need 0 < low_quantile < high_quantile < 1")
        if (self.stress_low is None) != (self.stress_high is None):
            raise ValidationError("stress_low and stress_high must be set together")
        if self.stress_low is not None and not (self.stress_low < self.stress_high):
            raise ValidationError("stress_low must be < stress_high")

    def to_json_dict(self) -> dict:
        return {
            "interval_s": self.interval_s,
            "gap_threshold_s": self.gap_threshold_s,
            "low_quantile": self.low_quantile,
            "high_quantile": self.high_quantile,
            "stress_low": self.stress_low,
            "stress_high": self.stress_high,
        }


@dataclass(frozen=True)
class MiningConfig:
    """Frequent-sequence mining parameters.

    min_support is an absolute day count (int >= 1) or a fraction of day
    strings in (0, 1]; fractions resolve by ceiling. max_gap bounds the
    number of intervening events between consecutive matched elements
    (None = unbounded).
    """

    min_support: float | int = 0.2
    max_gap: int | None = 2
    max_len: int = 6
    min_len_display: int = 2

    def __post_init__(self) -> None:
        if isinstance(self.min_support, bool) or (
            isinstance(self.min_support, int) and self.min_support < 1
        ):
            raise ValidationError("absolute min_support must be >= 1")
        if isinstance(self.min_support, float) and not (0.0 < self.min_support <= 1.0):
            raise ValidationError("fractional min_support must be in (0, 1]")
        if self.max_gap is not None and self.max_gap < 0:
            raise ValidationError("max_gap must be non-negative or unbounded")
        if self.max_len < 1:
            raise ValidationError("max_len must be >= 1")
        if self.min_len_display < 1:
            raise ValidationError("min_len_display must be >= 1")

    def resolve_min_support(self, n_days: int) -> int:
        """Resolve to an absolute day count in [1, n_days]; fractions round up."""
        if isinstance(self.min_support, int):
            support = self.min_support
        else:
            support = math.ceil(self.min_support * n_days)
        return max(1, support)

    def to_json_dict(self) -> dict:
        return {
            "min_support": self.min_support,
            "max_gap": self.max_gap,
            "max_len": self.max_len,
            "min_len_display": self.min_len_display,
        }

    @classmethod
    def from_json_dict(cls, data: dict) -> MiningConfig:
        gap = data.get("max_gap", 2)
        if isinstance(gap, str):
            gap = None if gap == "unbounded" else int(gap)
        return cls(
            min_support=data.get("min_support", 0.2),
            max_gap=gap,
            max_len=int(data.get("max_len", 6)),
            min_len_display=int(data.get("min_len_display", 2)),
        )
