"""Derivation of discrete per-day events from continuous sensor streams.

Pipeline per participant: min-max normalize each stream, label
midnight-aligned fixed windows as none/low/high against per-participant
quantile thresholds, merge adjacent same-label windows into events (bounded
by the missing-data gap threshold), run-length encode the boolean smoking
stream, split everything at midnight, and group into day strings.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from datetime import date

import numpy as np

from .ingest import SampleSet
from .model import (
    KIND_ACTIVITY_STRESS,
    KIND_SMOKE,
    SECONDS_PER_DAY,
    STREAM_ACTIVITY,
    STREAM_SMOKING,
    STREAM_STRESS,
    STRESS_SENTINEL,
    DayString,
    DerivationConfig,
    EventRecord,
    ValidationError,
    day_start_epoch,
    epoch_day,
)

FLAT_STREAM_EPS = 1e-12


@dataclass(frozen=True)
class LabeledInterval:
    """One fixed-width window with its activity/stress classification."""

    start: int
    end: int
    activity_level: str
    stress_level: str


@dataclass
class DerivationResult:
    events: list[EventRecord]
    day_strings: list[DayString]
    warnings: list[str] = field(default_factory=list)
    thresholds: dict[str, dict[str, float | None]] = field(default_factory=dict)

    def day_string_map(self) -> dict[tuple[str, str], DayString]:
        return {ds.key: ds for ds in self.day_strings}


# ---------------------------------------------------------------------------
# Normalization
# ---------------------------------------------------------------------------

def normalize_values(
    values: np.ndarray, sentinel: float | None = None
) -> tuple[np.ndarray, bool]:
    """Min-max scale to [0, 1], ignoring and preserving sentinel entries.

    Returns (normalized, is_constant); a constant stream maps to all zeros.
    """
    values = np.asarray(values, dtype=np.float64)
    out = values.copy()
    mask = np.ones(len(values), dtype=bool)
    if sentinel is not None:
        mask = values != sentinel
    if not mask.any():
        return out, False
    lo = values[mask].min()
    hi = values[mask].max()
    if hi - lo < FLAT_STREAM_EPS:
        out[mask] = 0.0
        return out, True
    out[mask] = (values[mask] - lo) / (hi - lo)
    return out, False


def normalize_stream(
    samples: SampleSet, participant_id: str, stream: str
) -> tuple[np.ndarray, np.ndarray, list[str]]:
    """Normalized copy of one (participant, stream) series with warnings."""
    times, values = samples.get(participant_id, stream)
    sentinel = STRESS_SENTINEL if stream == STREAM_STRESS else None
    normalized, constant = normalize_values(values, sentinel=sentinel)
    warnings = []
    if constant:
        warnings.append(
            f"constant {stream} stream for participant {participant_id}; normalized to 0"
        )
    return times, normalized, warnings


# ---------------------------------------------------------------------------
# Window discretization
# ---------------------------------------------------------------------------

def quantile_thresholds(
    values: np.ndarray, low_q: float, high_q: float
) -> tuple[float, float] | None:
    """Linear-interpolation quantile cut points, or None for empty input."""
    if len(values) == 0:
        return None
    lo, hi = np.quantile(values, [low_q, high_q], method="linear")
    return float(lo), float(hi)


def _classify(mean: float, thresholds: tuple[float, float]) -> str:
    lo, hi = thresholds
    if mean < lo:
        return "none"
    if mean < hi:
        return "low"
    return "high"


def _window_stats(
    times: np.ndarray, values: np.ndarray, interval_s: int, valid: np.ndarray
) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    """Per-window (window_id, n_samples, n_valid, mean_of_valid) for sorted times."""
    win = times // interval_s
    ids, starts = np.unique(win, return_index=True)
    counts = np.diff(np.append(starts, len(win)))
    valid_f = valid.astype(np.float64)
    n_valid = np.add.reduceat(valid_f, starts)
    sums = np.add.reduceat(values * valid_f, starts)
    with np.errstate(invalid="ignore", divide="ignore"):
        means = np.where(n_valid > 0, sums / n_valid, np.nan)
    return ids, counts, n_valid, means


def discretize_participant(
    activity: tuple[np.ndarray, np.ndarray],
    stress: tuple[np.ndarray, np.ndarray],
    config: DerivationConfig,
    activity_thresholds: tuple[float, float] | None,
    stress_thresholds: tuple[float, float] | None,
) -> list[LabeledInterval]:
    """Label every midnight-aligned window that contains activity samples.

    Stress is classified from the same window's stress samples: `unknown`
    when the window has none (or only sentinels), `masked` under high
    activity. Windows without activity samples emit nothing.
    """
    act_times, act_values = activity
    if len(act_times) == 0 or activity_thresholds is None:
        return []
    str_times, str_values = stress

    ids, _, _, act_means = _window_stats(
        act_times, act_values, config.interval_s, np.ones(len(act_times), dtype=bool)
    )

    stress_mean_by_win: dict[int, float | None] = {}
    if len(str_times):
        s_ids, _, s_valid, s_means = _window_stats(
            str_times, str_values, config.interval_s, str_values != STRESS_SENTINEL
        )
        for wid, n_ok, mean in zip(s_ids.tolist(), s_valid.tolist(), s_means.tolist()):
            stress_mean_by_win[wid] = mean if n_ok > 0 else None

    intervals: list[LabeledInterval] = []
    for wid, act_mean in zip(ids.tolist(), act_means.tolist()):
        activity_level = _classify(act_mean, activity_thresholds)
        if activity_level == "high":
            stress_level = "masked"
        else:
            s_mean = stress_mean_by_win.get(wid)
            if s_mean is None or stress_thresholds is None:
                stress_level = "unknown"
            else:
                stress_level = _classify(s_mean, stress_thresholds)
        start = int(wid) * config.interval_s
        intervals.append(
            LabeledInterval(start, start + config.interval_s, activity_level, stress_level)
        )
    return intervals


# ---------------------------------------------------------------------------
# Merging windows into events
# ---------------------------------------------------------------------------

def _split_at_midnight(
    participant_id: str, start: int, end: int, make_event
) -> list[EventRecord]:
    events = []
    cursor = start
    while cursor < end:
        boundary = day_start_epoch(epoch_day(cursor)) + SECONDS_PER_DAY
        piece_end = min(end, boundary)
        events.append(make_event(participant_id, epoch_day(cursor), cursor, piece_end))
        cursor = piece_end
    return events


def merge_intervals(
    intervals: list[LabeledInterval],
    config: DerivationConfig,
    participant_id: str,
) -> list[EventRecord]:
    """Merge maximal same-label runs into events, splitting at midnight.

    A run also breaks when the missing-data gap between adjacent intervals
    exceeds gap_threshold_s; smaller gaps are absorbed into the event span.
    """
    events: list[EventRecord] = []
    if not intervals:
        return events
    ordered = sorted(intervals, key=lambda iv: iv.start)

    def flush(run_start: int, run_end: int, act: str, stress: str) -> None:
        events.extend(
            _split_at_midnight(
                participant_id,
                run_start,
                run_end,
                lambda pid, day, s, e: EventRecord(
                    participant_id=pid,
                    day=day,
                    start=s,
                    end=e,
                    kind=KIND_ACTIVITY_STRESS,
                    activity_level=act,
                    stress_level=stress,
                ),
            )
        )

    run = ordered[0]
    run_start, run_end = run.start, run.end
    label = (run.activity_level, run.stress_level)
    for iv in ordered[1:]:
        gap = iv.start - run_end
        if (iv.activity_level, iv.stress_level) == label and gap <= config.gap_threshold_s:
            run_end = iv.end
        else:
            flush(run_start, run_end, *label)
            run_start, run_end = iv.start, iv.end
            label = (iv.activity_level, iv.stress_level)
    flush(run_start, run_end, *label)
    return events


# ---------------------------------------------------------------------------
# Smoking stream
# ---------------------------------------------------------------------------

def _nominal_period(times: np.ndarray) -> int:
    """Modal inter-sample spacing (the sampling period), 1 s fallback."""
    if len(times) < 2:
        return 1
    diffs = np.diff(times)
    diffs = diffs[diffs > 0]
    if len(diffs) == 0:
        return 1
    spacings, counts = np.unique(diffs, return_counts=True)
    return int(spacings[np.argmax(counts)])


def derive_smoke_events(
    times: np.ndarray,
    values: np.ndarray,
    participant_id: str,
    gap_threshold_s: int = 3600,
) -> list[EventRecord]:
    """Run-length encode value==1 samples into SMOKE events.

    A run breaks on a 0 sample or a data gap beyond gap_threshold_s; a lone
    1-sample becomes an event one sample period long. Events split at
    midnight.
    """
    events: list[EventRecord] = []
    if len(times) == 0:
        return events
    period = _nominal_period(times)
    one_idx = np.flatnonzero(values == 1.0)
    if len(one_idx) == 0:
        return events
    breaks = np.flatnonzero(
        (np.diff(one_idx) > 1)
        | (np.diff(times[one_idx]) > gap_threshold_s)
    )
    groups = np.split(one_idx, breaks + 1)

    def make(pid: str, day: date, s: int, e: int) -> EventRecord:
        return EventRecord(
            participant_id=pid, day=day, start=s, end=e, kind=KIND_SMOKE
        )

    for group in groups:
        start = int(times[group[0]])
        end = int(times[group[-1]]) + period
        events.extend(_split_at_midnight(participant_id, start, end, make))
    return events


# ---------------------------------------------------------------------------
# Day segmentation
# ---------------------------------------------------------------------------

def segment_days(events: list[EventRecord]) -> list[DayString]:
    """Group events into one DayString per (participant, day) with >=1 event.

    Events order by start time; simultaneous starts break ties by kind name
    then end time so day strings are canonical.
    """
    grouped: dict[tuple[str, date], list[EventRecord]] = {}
    for ev in events:
        grouped.setdefault((ev.participant_id, ev.day), []).append(ev)
    out = []
    for (pid, day) in sorted(grouped, key=lambda k: (k[0], k[1])):
        evs = sorted(grouped[(pid, day)], key=lambda e: (e.start, e.kind, e.end))
        out.append(DayString(participant_id=pid, day=day, events=evs))
    return out


# ---------------------------------------------------------------------------
# Full derivation
# ---------------------------------------------------------------------------

def derive_events(samples: SampleSet, config: DerivationConfig) -> DerivationResult:
    """Run the full per-participant derivation over a sample set."""
    all_events: list[EventRecord] = []
    warnings: list[str] = []
    thresholds: dict[str, dict[str, float | None]] = {}

    participants = sorted(
        {pid for (pid, _stream) in samples.series}
    )
    for pid in participants:
        act_times, act_norm, w1 = normalize_stream(samples, pid, STREAM_ACTIVITY)
        str_times, str_norm, w2 = normalize_stream(samples, pid, STREAM_STRESS)
        warnings.extend(w1 + w2)

        act_thresholds = quantile_thresholds(
            act_norm, config.low_quantile, config.high_quantile
        )
        if config.stress_low is not None:
            str_thresholds: tuple[float, float] | None = (
                config.stress_low,
                config.stress_high,
            )
        else:
            str_thresholds = quantile_thresholds(
                str_norm[str_norm != STRESS_SENTINEL],
                config.low_quantile,
                config.high_quantile,
            )
        thresholds[pid] = {
            "activity_low": act_thresholds[0] if act_thresholds else None,
            "activity_high": act_thresholds[1] if act_thresholds else None,
            "stress_low": str_thresholds[0] if str_thresholds else None,
            "stress_high": str_thresholds[1] if str_thresholds else None,
        }

        intervals = discretize_participant(
            (act_times, act_norm),
            (str_times, str_norm),
            config,
            act_thresholds,
            str_thresholds,
        )
        all_events.extend(merge_intervals(intervals, config, pid))

        smoke_times, smoke_values = samples.get(pid, STREAM_SMOKING)
        all_events.extend(
            derive_smoke_events(
                smoke_times, smoke_values, pid, gap_threshold_s=config.gap_threshold_s
            )
        )

    all_events.sort(key=lambda e: (e.participant_id, e.start, e.kind, e.end))
    _check_no_overlap(all_events)
    return DerivationResult(
        events=all_events,
        day_strings=segment_days(all_events),
        warnings=warnings,
        thresholds=thresholds,
    )


def _check_no_overlap(events: list[EventRecord]) -> None:
    """Scan-check the per-(participant, kind) non-overlap invariant.

    MOTIF events are keyed per motif id: distinct motifs may legitimately
    cover overlapping spans once promoted side by side.
    """
    last_end: dict[tuple[str, str, str | None], int] = {}
    ordered = sorted(events, key=lambda e: (e.participant_id, e.kind, str(e.motif_id), e.start))
    for ev in ordered:
        key = (ev.participant_id, ev.kind, ev.motif_id)
        if key in last_end and ev.start < last_end[key]:
            raise ValidationError(
                f"overlapping {ev.kind} events for participant {ev.participant_id}"
            )
        last_end[key] = ev.end


def rebuild_day_strings(
    base_events: list[EventRecord], extra_events: list[EventRecord]
) -> list[DayString]:
    """Day strings over the union of event lists, deduplicated."""
    merged = list(dict.fromkeys(base_events + extra_events))
    _check_no_overlap(merged)
    return segment_days(merged)
