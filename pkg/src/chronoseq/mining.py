"""Frequent-sequence mining over day strings.

Prefix-projection mining with a bounded-gap constraint: support counts one
day at most once, while repetitive (non-overlapping) occurrences per day are
recovered separately by a complete earliest-end matcher, so counts stay
canonical and oracle-checkable.
"""

from __future__ import annotations

import hashlib
from bisect import bisect_left
from dataclasses import dataclass

from .model import DayString, MiningConfig, ValidationError


def pattern_id(symbols: tuple[str, ...] | list[str]) -> str:
    """Stable content hash of the symbol list."""
    digest = hashlib.sha256("\n".join(symbols).encode("utf-8")).hexdigest()
    return digest[:16]


@dataclass(frozen=True)
class Occurrence:
    """One non-overlapping match of a pattern inside a day string."""

    participant_id: str
    day: str
    event_indices: tuple[int, ...]
    start_time: int
    end_time: int

    def to_json_dict(self) -> dict:
        from .model import epoch_to_iso

        return {
            "participant_id": self.participant_id,
            "day": self.day,
            "event_indices": list(self.event_indices),
            "start": epoch_to_iso(self.start_time),
            "end": epoch_to_iso(self.end_time),
        }


@dataclass(frozen=True)
class FrequentSequence:
    id: str
    symbols: tuple[str, ...]
    support_days: int
    total_occurrences: int
    occurrences: tuple[Occurrence, ...]
    intra_offsets: tuple[float, ...]

    def to_json_dict(self, scatter: dict | None = None) -> dict:
        out = {
            "id": self.id,
            "symbols": list(self.symbols),
            "support_days": self.support_days,
            "total_occurrences": self.total_occurrences,
            "intra_offsets": list(self.intra_offsets),
        }
        if scatter is not None:
            out["scatter"] = scatter
        return out


@dataclass(frozen=True)
class ScatterStats:
    days_count: int
    avg_per_day: float
    quadrant: str

    def to_json_dict(self) -> dict:
        return {
            "x": self.days_count,
            "y": self.avg_per_day,
            "quadrant": self.quadrant,
        }


@dataclass
class MiningResult:
    config: MiningConfig
    resolved_min_support: int
    total_days: int
    sequences: list[FrequentSequence]

    def by_id(self) -> dict[str, FrequentSequence]:
        return {seq.id: seq for seq in self.sequences}

    def to_json_dict(self, run_id: str | None = None) -> dict:
        payload = {
            "config": self.config.to_json_dict(),
            "resolved_min_support": self.resolved_min_support,
            "total_days": self.total_days,
            "sequences": [
                seq.to_json_dict(scatter=scatter_stats(seq, self.total_days).to_json_dict())
                for seq in self.sequences
            ],
        }
        if run_id is not None:
            payload["run_id"] = run_id
        return payload


# ---------------------------------------------------------------------------
# Occurrence matching
# ---------------------------------------------------------------------------

def _window_end(position: int, max_gap: int | None, n: int) -> int:
    """Exclusive upper bound of legal positions after `position`."""
    if max_gap is None:
        return n
    return min(n, position + max_gap + 2)


def find_earliest_occurrence(
    symbols: list[str],
    pattern: tuple[str, ...] | list[str],
    start_pos: int,
    max_gap: int | None,
    end_key: list[int] | None = None,
) -> tuple[int, ...] | None:
    """Complete gap-legal match with all indices >= start_pos.

    Among every legal embedding, returns the one ending earliest (ties
    resolved to the lexicographically smallest index vector), or None.
    `end_key` substitutes a per-position ordering for "earliest" (e.g. event
    end times, so chains can minimize wall-clock end instead of index).
    """
    n = len(symbols)
    m = len(pattern)
    if m == 0 or start_pos >= n:
        return None

    # forward feasibility: positions where pattern[0..k] can end
    feasible: list[list[int]] = []
    first = [j for j in range(start_pos, n) if symbols[j] == pattern[0]]
    if not first:
        return None
    feasible.append(first)
    for k in range(1, m):
        prev = feasible[-1]
        ends: list[int] = []
        next_j = 0
        for e in prev:
            hi = _window_end(e, max_gap, n)
            j = max(e + 1, next_j)
            while j < hi:
                if symbols[j] == pattern[k]:
                    ends.append(j)
                j += 1
            next_j = max(next_j, hi)
        if not ends:
            return None
        feasible.append(ends)

    if end_key is None:
        end = feasible[-1][0]
    else:
        end = min(feasible[-1], key=lambda j: (end_key[j], j))

    # backward restriction to embeddings ending exactly at `end`
    allowed: list[list[int]] = [[] for _ in range(m)]
    allowed[m - 1] = [end]
    for k in range(m - 2, -1, -1):
        nxt = allowed[k + 1]
        keep = []
        for i in feasible[k]:
            hi = _window_end(i, max_gap, n)
            pos = bisect_left(nxt, i + 1)
            if pos < len(nxt) and nxt[pos] < hi:
                keep.append(i)
        allowed[k] = keep

    # forward pick: earliest legal event for each element
    indices = [allowed[0][0]]
    for k in range(1, m):
        prev = indices[-1]
        hi = _window_end(prev, max_gap, n)
        pos = bisect_left(allowed[k], prev + 1)
        indices.append(allowed[k][pos])
        assert allowed[k][pos] < hi
    return tuple(indices)


def find_occurrences(
    pattern: tuple[str, ...] | list[str],
    day_string: DayString,
    max_gap: int | None,
) -> list[Occurrence]:
    """Leftmost non-overlapping occurrences, scanning left to right.

    Each found occurrence consumes its index span; scanning resumes after
    its last matched index, which maximizes the non-overlapping count.
    """
    if len(pattern) == 0:
        raise ValidationError("pattern must have length >= 1")
    symbols = day_string.symbols
    events = day_string.events
    out: list[Occurrence] = []
    pos = 0
    while pos < len(symbols):
        match = find_earliest_occurrence(symbols, pattern, pos, max_gap)
        if match is None:
            break
        out.append(
            Occurrence(
                participant_id=day_string.participant_id,
                day=day_string.day.isoformat(),
                event_indices=match,
                start_time=events[match[0]].start,
                end_time=events[match[-1]].end,
            )
        )
        pos = match[-1] + 1
    return out


# ---------------------------------------------------------------------------
# Mining
# ---------------------------------------------------------------------------

def _extensions(
    symbols: list[str], ends: list[int], max_gap: int | None
) -> dict[str, list[int]]:
    """Candidate next symbols mapped to their feasible end positions."""
    n = len(symbols)
    out: dict[str, list[int]] = {}
    next_j = 0
    for e in ends:
        hi = _window_end(e, max_gap, n)
        j = max(e + 1, next_j)
        while j < hi:
            out.setdefault(symbols[j], []).append(j)
            j += 1
        next_j = max(next_j, hi)
    return out


def mine(day_strings: list[DayString], config: MiningConfig) -> MiningResult:
    """All patterns with length <= max_len whose gap-constrained support
    (distinct days containing >= 1 occurrence) meets the resolved minimum.

    Output order is deterministic: support descending, then lexicographic
    symbols.
    """
    if config.max_len < 1:
        raise ValidationError("max_len must be >= 1")
    n_days = len(day_strings)
    resolved = config.resolve_min_support(n_days) if n_days else 1
    if n_days == 0 or resolved > n_days:
        return MiningResult(config, resolved, n_days, [])

    day_symbols = [ds.symbols for ds in day_strings]
    found: list[tuple[tuple[str, ...], list[int]]] = []

    def dfs(pattern: tuple[str, ...], states: list[tuple[int, list[int]]]) -> None:
        by_symbol: dict[str, list[tuple[int, list[int]]]] = {}
        first = len(pattern) == 0
        for day_idx, ends in states:
            ext = _extensions(day_symbols[day_idx], ends, None if first else config.max_gap)
            for sym, new_ends in ext.items():
                by_symbol.setdefault(sym, []).append((day_idx, new_ends))
        for sym in sorted(by_symbol):
            supporters = by_symbol[sym]
            if len(supporters) < resolved:
                continue
            extended = pattern + (sym,)
            found.append((extended, [d for d, _ in supporters]))
            if len(extended) < config.max_len:
                dfs(extended, supporters)

    dfs((), [(i, [-1]) for i in range(n_days)])

    sequences = [
        _build_sequence(pattern, support_days, day_strings, config.max_gap)
        for pattern, support_days in found
    ]
    sequences.sort(key=lambda s: (-s.support_days, s.symbols))
    return MiningResult(config, resolved, n_days, sequences)


def _build_sequence(
    pattern: tuple[str, ...],
    supporting_days: list[int],
    day_strings: list[DayString],
    max_gap: int | None,
) -> FrequentSequence:
    occurrences: list[Occurrence] = []
    offsets = [0.0] * len(pattern)
    for day_idx in supporting_days:
        events = day_strings[day_idx].events
        for occ in find_occurrences(pattern, day_strings[day_idx], max_gap):
            occurrences.append(occ)
            base = events[occ.event_indices[0]].start
            for k, idx in enumerate(occ.event_indices):
                offsets[k] += events[idx].start - base
    if occurrences:
        offsets = [total / len(occurrences) for total in offsets]

    return FrequentSequence(
        id=pattern_id(pattern),
        symbols=pattern,
        support_days=len(supporting_days),
        total_occurrences=len(occurrences),
        occurrences=tuple(occurrences),
        intra_offsets=tuple(offsets),
    )


# ---------------------------------------------------------------------------
# Display filtering and scatter statistics
# ---------------------------------------------------------------------------

def minimal_prefix_filter(
    sequences: list[FrequentSequence], min_len_display: int
) -> list[FrequentSequence]:
    """Drop short sequences and extensions of kept sequences.

    Keeps sequences of length >= min_len_display such that no kept sequence
    is a strict prefix of another kept one; suppressed extensions remain
    queryable elsewhere.
    """
    eligible = [s for s in sequences if len(s.symbols) >= min_len_display]
    keyset = {s.symbols for s in eligible}
    out = []
    for seq in eligible:
        has_kept_prefix = any(
            seq.symbols[:cut] in keyset
            for cut in range(min_len_display, len(seq.symbols))
        )
        if not has_kept_prefix:
            out.append(seq)
    return out


def scatter_stats(
    sequence: FrequentSequence,
    total_days: int,
    x_midpoint: float | None = None,
    y_midpoint: float = 3.0,
) -> ScatterStats:
    """Scatterplot position: x = days with an occurrence, y = mean
    occurrences per such day; quadrant from the configured midpoints."""
    days_count = sequence.support_days
    avg = sequence.total_occurrences / days_count if days_count else 0.0
    x_mid = total_days / 2 if x_midpoint is None else x_midpoint
    x_high = days_count >= x_mid
    y_high = avg >= y_midpoint
    if x_high and y_high:
        quadrant = "ordinary"
    elif x_high:
        quadrant = "habitual"
    elif y_high:
        quadrant = "focusworthy"
    else:
        quadrant = "rare"
    return ScatterStats(days_count=days_count, avg_per_day=avg, quadrant=quadrant)
