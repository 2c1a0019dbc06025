"""Multi-focal alignment: chain assignments, cohorts, regions, and timelines.

A timeline holds an ordered chain of focal sequences. A day belongs to the
timeline's cohort when every focal occurs in order (AND semantics); the
canonical chain assignment then carves each day into before / between /
after index regions, which are mined for the adjacent sequences ranked on
each side of the chain.
"""

from __future__ import annotations

import uuid
from bisect import bisect_left
from dataclasses import dataclass, field, replace

from .mining import (
    FrequentSequence,
    MiningResult,
    Occurrence,
    find_earliest_occurrence,
    mine,
)
from .model import DayString, ValidationError

DayKey = tuple[str, str]

SELECTOR_BEFORE = "before"
SELECTOR_AFTER = "after"
SELECTOR_BETWEEN = "between"


@dataclass(frozen=True)
class ChainAssignment:
    """Per-focal occurrences for one day, non-overlapping and time-ordered."""

    day_key: DayKey
    occurrences: tuple[Occurrence, ...]


@dataclass(frozen=True)
class AdjacentSequence:
    """One ranked entry of a region's adjacency list."""

    sequence: FrequentSequence
    region_support: int
    mean_offset_s: float
    rank: int

    def to_json_dict(self) -> dict:
        return {
            "id": self.sequence.id,
            "symbols": list(self.sequence.symbols),
            "region_support": self.region_support,
            "mean_offset_s": self.mean_offset_s,
            "rank": self.rank,
        }


@dataclass
class Timeline:
    id: str
    run_id: str
    focal_chain: list[str]
    cohort: dict[DayKey, ChainAssignment]
    parent_id: str | None = None
    _adjacency_cache: dict = field(default_factory=dict, repr=False)

    @property
    def cohort_keys(self) -> set[DayKey]:
        return set(self.cohort)

    def to_json_dict(self) -> dict:
        return {
            "id": self.id,
            "run_id": self.run_id,
            "focal": list(self.focal_chain),
            "cohort_size": len(self.cohort),
            "parent_id": self.parent_id,
        }


def _new_timeline_id() -> str:
    return "tl-" + uuid.uuid4().hex[:12]


def assign_chain(
    day_string: DayString,
    patterns: list[tuple[str, ...]],
    max_gap: int | None,
) -> tuple[Occurrence, ...] | None:
    """Leftmost-greedy chain assignment.

    Binds the occurrence of focal 1 that ends earliest in time, then the
    earliest-ending occurrence of focal 2 starting at or after it ends, and
    so on; on tail failure the focal-1 anchor advances and the search
    retries. Returns the first complete assignment or None.
    """
    symbols = day_string.symbols
    events = day_string.events
    starts = [ev.start for ev in events]
    end_key = [ev.end for ev in events]

    anchor = 0
    while True:
        first = find_earliest_occurrence(
            symbols, patterns[0], anchor, max_gap, end_key=end_key
        )
        if first is None:
            return None
        chain_idx = [first]
        satisfied = True
        for pattern in patterns[1:]:
            boundary = events[chain_idx[-1][-1]].end
            pos = bisect_left(starts, boundary)
            nxt = find_earliest_occurrence(
                symbols, pattern, pos, max_gap, end_key=end_key
            )
            if nxt is None:
                satisfied = False
                break
            chain_idx.append(nxt)
        if satisfied:
            return tuple(
                Occurrence(
                    participant_id=day_string.participant_id,
                    day=day_string.day.isoformat(),
                    event_indices=indices,
                    start_time=events[indices[0]].start,
                    end_time=events[indices[-1]].end,
                )
                for indices in chain_idx
            )
        anchor = first[0] + 1


class AlignmentEngine:
    """Timeline lifecycle over one mining run and its day strings."""

    def __init__(self, run_id: str, day_strings: list[DayString], result: MiningResult):
        self.run_id = run_id
        self.day_strings = {ds.key: ds for ds in day_strings}
        self.result = result
        self.sequences = result.by_id()
        self.timelines: dict[str, Timeline] = {}

    # -- chain / cohort ------------------------------------------------------

    def pattern_of(self, sequence_id: str) -> tuple[str, ...]:
        seq = self.sequences.get(sequence_id)
        if seq is None:
            raise ValidationError(f"unknown sequence id {sequence_id!r}")
        return seq.symbols

    def compute_cohort(
        self,
        focal_chain: list[str],
        restrict_to: set[DayKey] | None = None,
    ) -> dict[DayKey, ChainAssignment]:
        """Days with a full chain assignment; optionally scans only the
        given keys (used when narrowing an existing timeline)."""
        if not focal_chain:
            raise ValidationError("focal chain must be non-empty")
        patterns = [self.pattern_of(sid) for sid in focal_chain]
        keys = restrict_to if restrict_to is not None else self.day_strings.keys()
        cohort: dict[DayKey, ChainAssignment] = {}
        for key in sorted(keys):
            ds = self.day_strings[key]
            occurrences = assign_chain(ds, patterns, self.result.config.max_gap)
            if occurrences is not None:
                cohort[key] = ChainAssignment(day_key=key, occurrences=occurrences)
        return cohort

    # -- timeline lifecycle --------------------------------------------------

    def create_timeline(self, focal_chain: list[str]) -> Timeline:
        timeline = Timeline(
            id=_new_timeline_id(),
            run_id=self.run_id,
            focal_chain=list(focal_chain),
            cohort=self.compute_cohort(focal_chain),
        )
        self.timelines[timeline.id] = timeline
        return timeline

    def add_focal(self, timeline: Timeline, sequence_id: str, position: int) -> Timeline:
        if not (0 <= position <= len(timeline.focal_chain)):
            raise ValidationError(f"invalid focal position {position}")
        self.pattern_of(sequence_id)
        chain = list(timeline.focal_chain)
        chain.insert(position, sequence_id)
        # AND semantics: adding a focal can only narrow, so only the prior
        # cohort needs rescanning.
        timeline.cohort = self.compute_cohort(chain, restrict_to=timeline.cohort_keys)
        timeline.focal_chain = chain
        timeline._adjacency_cache.clear()
        return timeline

    def remove_focal(self, timeline: Timeline, position: int) -> Timeline:
        if not (0 <= position < len(timeline.focal_chain)):
            raise ValidationError(f"invalid focal position {position}")
        if len(timeline.focal_chain) == 1:
            raise ValidationError("cannot remove the last focal from a timeline")
        chain = list(timeline.focal_chain)
        chain.pop(position)
        # removal broadens the cohort: recompute against the full run
        timeline.cohort = self.compute_cohort(chain)
        timeline.focal_chain = chain
        timeline._adjacency_cache.clear()
        return timeline

    def clone_timeline(self, timeline: Timeline) -> Timeline:
        clone = Timeline(
            id=_new_timeline_id(),
            run_id=timeline.run_id,
            focal_chain=list(timeline.focal_chain),
            cohort=dict(timeline.cohort),
            parent_id=timeline.id,
        )
        self.timelines[clone.id] = clone
        return clone

    def drop_timeline(self, timeline_id: str) -> None:
        self.timelines.pop(timeline_id, None)

    # -- regions and adjacency -----------------------------------------------

    def _validate_selector(
        self, timeline: Timeline, selector: str, gap_index: int | None
    ) -> tuple[str, int | None]:
        if selector not in (SELECTOR_BEFORE, SELECTOR_AFTER, SELECTOR_BETWEEN):
            raise ValidationError(f"unknown region selector {selector!r}")
        if selector == SELECTOR_BETWEEN:
            if gap_index is None:
                raise ValidationError("between region requires an index")
            if not (0 <= gap_index < len(timeline.focal_chain) - 1):
                raise ValidationError(
                    f"between index {gap_index} invalid for a "
                    f"{len(timeline.focal_chain)}-focal chain"
                )
            return selector, gap_index
        return selector, None

    def _region_slices(
        self, timeline: Timeline, selector: str, gap_index: int | None
    ) -> list[tuple[DayString, DayString, int]]:
        """(full day, region sub-day, boundary time) per cohort day.

        Region spans exclude every index inside the focal occurrences'
        ranges; the boundary is the adjoining focal edge used for offsets.
        """
        out = []
        for key in sorted(timeline.cohort):
            assignment = timeline.cohort[key]
            ds = self.day_strings[key]
            occs = assignment.occurrences
            if selector == SELECTOR_BEFORE:
                lo, hi = 0, occs[0].event_indices[0]
                boundary = occs[0].start_time
            elif selector == SELECTOR_AFTER:
                lo, hi = occs[-1].event_indices[-1] + 1, len(ds.events)
                boundary = occs[-1].end_time
            else:
                lo = occs[gap_index].event_indices[-1] + 1
                hi = occs[gap_index + 1].event_indices[0]
                boundary = occs[gap_index].end_time
            region = DayString(
                participant_id=ds.participant_id,
                day=ds.day,
                events=ds.events[lo:hi],
            )
            out.append((ds, region, boundary))
        return out

    def adjacent(
        self,
        timeline: Timeline,
        selector: str,
        gap_index: int | None = None,
        top_n: int = 10,
        page: int = 0,
    ) -> list[AdjacentSequence]:
        """Ranked frequent sequences inside one region of the cohort days.

        Mines the region substrings with the run's config (min_support
        resolved against the cohort size), ranks by region support then
        offset proximity, and paginates top_n entries per page.
        """
        selector, gap_index = self._validate_selector(timeline, selector, gap_index)
        if not timeline.cohort:
            return []
        cache_key = (tuple(timeline.focal_chain), selector, gap_index)
        if cache_key not in timeline._adjacency_cache:
            timeline._adjacency_cache[cache_key] = self._mine_region(
                timeline, selector, gap_index
            )
        ranked = timeline._adjacency_cache[cache_key]
        lo = page * top_n
        return ranked[lo : lo + top_n]

    def _mine_region(
        self, timeline: Timeline, selector: str, gap_index: int | None
    ) -> list[AdjacentSequence]:
        slices = self._region_slices(timeline, selector, gap_index)
        regions = [region for _, region, _ in slices]
        boundaries = {
            region.key: boundary for _, region, boundary in slices
        }
        config = self.result.config
        region_config = replace(
            config, min_support=config.resolve_min_support(len(regions))
        )
        mined = mine(regions, region_config)

        entries = []
        for seq in mined.sequences:
            offsets = []
            for occ in seq.occurrences:
                boundary = boundaries[(occ.participant_id, occ.day)]
                if selector == SELECTOR_BEFORE:
                    offsets.append(occ.end_time - boundary)
                else:
                    offsets.append(occ.start_time - boundary)
            mean_offset = sum(offsets) / len(offsets) if offsets else 0.0
            entries.append((seq, mean_offset))

        entries.sort(
            key=lambda item: (-item[0].support_days, abs(item[1]), item[0].symbols)
        )
        return [
            AdjacentSequence(
                sequence=seq,
                region_support=seq.support_days,
                mean_offset_s=mean_offset,
                rank=rank,
            )
            for rank, (seq, mean_offset) in enumerate(entries, start=1)
        ]

    # -- comparison ------------------------------------------------------------

    def compare_timelines(self, a: Timeline, b: Timeline) -> dict:
        """Cohort overlap sizes, Jaccard index, and per-region adjacency diffs."""
        if a.run_id != b.run_id:
            raise ValidationError("timelines belong to different runs")
        keys_a, keys_b = a.cohort_keys, b.cohort_keys
        union = keys_a | keys_b
        shared = keys_a & keys_b
        jaccard = len(shared) / len(union) if union else 1.0

        selectors: list[tuple[str, int | None]] = [(SELECTOR_BEFORE, None)]
        common_gaps = min(len(a.focal_chain), len(b.focal_chain)) - 1
        selectors += [(SELECTOR_BETWEEN, i) for i in range(common_gaps)]
        selectors.append((SELECTOR_AFTER, None))

        regions = []
        for selector, gap_index in selectors:
            adj_a = self.adjacent(a, selector, gap_index, top_n=10**9, page=0)
            adj_b = self.adjacent(b, selector, gap_index, top_n=10**9, page=0)
            support_a = {e.sequence.symbols: e.region_support for e in adj_a}
            support_b = {e.sequence.symbols: e.region_support for e in adj_b}
            only_a = sorted(set(support_a) - set(support_b))
            only_b = sorted(set(support_b) - set(support_a))
            deltas = [
                {
                    "pattern": list(symbols),
                    "support_a": support_a[symbols],
                    "support_b": support_b[symbols],
                }
                for symbols in sorted(set(support_a) & set(support_b))
            ]
            name = selector if gap_index is None else f"{selector}:{gap_index}"
            regions.append(
                {
                    "selector": name,
                    "only_a": [list(s) for s in only_a],
                    "only_b": [list(s) for s in only_b],
                    "deltas": deltas,
                }
            )

        return {
            "cohort": {
                "a_only": len(keys_a - keys_b),
                "b_only": len(keys_b - keys_a),
                "shared": len(shared),
                "jaccard": jaccard,
            },
            "regions": regions,
        }
