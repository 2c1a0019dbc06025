from __future__ import annotations

import pytest

from chronoseq.alignment import AlignmentEngine, assign_chain
from chronoseq.mining import mine, pattern_id
from chronoseq.model import MiningConfig, ValidationError

from generators import make_day, random_day_strings, sym
from oracles import chain_assignment_exists, frequent_patterns


def build_engine(days, config=None):
    config = config or MiningConfig(min_support=1, max_gap=None, max_len=4)
    result = mine(days, config)
    return AlignmentEngine("run-test", days, result)


def sid(letters: str) -> str:
    return pattern_id(tuple(sym(c) for c in letters))


# ---------------------------------------------------------------------------
# assign_chain
# ---------------------------------------------------------------------------

def test_chain_simple_between():
    day = make_day("FXG")
    occs = assign_chain(day, [(sym("F"),), (sym("G"),)], None)
    assert occs is not None
    assert occs[0].event_indices == (0,)
    assert occs[1].event_indices == (2,)


def test_chain_order_violation_returns_none():
    day = make_day("GF")
    assert assign_chain(day, [(sym("F"),), (sym("G"),)], None) is None


def test_chain_leftmost_anchor():
    day = make_day("FFG")
    occs = assign_chain(day, [(sym("F"),), (sym("G"),)], None)
    assert occs[0].event_indices == (0,)


def test_chain_requires_time_separation():
    # overlapping events: F spans the whole morning, G starts inside it
    from chronoseq.model import EventRecord, day_start_epoch
    from generators import BASE_DAY
    from chronoseq.model import DayString

    base = day_start_epoch(BASE_DAY)
    long_f = EventRecord("p1", BASE_DAY, base + 3600, base + 5 * 3600, "MOTIF", motif_id="F")
    inside_g = EventRecord("p1", BASE_DAY, base + 2 * 3600, base + 2 * 3600 + 60, "SMOKE")
    ds = DayString("p1", BASE_DAY, sorted([long_f, inside_g], key=lambda e: e.start))
    # G starts before F ends -> no time-ordered chain
    assert assign_chain(ds, [(sym("F"),), ("smoke",)], None) is None


def test_chain_greedy_matches_exhaustive(rng):
    violations = 0
    for _ in range(200):
        day = random_day_strings(rng, n_days=1)[0]
        n_focals = int(rng.integers(1, 4))
        patterns = []
        for _ in range(n_focals):
            length = int(rng.integers(1, 3))
            patterns.append(
                tuple(sym("ABCDE"[int(rng.integers(5))]) for _ in range(length))
            )
        max_gap = (0, 1, 2, None)[int(rng.integers(4))]
        greedy = assign_chain(day, patterns, max_gap)
        exists = chain_assignment_exists(day, patterns, max_gap)
        if (greedy is not None) != exists:
            violations += 1
    assert violations == 0


# ---------------------------------------------------------------------------
# cohorts
# ---------------------------------------------------------------------------

def test_single_focal_cohort_equals_support_days():
    days = [make_day("AB", day=i) for i in range(4)] + [make_day("CB", day=4)]
    engine = build_engine(days)
    cohort = engine.compute_cohort([sid("A")])
    support = engine.sequences[sid("A")].support_days
    assert len(cohort) == support == 4


def test_and_semantics_monotone():
    days = [make_day("ABC", day=0), make_day("AC", day=1), make_day("AB", day=2)]
    engine = build_engine(days)
    single = engine.compute_cohort([sid("A")])
    double = engine.compute_cohort([sid("A"), sid("C")])
    assert set(double) <= set(single)
    assert len(double) == 2


def test_never_cooccurring_chain_empty():
    days = [make_day("AB", day=0), make_day("BA", day=1)]
    engine = build_engine(days)
    # B then A then B never happens in either day
    cohort = engine.compute_cohort([sid("B"), sid("A"), sid("B")])
    assert cohort == {}


def test_unknown_sequence_id_errors():
    engine = build_engine([make_day("AB")])
    with pytest.raises(ValidationError):
        engine.compute_cohort(["nonsense"])


# ---------------------------------------------------------------------------
# timelines: add / remove / clone
# ---------------------------------------------------------------------------

def corpus():
    return [
        make_day("FABG", day=0),
        make_day("FBG", day=1),
        make_day("FAG", day=2),
        make_day("FG", day=3),
        make_day("AFBG", day=4),
    ]


def test_add_focal_narrows_and_remove_restores():
    engine = build_engine(corpus())
    timeline = engine.create_timeline([sid("F")])
    original = set(timeline.cohort)
    engine.add_focal(timeline, sid("G"), 1)
    assert set(timeline.cohort) <= original
    engine.remove_focal(timeline, 1)
    assert set(timeline.cohort) == original


def test_add_focal_can_empty_cohort():
    days = [make_day("AB", day=0), make_day("AB", day=1)]
    engine = build_engine(days)
    timeline = engine.create_timeline([sid("B")])
    engine.add_focal(timeline, sid("A"), 1)  # A never follows B
    assert timeline.cohort == {}


def test_add_focal_invalid_position():
    engine = build_engine(corpus())
    timeline = engine.create_timeline([sid("F")])
    with pytest.raises(ValidationError):
        engine.add_focal(timeline, sid("G"), 5)


def test_remove_last_focal_rejected():
    engine = build_engine(corpus())
    timeline = engine.create_timeline([sid("F")])
    with pytest.raises(ValidationError):
        engine.remove_focal(timeline, 0)


def test_clone_is_isolated():
    engine = build_engine(corpus())
    timeline = engine.create_timeline([sid("F")])
    before_chain = list(timeline.focal_chain)
    before_cohort = dict(timeline.cohort)
    clone = engine.clone_timeline(timeline)
    assert clone.parent_id == timeline.id
    assert clone.id != timeline.id
    engine.add_focal(clone, sid("G"), 1)
    assert timeline.focal_chain == before_chain
    assert timeline.cohort == before_cohort


def test_clone_of_clone_parent_chain():
    engine = build_engine(corpus())
    timeline = engine.create_timeline([sid("F")])
    clone = engine.clone_timeline(timeline)
    grand = engine.clone_timeline(clone)
    assert grand.parent_id == clone.id
    assert clone.parent_id == timeline.id


def test_unedited_clone_identical_results():
    engine = build_engine(corpus())
    timeline = engine.create_timeline([sid("F"), sid("G")])
    clone = engine.clone_timeline(timeline)
    assert clone.cohort == timeline.cohort
    adj_a = engine.adjacent(timeline, "between", 0)
    adj_b = engine.adjacent(clone, "between", 0)
    assert [e.to_json_dict() for e in adj_a] == [e.to_json_dict() for e in adj_b]


# ---------------------------------------------------------------------------
# adjacency
# ---------------------------------------------------------------------------

def test_between_region_contents():
    engine = build_engine(corpus())
    timeline = engine.create_timeline([sid("F"), sid("G")])
    assert len(timeline.cohort) == 5
    between = engine.adjacent(timeline, "between", 0)
    by_symbols = {tuple(e.sequence.symbols): e for e in between}
    # A appears between F..G on days 0 and 2; B on days 0, 1, 4
    assert by_symbols[(sym("B"),)].region_support == 3
    assert by_symbols[(sym("A"),)].region_support == 2
    assert by_symbols[(sym("B"),)].rank == 1


def test_region_support_against_bruteforce():
    engine = build_engine(corpus())
    timeline = engine.create_timeline([sid("F"), sid("G")])
    slices = engine._region_slices(timeline, "between", 0)
    region_days = [region.symbols for _, region, _ in slices]
    expected = frequent_patterns(region_days, 1, None, 4)
    got = {
        tuple(e.sequence.symbols): e.region_support
        for e in engine.adjacent(timeline, "between", 0, top_n=100)
    }
    assert got == expected


def test_pattern_on_both_sides_listed_independently():
    days = [make_day("AFA", day=i) for i in range(3)]
    engine = build_engine(days)
    timeline = engine.create_timeline([sid("F")])
    before = engine.adjacent(timeline, "before")
    after = engine.adjacent(timeline, "after")
    assert (sym("A"),) in {tuple(e.sequence.symbols) for e in before}
    assert (sym("A"),) in {tuple(e.sequence.symbols) for e in after}
    mean_before = [e for e in before if e.sequence.symbols == (sym("A"),)][0].mean_offset_s
    mean_after = [e for e in after if e.sequence.symbols == (sym("A"),)][0].mean_offset_s
    assert mean_before < 0 < mean_after


def test_empty_between_spans_empty_list():
    days = [make_day("FG", day=i) for i in range(3)]
    engine = build_engine(days)
    timeline = engine.create_timeline([sid("F"), sid("G")])
    assert engine.adjacent(timeline, "between", 0) == []


def test_between_invalid_index_errors():
    engine = build_engine(corpus())
    timeline = engine.create_timeline([sid("F")])
    with pytest.raises(ValidationError):
        engine.adjacent(timeline, "between", 0)


def test_region_exclusivity(rng):
    days = random_day_strings(rng, n_days=12)
    engine = build_engine(days, MiningConfig(min_support=2, max_gap=2, max_len=3))
    seq_ids = [s.id for s in engine.result.sequences if len(s.symbols) == 1]
    if len(seq_ids) < 2:
        pytest.skip("corpus too sparse")
    timeline = engine.create_timeline(seq_ids[:2])
    for selector, gap in (("before", None), ("between", 0), ("after", None)):
        for _full, region, _bound in engine._region_slices(timeline, selector, gap):
            key = (region.participant_id, region.day.isoformat())
            assignment = timeline.cohort[key]
            matched = {
                idx for occ in assignment.occurrences for idx in occ.event_indices
            }
            full_events = engine.day_strings[key].events
            region_positions = {
                full_events.index(ev) for ev in region.events
            }
            assert region_positions.isdisjoint(matched)


def test_adjacency_consistency_support_counts(rng):
    days = random_day_strings(rng, n_days=10)
    engine = build_engine(days, MiningConfig(min_support=1, max_gap=2, max_len=3))
    seq_ids = [s.id for s in engine.result.sequences]
    timeline = engine.create_timeline(seq_ids[:1])
    for entry in engine.adjacent(timeline, "before", top_n=50):
        days_with = {
            (occ.participant_id, occ.day) for occ in entry.sequence.occurrences
        }
        assert entry.region_support == len(days_with)


def test_pagination():
    days = [make_day("ABCDEF" + "G", day=i) for i in range(3)]
    engine = build_engine(days, MiningConfig(min_support=3, max_gap=None, max_len=2))
    timeline = engine.create_timeline([sid("G")])
    page0 = engine.adjacent(timeline, "before", top_n=5, page=0)
    page1 = engine.adjacent(timeline, "before", top_n=5, page=1)
    assert len(page0) == 5
    assert page1  # further entries exist
    assert {e.rank for e in page0} == {1, 2, 3, 4, 5}
    assert min(e.rank for e in page1) == 6


# ---------------------------------------------------------------------------
# comparison
# ---------------------------------------------------------------------------

def test_compare_identical():
    engine = build_engine(corpus())
    timeline = engine.create_timeline([sid("F"), sid("G")])
    clone = engine.clone_timeline(timeline)
    report = engine.compare_timelines(timeline, clone)
    assert report["cohort"]["jaccard"] == 1.0
    assert report["cohort"]["a_only"] == report["cohort"]["b_only"] == 0
    for region in report["regions"]:
        assert region["only_a"] == region["only_b"] == []
        for delta in region["deltas"]:
            assert delta["support_a"] == delta["support_b"]


def test_compare_disjoint_cohorts():
    days = [make_day("AX", day=0), make_day("BY", day=1)]
    engine = build_engine(days)
    t_a = engine.create_timeline([sid("A")])
    t_b = engine.create_timeline([sid("B")])
    report = engine.compare_timelines(t_a, t_b)
    assert report["cohort"]["jaccard"] == 0.0
    assert report["cohort"]["shared"] == 0


def test_compare_narrowed_clone():
    engine = build_engine(corpus())
    timeline = engine.create_timeline([sid("F")])
    clone = engine.clone_timeline(timeline)
    engine.add_focal(clone, sid("G"), 1)
    report = engine.compare_timelines(timeline, clone)
    assert report["cohort"]["b_only"] == 0  # clone cohort is a subset
    assert report["cohort"]["shared"] == len(clone.cohort)


def test_compare_different_runs_rejected():
    engine_a = build_engine(corpus())
    engine_b = AlignmentEngine("run-other", corpus(), engine_a.result)
    t_a = engine_a.create_timeline([sid("F")])
    t_b = engine_b.create_timeline([sid("F")])
    with pytest.raises(ValidationError):
        engine_a.compare_timelines(t_a, t_b)


# ---------------------------------------------------------------------------
# randomized cohort properties
# ---------------------------------------------------------------------------

def test_cohort_monotonicity_random(rng):
    for _ in range(50):
        days = random_day_strings(rng, n_days=8)
        engine = build_engine(days, MiningConfig(min_support=1, max_gap=2, max_len=3))
        ids = [s.id for s in engine.result.sequences]
        if len(ids) < 2:
            continue
        base = [ids[int(rng.integers(len(ids)))]]
        extended = base + [ids[int(rng.integers(len(ids)))]]
        cohort_base = engine.compute_cohort(base)
        cohort_ext = engine.compute_cohort(extended)
        assert set(cohort_ext) <= set(cohort_base)
