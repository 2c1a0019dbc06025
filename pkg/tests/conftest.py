from __future__ import annotations

import numpy as np
import pytest

from chronoseq.events import derive_events
from chronoseq.ingest import SampleSet
from chronoseq.model import DerivationConfig

from generators import continuous_stream, BASE_DAY


@pytest.fixture
def rng():
    return np.random.default_rng(20240101)


@pytest.fixture
def small_csv_text():
    return (
        "participant_id,stream,timestamp,value\n"
        "p1,activity,2024-01-01T09:00:00Z,0.1\n"
        "p1,activity,2024-01-01T09:00:01Z,0.5\n"
        "p1,activity,2024-01-01T09:00:02Z,0.9\n"
    )


@pytest.fixture
def two_participant_samples(rng):
    """Two participants, two days each, several wear hours at 1 Hz."""
    from datetime import timedelta

    records = []
    for pid in ("p1", "p2"):
        for d in range(2):
            day = BASE_DAY + timedelta(days=d)
            records += continuous_stream(pid, day, 9 * 3600, 3600 * 2, rng, "activity")
            records += continuous_stream(pid, day, 9 * 3600, 3600 * 2, rng, "stress")
            smoke_base = records[-1][2] - 3600
            records += [
                (pid, "smoking", smoke_base + i, 1.0 if i < 30 else 0.0)
                for i in range(60)
            ]
    return SampleSet.from_records(records)


@pytest.fixture
def derived(two_participant_samples):
    return derive_events(two_participant_samples, DerivationConfig())
