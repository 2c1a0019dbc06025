from __future__ import annotations

from chronoseq.mining import mine
from chronoseq.model import MiningConfig
from chronoseq.report import day_strips_figure, render_run_report, scatter_figure, write_sequences_csv


def _run_payload(derived):
    result = mine(derived.day_strings, MiningConfig(min_support=1, max_gap=2, max_len=3))
    return result.to_json_dict(run_id="run-report-test"), derived


def test_sequences_csv_rows(tmp_path, derived):
    payload, _ = _run_payload(derived)
    path = tmp_path / "sequences.csv"
    write_sequences_csv(payload, path)
    lines = path.read_text().splitlines()
    assert len(lines) == 1 + len(payload["sequences"])
    assert lines[0].startswith("id,pattern,")


def test_scatter_figure_written(tmp_path, derived):
    payload, _ = _run_payload(derived)
    path = tmp_path / "scatter.png"
    scatter_figure(payload, path)
    assert path.stat().st_size > 1000


def test_day_strips_with_highlight(tmp_path, derived):
    payload, derivation = _run_payload(derived)
    days = [
        {
            "participant_id": ds.participant_id,
            "day": ds.day.isoformat(),
            "events": [ev.to_json_dict() for ev in ds.events],
        }
        for ds in derivation.day_strings
    ]
    first = days[0]
    highlight = [
        {
            "participant_id": first["participant_id"],
            "day": first["day"],
            "start": first["events"][0]["start"],
            "end": first["events"][0]["end"],
        }
    ]
    path = tmp_path / "strips.png"
    day_strips_figure(days, path, highlight=highlight)
    assert path.stat().st_size > 1000


def test_render_run_report_bundle(tmp_path, derived):
    payload, derivation = _run_payload(derived)
    days = [
        {
            "participant_id": ds.participant_id,
            "day": ds.day.isoformat(),
            "events": [ev.to_json_dict() for ev in ds.events],
        }
        for ds in derivation.day_strings
    ]
    written = render_run_report(payload, tmp_path / "bundle", day_strings=days)
    names = {p.name for p in written}
    assert names == {"sequences.csv", "scatter.png", "day_strips.png"}
    for path in written:
        assert path.exists()
