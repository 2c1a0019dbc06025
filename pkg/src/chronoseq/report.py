"""Report rendering: scatterplot and day-strip figures plus CSV summaries."""

from __future__ import annotations

import csv
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
from matplotlib.patches import Rectangle

from .model import KIND_ACTIVITY_STRESS, KIND_SMOKE, day_start_epoch

ACTIVITY_SHADE = {"none": "#c6dbef", "low": "#6baed6", "high": "#2171b5"}
FIG_DPI = 150


def _fig_size(width: float = 6.4) -> tuple[float, float]:
    golden = (5 ** 0.5 - 1) / 2
    return (width, width * golden)


def write_sequences_csv(run_payload: dict, path: Path) -> None:
    """Delimited summary of a mining run, one row per sequence."""
    with open(path, "w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle)
        writer.writerow(
            ["id", "pattern", "support_days", "total_occurrences", "avg_per_day", "quadrant"]
        )
        for seq in run_payload["sequences"]:
            scatter = seq.get("scatter", {})
            writer.writerow(
                [
                    seq["id"],
                    " -> ".join(seq["symbols"]),
                    seq["support_days"],
                    seq["total_occurrences"],
                    f"{scatter.get('y', 0):.4f}",
                    scatter.get("quadrant", ""),
                ]
            )


def scatter_figure(run_payload: dict, path: Path, y_midpoint: float = 3.0) -> None:
    """Sequence prevalence scatter: days found vs mean occurrences per day,
    quadrant guides at the configured midpoints."""
    sequences = run_payload["sequences"]
    total_days = max(1, run_payload.get("total_days", 1))
    xs = [seq["scatter"]["x"] for seq in sequences]
    ys = [seq["scatter"]["y"] for seq in sequences]
    sizes = [18 + 6 * len(seq["symbols"]) for seq in sequences]

    fig, ax = plt.subplots(figsize=_fig_size())
    ax.scatter(xs, ys, s=sizes, alpha=0.65, edgecolor="black", linewidth=0.4)
    ax.axvline(total_days / 2, color="gray", linestyle="--", linewidth=0.8)
    ax.axhline(y_midpoint, color="gray", linestyle="--", linewidth=0.8)
    ax.set_xlabel("days containing the sequence")
    ax.set_ylabel("mean occurrences per day")
    ax.set_title(f"frequent sequences ({len(sequences)})")
    ax.set_xlim(left=0)
    ax.set_ylim(bottom=0)
    fig.tight_layout()
    fig.savefig(path, dpi=FIG_DPI)
    plt.close(fig)


def day_strips_figure(
    day_strings: list[dict],
    path: Path,
    max_strips: int = 20,
    highlight: list[dict] | None = None,
) -> None:
    """Per-(participant, day) strips of events positioned by clock time.

    Activity fill darkness encodes level, red markers are smoking episodes,
    hatched bars are stress-masked windows; optional occurrence spans are
    outlined.
    """
    from .model import parse_timestamp

    strips = day_strings[:max_strips]
    fig, ax = plt.subplots(figsize=_fig_size(8.0))
    for row, ds in enumerate(strips):
        base = day_start_epoch(_parse_day(ds["day"]))
        for ev in ds["events"]:
            start = (parse_timestamp(ev["start"]) - base) / 3600.0
            width = (parse_timestamp(ev["end"]) - parse_timestamp(ev["start"])) / 3600.0
            if ev["kind"] == KIND_ACTIVITY_STRESS:
                color = ACTIVITY_SHADE.get(ev.get("activity_level", "none"), "#cccccc")
                hatch = "//" if ev.get("stress_level") == "masked" else None
                ax.add_patch(
                    Rectangle(
                        (start, row + 0.1), max(width, 0.02), 0.8,
                        facecolor=color, hatch=hatch, edgecolor="none",
                    )
                )
            elif ev["kind"] == KIND_SMOKE:
                ax.plot([start, start], [row + 0.1, row + 0.9], color="red", linewidth=1.2)
            else:
                ax.add_patch(
                    Rectangle(
                        (start, row + 0.25), max(width, 0.02), 0.5,
                        facecolor="#9e9ac8", edgecolor="none",
                    )
                )
    for span in highlight or []:
        row = next(
            (
                i
                for i, ds in enumerate(strips)
                if ds["participant_id"] == span["participant_id"] and ds["day"] == span["day"]
            ),
            None,
        )
        if row is None:
            continue
        base = day_start_epoch(_parse_day(span["day"]))
        start = (parse_timestamp(span["start"]) - base) / 3600.0
        width = (parse_timestamp(span["end"]) - parse_timestamp(span["start"])) / 3600.0
        ax.add_patch(
            Rectangle(
                (start, row + 0.02), max(width, 0.05), 0.96,
                facecolor="none", edgecolor="orange", linewidth=1.2,
            )
        )

    ax.set_ylim(0, max(1, len(strips)))
    ax.set_xlim(0, 24)
    ax.set_xlabel("hour of day (UTC)")
    ax.set_yticks([i + 0.5 for i in range(len(strips))])
    ax.set_yticklabels([f"{ds['participant_id']} {ds['day']}" for ds in strips], fontsize=6)
    ax.invert_yaxis()
    fig.tight_layout()
    fig.savefig(path, dpi=FIG_DPI)
    plt.close(fig)


def _parse_day(text: str):
    from datetime import date

    return date.fromisoformat(text)


def render_run_report(
    run_payload: dict,
    out_dir: Path,
    day_strings: list[dict] | None = None,
) -> list[Path]:
    """Render the standard report bundle for a mining run into out_dir."""
    out_dir.mkdir(parents=True, exist_ok=True)
    written = []
    csv_path = out_dir / "sequences.csv"
    write_sequences_csv(run_payload, csv_path)
    written.append(csv_path)
    scatter_path = out_dir / "scatter.png"
    scatter_figure(run_payload, scatter_path)
    written.append(scatter_path)
    if day_strings:
        strips_path = out_dir / "day_strips.png"
        day_strips_figure(day_strings, strips_path)
        written.append(strips_path)
    return written
