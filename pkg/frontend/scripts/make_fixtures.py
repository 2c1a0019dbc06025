"""Record real API responses into frontend test fixtures.

Runs the full backend pipeline on a small deterministic dataset and captures
the exact wire payloads the UI consumes, keyed so the test stub can serve
them: timeline cohort/adjacency responses are keyed by the focal chain
(sequence ids joined with '|') and comparisons by 'chainA__VS__chainB'.

Usage: python scripts/make_fixtures.py  (from frontend/; writes test/fixtures/)
"""

from __future__ import annotations

import json
import sys
from pathlib import Path

import numpy as np
from fastapi.testclient import TestClient

from chronoseq.server import create_app

OUT_DIR = Path(__file__).resolve().parent.parent / "test" / "fixtures"


def make_csv() -> str:
    rng = np.random.default_rng(424242)
    rows = ["participant_id,stream,timestamp,value"]
    base0 = 1704067200  # 2024-01-01T00:00:00Z
    for p in range(4):
        for d in range(4):
            base = base0 + d * 86400 + 9 * 3600 + int(rng.integers(0, 1800))
            blocks = np.repeat(rng.random(10), 300)  # 50 min wear, varied levels
            for i, v in enumerate(blocks):
                rows.append(f"p{p},activity,{base + i},{v:.6f}")
                rows.append(f"p{p},stress,{base + i},{rng.random():.6f}")
            smoke_at = base + int(rng.integers(300, 2400))
            for i in range(90):
                rows.append(f"p{p},smoking,{smoke_at + i},{1 if i % 45 < 15 else 0}")
    return "\n".join(rows) + "\n"


def unwrap(resp):
    assert resp.status_code in (200, 201, 202), resp.text
    return resp.json()["data"]


def poll(client, job_id):
    import time

    for _ in range(500):
        body = unwrap(client.get(f"/api/v1/jobs/{job_id}"))
        if body["state"] == "done":
            return body["result"]
        assert body["state"] != "failed", body
        time.sleep(0.02)
    raise TimeoutError(job_id)


def jsonl(resp) -> list[dict]:
    return [json.loads(line) for line in resp.text.strip().splitlines() if line]


def main() -> None:
    app = create_app(str(OUT_DIR.parent / "_fixture_store"))
    client = TestClient(app)

    dataset_id = unwrap(client.post("/api/v1/datasets", content=make_csv()))["dataset_id"]
    derivation_id = poll(
        client, unwrap(client.post(f"/api/v1/datasets/{dataset_id}/derive", json={}))["job_id"]
    )["derivation_id"]
    run_id = poll(
        client,
        unwrap(
            client.post(
                f"/api/v1/datasets/{dataset_id}/mine",
                json={"min_support": 2, "max_gap": 2, "max_len": 4},
            )
        )["job_id"],
    )["run_id"]
    motif_run_id = poll(
        client,
        unwrap(
            client.post(
                f"/api/v1/datasets/{dataset_id}/motifs",
                json={
                    "stream": "activity",
                    "window_s": 600,
                    "stride_s": 600,
                    "paa_segments": 4,
                    "sax_alphabet": 4,
                    "k": 3,
                    "seed": 2,
                    "match_threshold": 1.5,
                },
            )
        )["job_id"],
    )["motif_run_id"]

    run = unwrap(client.get(f"/api/v1/runs/{run_id}/sequences"))
    display = unwrap(
        client.get(f"/api/v1/runs/{run_id}/sequences", params={"display": "scatter"})
    )
    days = unwrap(client.get(f"/api/v1/datasets/{dataset_id}/days"))

    # scenario anchors: a display sequence with a usable AFTER neighbor
    timeline = None
    primary = secondary = None
    run_ids_set = {s["id"] for s in run["sequences"]}
    for candidate in display["sequences"]:
        resp = client.post(
            f"/api/v1/runs/{run_id}/timelines", json={"focal": [candidate["id"]]}
        )
        tl = unwrap(resp)
        if tl["cohort_size"] < 3:
            continue
        after = unwrap(
            client.get(
                f"/api/v1/timelines/{tl['id']}/adjacent",
                params={"region": "after", "top": 10},
            )
        )["adjacent"]
        usable = [e for e in after if e["id"] in run_ids_set and e["id"] != candidate["id"]]
        if usable:
            timeline, primary, secondary = tl, candidate["id"], usable[0]["id"]
            break
    assert timeline is not None, "no scenario anchor found; adjust the dataset"

    def adjacent(tl_id, region, index=None, page=0):
        params = {"region": region, "top": 10, "page": page}
        if index is not None:
            params["index"] = index
        return unwrap(client.get(f"/api/v1/timelines/{tl_id}/adjacent", params=params))

    chains: dict[str, dict] = {}

    def record_chain(tl_id, chain_key, n_focal):
        entry = {
            "cohort": unwrap(client.get(f"/api/v1/timelines/{tl_id}/cohort")),
            "adjacent": {
                "before:0": adjacent(tl_id, "before", page=0),
                "before:1": adjacent(tl_id, "before", page=1),
                "after:0": adjacent(tl_id, "after", page=0),
                "after:1": adjacent(tl_id, "after", page=1),
            },
        }
        for gap in range(n_focal - 1):
            entry["adjacent"][f"between{gap}:0"] = adjacent(tl_id, "between", gap, 0)
        chains[chain_key] = entry

    record_chain(timeline["id"], primary, 1)
    two = unwrap(
        client.post(
            f"/api/v1/timelines/{timeline['id']}/focal",
            json={"sid": secondary, "position": 1},
        )
    )
    record_chain(timeline["id"], f"{primary}|{secondary}", 2)

    single = unwrap(
        client.post(f"/api/v1/runs/{run_id}/timelines", json={"focal": [primary]})
    )
    compare = {
        f"{primary}__VS__{primary}|{secondary}": unwrap(
            client.get(
                "/api/v1/timelines/compare",
                params={"a": single["id"], "b": timeline["id"]},
            )
        ),
        f"{primary}__VS__{primary}": unwrap(
            client.get(
                "/api/v1/timelines/compare",
                params={"a": single["id"], "b": single["id"]},
            )
        ),
    }

    # occurrence streams for every sequence a scenario can hover
    hover_ids = {primary, secondary}
    hover_ids.update(s["id"] for s in display["sequences"][:3])
    before_entries = chains[primary]["adjacent"]["before:0"]["adjacent"]
    hover_adjacent = next((e["id"] for e in before_entries if e["id"] in run_ids_set), None)
    if hover_adjacent:
        hover_ids.add(hover_adjacent)
    occurrences = {
        sid: jsonl(client.get(f"/api/v1/runs/{run_id}/sequences/{sid}/occurrences"))
        for sid in sorted(hover_ids)
    }

    motif_run = unwrap(client.get(f"/api/v1/motif-runs/{motif_run_id}"))
    motif_occurrences = {
        m["motif_id"]: jsonl(
            client.get(
                f"/api/v1/motif-runs/{motif_run_id}/occurrences",
                params={"motif": m["motif_id"]},
            )
        )
        for m in motif_run["motifs"]
    }

    OUT_DIR.mkdir(parents=True, exist_ok=True)
    bundle = {
        "meta": {
            "dataset_id": dataset_id,
            "derivation_id": derivation_id,
            "run_id": run_id,
            "motif_run_id": motif_run_id,
            "primary": primary,
            "secondary": secondary,
            "hover_adjacent": hover_adjacent,
        },
        "run": run,
        "display": display,
        "days": days,
        "occurrences": occurrences,
        "chains": chains,
        "compare": compare,
        "motif_run": motif_run,
        "motif_occurrences": motif_occurrences,
    }
    out = OUT_DIR / "bundle.json"
    out.write_text(json.dumps(bundle, indent=1, sort_keys=True))
    print(f"wrote {out} ({out.stat().st_size // 1024} KiB)")
    print(f"primary={primary} secondary={secondary} hover_adjacent={hover_adjacent}")


if __name__ == "__main__":
    sys.exit(main())
