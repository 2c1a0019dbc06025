from __future__ import annotations

import json
import socket
import subprocess
import sys
import time
import urllib.request
from datetime import timedelta

import pytest

from chronoseq.cli import main

from generators import BASE_DAY, continuous_stream


@pytest.fixture
def workspace(tmp_path, rng):
    rows = ["participant_id,stream,timestamp,value"]
    for pid in ("p1", "p2"):
        for d in range(2):
            day = BASE_DAY + timedelta(days=d)
            for rec in continuous_stream(pid, day, 8 * 3600, 1800, rng, "activity"):
                rows.append(f"{rec[0]},{rec[1]},{rec[2]},{rec[3]:.6f}")
    csv_path = tmp_path / "data.csv"
    csv_path.write_text("\n".join(rows) + "\n")
    return tmp_path


def run_cli(args, capsys) -> tuple[int, str]:
    code = main(args)
    out = capsys.readouterr().out
    return code, out.strip()


def test_pipeline_chains_by_printed_ids(workspace, capsys):
    data_dir = str(workspace / "store")
    code, dataset_id = run_cli(
        ["ingest", "--input", str(workspace / "data.csv"), "--data-dir", data_dir], capsys
    )
    assert code == 0
    assert dataset_id.startswith("ds-")

    code, derivation_id = run_cli(
        ["derive", "--interval", "300", "--gap", "3600", "--data-dir", data_dir], capsys
    )
    assert code == 0
    assert derivation_id.startswith("drv-")

    code, run_id = run_cli(
        ["mine", "--min-support", "0.2", "--max-gap", "2", "--data-dir", data_dir], capsys
    )
    assert code == 0
    assert run_id.startswith("run-")

    # explicit chaining by id reproduces the same artifacts
    code, derivation_again = run_cli(
        [
            "derive", "--dataset", dataset_id, "--interval", "300", "--gap", "3600",
            "--data-dir", data_dir,
        ],
        capsys,
    )
    assert derivation_again == derivation_id
    code, run_again = run_cli(
        [
            "mine", "--dataset", dataset_id, "--derivation", derivation_id,
            "--min-support", "0.2", "--max-gap", "2", "--data-dir", data_dir,
        ],
        capsys,
    )
    assert run_again == run_id


def test_mine_without_derivation_exits_1(workspace, capsys):
    data_dir = str(workspace / "store2")
    code, _ = run_cli(
        ["ingest", "--input", str(workspace / "data.csv"), "--data-dir", data_dir], capsys
    )
    assert code == 0
    code = main(["mine", "--min-support", "0.2", "--data-dir", data_dir])
    err = capsys.readouterr().err
    assert code == 1
    assert "derivation" in err


def test_missing_input_exits_1(tmp_path, capsys):
    code = main(["ingest", "--input", str(tmp_path / "nope.csv"), "--data-dir", str(tmp_path)])
    assert code == 1


def test_config_file_supplies_values(workspace, capsys):
    data_dir = str(workspace / "store3")
    run_cli(["ingest", "--input", str(workspace / "data.csv"), "--data-dir", data_dir], capsys)
    config = workspace / "derive.json"
    config.write_text(json.dumps({"interval_s": 600, "gap_threshold_s": 1800}))
    code, derivation_id = run_cli(
        ["derive", "--config", str(config), "--data-dir", data_dir], capsys
    )
    assert code == 0
    from chronoseq.store import ArtifactStore

    payload = ArtifactStore(data_dir).load(derivation_id)
    assert payload["config"]["interval_s"] == 600
    assert payload["config"]["gap_threshold_s"] == 1800


def test_motif_command(workspace, capsys):
    data_dir = str(workspace / "store4")
    run_cli(["ingest", "--input", str(workspace / "data.csv"), "--data-dir", data_dir], capsys)
    code, motif_run_id = run_cli(
        [
            "motif", "--stream", "activity", "--window", "600", "--stride", "300",
            "--paa-segments", "4", "--k", "2", "--seed", "3", "--data-dir", data_dir,
        ],
        capsys,
    )
    assert code == 0
    assert motif_run_id.startswith("mrun-")


def test_report_renders_figures(workspace, capsys):
    data_dir = str(workspace / "store5")
    run_cli(["ingest", "--input", str(workspace / "data.csv"), "--data-dir", data_dir], capsys)
    run_cli(["derive", "--data-dir", data_dir], capsys)
    code, run_id = run_cli(
        ["mine", "--min-support", "1", "--data-dir", data_dir], capsys
    )
    out_dir = workspace / "figures"
    code, listing = run_cli(
        ["report", "--run", run_id, "--out-dir", str(out_dir), "--data-dir", data_dir],
        capsys,
    )
    assert code == 0
    assert (out_dir / "sequences.csv").exists()
    assert (out_dir / "scatter.png").stat().st_size > 0
    assert (out_dir / "day_strips.png").stat().st_size > 0
    header = (out_dir / "sequences.csv").read_text().splitlines()[0]
    assert header == "id,pattern,support_days,total_occurrences,avg_per_day,quadrant"


def _free_port() -> int:
    with socket.socket() as s:
        s.bind(("127.0.0.1", 0))
        return s.getsockname()[1]


def test_serve_health_endpoint(workspace):
    port = _free_port()
    proc = subprocess.Popen(
        [
            sys.executable, "-m", "chronoseq.cli", "serve",
            "--port", str(port), "--data-dir", str(workspace / "served"),
        ],
        stdout=subprocess.PIPE,
        stderr=subprocess.PIPE,
    )
    try:
        body = None
        for _ in range(100):
            try:
                with urllib.request.urlopen(
                    f"http://127.0.0.1:{port}/api/v1/health", timeout=1
                ) as resp:
                    body = json.loads(resp.read())
                break
            except Exception:
                time.sleep(0.1)
        assert body is not None, "server did not come up"
        assert body["ok"] is True
        assert body["data"]["version"]
    finally:
        proc.terminate()
        proc.wait(timeout=10)
