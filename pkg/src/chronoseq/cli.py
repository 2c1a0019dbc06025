"""Batch CLI: ingest, derive, mine, motif, serve, report.

Batch subcommands write content-addressed artifacts into the data directory
and print the artifact id; `serve` exposes the HTTP API. Exit codes: 0
success, 1 validation error, 2 internal error.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

from .mining import MiningConfig
from .model import DerivationConfig, ValidationError
from .motifs import MotifConfig
from .service import ChronoseqService
from .store import CorruptArtifactError, UnknownArtifactError

EXIT_OK = 0
EXIT_VALIDATION = 1
EXIT_INTERNAL = 2


def _data_dir(args: argparse.Namespace) -> str:
    return args.data_dir or os.environ.get("CHRONOSEQ_DATA_DIR", "chronoseq-data")


def _load_config_file(path: str | None) -> dict:
    if not path:
        return {}
    text = Path(path).read_text(encoding="utf-8")
    data = json.loads(text)
    if not isinstance(data, dict):
        raise ValidationError("--config file must contain a JSON object")
    return data


def _merged(args: argparse.Namespace, file_values: dict, key: str, default):
    """Precedence: explicit flag > config file > default."""
    flag = getattr(args, key, None)
    if flag is not None:
        return flag
    if key in file_values:
        return file_values[key]
    return default


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="chronoseq",
        description="Derive events from sensor streams, mine frequent sequences, "
        "and serve alignment queries.",
    )
    sub = parser.add_subparsers(dest="command", metavar="command")

    def add_common(p: argparse.ArgumentParser) -> None:
        p.add_argument("--config", help="JSON config file; flags override its values")
        p.add_argument("--data-dir", help="artifact directory (env CHRONOSEQ_DATA_DIR)")

    p_ingest = sub.add_parser("ingest", help="ingest a sensor-sample CSV")
    add_common(p_ingest)
    p_ingest.add_argument("--input", required=True, help="CSV path")
    p_ingest.set_defaults(handler=cmd_ingest)

    p_derive = sub.add_parser("derive", help="derive events from a dataset")
    add_common(p_derive)
    p_derive.add_argument("--dataset", help="dataset id (default: latest)")
    p_derive.add_argument("--interval", type=int, dest="interval_s")
    p_derive.add_argument("--gap", type=int, dest="gap_threshold_s")
    p_derive.add_argument("--low-quantile", type=float, dest="low_quantile")
    p_derive.add_argument("--high-quantile", type=float, dest="high_quantile")
    p_derive.set_defaults(handler=cmd_derive)

    p_mine = sub.add_parser("mine", help="mine frequent sequences from a derivation")
    add_common(p_mine)
    p_mine.add_argument("--dataset", help="dataset id (default: latest)")
    p_mine.add_argument("--derivation", help="derivation id (default: latest for dataset)")
    p_mine.add_argument("--min-support", dest="min_support")
    p_mine.add_argument("--max-gap", dest="max_gap", help="integer or 'unbounded'")
    p_mine.add_argument("--max-len", type=int, dest="max_len")
    p_mine.add_argument("--min-len-display", type=int, dest="min_len_display")
    p_mine.set_defaults(handler=cmd_mine)

    p_motif = sub.add_parser("motif", help="discover motifs in a raw stream")
    add_common(p_motif)
    p_motif.add_argument("--dataset", help="dataset id (default: latest)")
    p_motif.add_argument("--stream")
    p_motif.add_argument("--window", type=int, dest="window_s")
    p_motif.add_argument("--stride", type=int, dest="stride_s")
    p_motif.add_argument("--paa-segments", type=int, dest="paa_segments")
    p_motif.add_argument("--alphabet", type=int, dest="sax_alphabet")
    p_motif.add_argument("--k", type=int, dest="k")
    p_motif.add_argument("--seed", type=int, dest="seed")
    p_motif.add_argument("--match-threshold", type=float, dest="match_threshold")
    p_motif.set_defaults(handler=cmd_motif)

    p_serve = sub.add_parser("serve", help="run the HTTP API")
    add_common(p_serve)
    p_serve.add_argument("--port", type=int, help="port (env CHRONOSEQ_PORT, default 8080)")
    p_serve.add_argument("--host", default="127.0.0.1")
    p_serve.set_defaults(handler=cmd_serve)

    p_report = sub.add_parser(
        "report", help="render scatter/day-strip figures and a CSV summary for a run"
    )
    add_common(p_report)
    p_report.add_argument("--run", required=True, help="mining run id")
    p_report.add_argument("--out-dir", required=True)
    p_report.add_argument(
        "--strips", type=int, default=20, help="max day strips in the strip figure"
    )
    p_report.set_defaults(handler=cmd_report)

    return parser


# ---------------------------------------------------------------------------
# Handlers
# ---------------------------------------------------------------------------

def _require_dataset(service: ChronoseqService, args: argparse.Namespace) -> str:
    dataset_id = getattr(args, "dataset", None)
    if dataset_id:
        return dataset_id
    latest = service.store.latest("dataset")
    if latest is None:
        raise ValidationError("no dataset ingested yet; run `chronoseq ingest` first")
    return latest


def cmd_ingest(args: argparse.Namespace) -> int:
    service = ChronoseqService(_data_dir(args))
    file_values = _load_config_file(args.config)
    input_path = _merged(args, file_values, "input", None)
    if not input_path or not Path(input_path).exists():
        raise ValidationError(f"input CSV {input_path!r} not found")
    dataset_id, report = service.ingest_csv(input_path)
    print(dataset_id)
    print(
        f"rows={report['rows']} accepted={report['accepted']} "
        f"rejected={len(report['rejected'])} participants={len(report['participants'])}",
        file=sys.stderr,
    )
    return EXIT_OK


def cmd_derive(args: argparse.Namespace) -> int:
    service = ChronoseqService(_data_dir(args))
    file_values = _load_config_file(args.config)
    config = DerivationConfig(
        interval_s=int(_merged(args, file_values, "interval_s", 300)),
        gap_threshold_s=int(_merged(args, file_values, "gap_threshold_s", 3600)),
        low_quantile=float(_merged(args, file_values, "low_quantile", 0.25)),
        high_quantile=float(_merged(args, file_values, "high_quantile", 0.75)),
        stress_low=file_values.get("stress_low"),
        stress_high=file_values.get("stress_high"),
    )
    dataset_id = _require_dataset(service, args)
    derivation_id = service.derive(dataset_id, config)
    print(derivation_id)
    return EXIT_OK


def _parse_min_support(raw) -> float | int:
    if isinstance(raw, (int, float)) and not isinstance(raw, bool):
        return raw if isinstance(raw, int) else float(raw)
    text = str(raw)
    return int(text) if text.isdigit() else float(text)


def cmd_mine(args: argparse.Namespace) -> int:
    service = ChronoseqService(_data_dir(args))
    file_values = _load_config_file(args.config)
    raw_gap = _merged(args, file_values, "max_gap", 2)
    max_gap = None if str(raw_gap) == "unbounded" else int(raw_gap)
    config = MiningConfig(
        min_support=_parse_min_support(_merged(args, file_values, "min_support", 0.2)),
        max_gap=max_gap,
        max_len=int(_merged(args, file_values, "max_len", 6)),
        min_len_display=int(_merged(args, file_values, "min_len_display", 2)),
    )
    dataset_id = _require_dataset(service, args)
    derivation_id = _merged(args, file_values, "derivation", None)
    run_id = service.mine_run(dataset_id, config, derivation_id=derivation_id)
    print(run_id)
    return EXIT_OK


def cmd_motif(args: argparse.Namespace) -> int:
    service = ChronoseqService(_data_dir(args))
    file_values = _load_config_file(args.config)
    stream = _merged(args, file_values, "stream", None)
    if not stream:
        raise ValidationError("motif discovery requires --stream")
    stride = _merged(args, file_values, "stride_s", None)
    config = MotifConfig(
        stream=stream,
        window_s=int(_merged(args, file_values, "window_s", 1800)),
        stride_s=int(stride) if stride is not None else None,
        paa_segments=int(_merged(args, file_values, "paa_segments", 8)),
        sax_alphabet=int(_merged(args, file_values, "sax_alphabet", 4)),
        k=int(_merged(args, file_values, "k", 6)),
        seed=int(_merged(args, file_values, "seed", 0)),
        match_threshold=float(_merged(args, file_values, "match_threshold", 1.0)),
    )
    dataset_id = _require_dataset(service, args)
    motif_run_id = service.motif_run(dataset_id, config)
    print(motif_run_id)
    return EXIT_OK


def cmd_serve(args: argparse.Namespace) -> int:
    from .server import main as serve_main

    file_values = _load_config_file(args.config)
    port = _merged(args, file_values, "port", None)
    serve_main(
        port=int(port) if port else None,
        data_dir=_data_dir(args),
        host=args.host,
    )
    return EXIT_OK


def cmd_report(args: argparse.Namespace) -> int:
    from .report import render_run_report

    service = ChronoseqService(_data_dir(args))
    payload = service.load_run(args.run)
    day_strings = service.day_strings_json(
        payload["dataset_id"], derivation_id=payload["derivation_id"]
    )[: args.strips]
    written = render_run_report(payload, Path(args.out_dir), day_strings=day_strings)
    for path in written:
        print(path)
    return EXIT_OK


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "handler", None) is None:
        parser.print_help()
        return EXIT_OK
    try:
        return args.handler(args)
    except (ValidationError, UnknownArtifactError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except CorruptArtifactError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INTERNAL
    except Exception as exc:  # internal failure contract
        print(f"internal error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    raise SystemExit(main())
