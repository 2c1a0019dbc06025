"""HTTP/JSON API over the service core.

Every response is `{ok, data|error}`; errors carry machine-readable codes.
Mutations of one timeline are serialized by a per-timeline lock, and long
batch stages run as polled jobs.
"""

from __future__ import annotations

import io
import os

from fastapi import FastAPI, Query, Request
from fastapi.responses import JSONResponse, StreamingResponse

from . import __version__
from .jobs import JobManager
from .mining import MiningConfig, minimal_prefix_filter
from .model import DerivationConfig, ValidationError
from .motifs import MotifConfig
from .service import ChronoseqService
from .store import CorruptArtifactError, UnknownArtifactError

DEFAULT_DATA_DIR = "chronoseq-data"
API = "/api/v1"


def _ok(data, status_code: int = 200) -> JSONResponse:
    return JSONResponse({"ok": True, "data": data}, status_code=status_code)


def _error(code: str, message: str, status_code: int) -> JSONResponse:
    return JSONResponse(
        {"ok": False, "error": {"code": code, "message": message}},
        status_code=status_code,
    )


def create_app(data_dir: str | None = None, workers: int = 2) -> FastAPI:
    data_dir = data_dir or os.environ.get("CHRONOSEQ_DATA_DIR", DEFAULT_DATA_DIR)
    service = ChronoseqService(data_dir)
    jobs = JobManager(max_workers=workers)
    app = FastAPI(title="chronoseq", version=__version__)
    app.state.service = service
    app.state.jobs = jobs

    @app.exception_handler(ValidationError)
    async def _validation(_req, exc: ValidationError):
        return _error("validation", str(exc), 400)

    @app.exception_handler(UnknownArtifactError)
    async def _unknown(_req, exc: UnknownArtifactError):
        return _error("not_found", f"unknown id {exc.args[0]!r}", 404)

    @app.exception_handler(CorruptArtifactError)
    async def _corrupt(_req, exc: CorruptArtifactError):
        return _error("corrupt_artifact", str(exc), 500)

    @app.exception_handler(Exception)
    async def _internal(_req, exc: Exception):
        return _error("internal", f"{type(exc).__name__}: {exc}", 500)

    # -- health / datasets ------------------------------------------------------

    @app.get(API + "/health")
    def health():
        return _ok({"version": __version__, "data_dir": str(service.store.root)})

    @app.post(API + "/datasets")
    async def post_dataset(request: Request):
        body = await request.body()
        if not body.strip():
            raise ValidationError("empty CSV body")
        dataset_id, report = service.ingest_csv(io.StringIO(body.decode("utf-8")))
        return _ok({"dataset_id": dataset_id, "report": report}, status_code=201)

    @app.get(API + "/datasets/{dataset_id}")
    def get_dataset(dataset_id: str):
        return _ok(service.dataset_info(dataset_id))

    @app.get(API + "/datasets/{dataset_id}/days")
    def get_days(
        dataset_id: str,
        participant: str | None = None,
        date: str | None = None,
        derivation: str | None = None,
    ):
        return _ok(
            service.day_strings_json(
                dataset_id,
                derivation_id=derivation,
                participant=participant,
                date_filter=date,
            )
        )

    # -- jobs ----------------------------------------------------------------------

    @app.get(API + "/jobs/{job_id}")
    def get_job(job_id: str):
        job = jobs.get(job_id)
        if job is None:
            raise UnknownArtifactError(job_id)
        return _ok(job.to_json_dict())

    @app.post(API + "/datasets/{dataset_id}/derive")
    async def post_derive(dataset_id: str, request: Request):
        body = await request.json() if await request.body() else {}
        config = DerivationConfig(
            interval_s=int(body.get("interval_s", 300)),
            gap_threshold_s=int(body.get("gap_threshold_s", 3600)),
            low_quantile=float(body.get("low_quantile", 0.25)),
            high_quantile=float(body.get("high_quantile", 0.75)),
            stress_low=body.get("stress_low"),
            stress_high=body.get("stress_high"),
        )
        service.store.load(dataset_id)  # existence check before queueing

        def work(_progress):
            return {"derivation_id": service.derive(dataset_id, config)}

        job = jobs.submit("derive", work)
        return _ok({"job_id": job.job_id}, status_code=202)

    @app.post(API + "/datasets/{dataset_id}/mine")
    async def post_mine(dataset_id: str, request: Request):
        body = await request.json() if await request.body() else {}
        config = MiningConfig.from_json_dict(body)
        derivation_id = body.get("derivation_id")
        service.store.load(dataset_id)

        def work(_progress):
            return {
                "run_id": service.mine_run(dataset_id, config, derivation_id=derivation_id)
            }

        job = jobs.submit("mine", work)
        return _ok({"job_id": job.job_id}, status_code=202)

    @app.post(API + "/datasets/{dataset_id}/motifs")
    async def post_motifs(dataset_id: str, request: Request):
        body = await request.json() if await request.body() else {}
        config = MotifConfig.from_json_dict(body)
        service.store.load(dataset_id)

        def work(_progress):
            return {"motif_run_id": service.motif_run(dataset_id, config)}

        job = jobs.submit("motif", work)
        return _ok({"job_id": job.job_id}, status_code=202)

    # -- mining runs -----------------------------------------------------------------

    @app.get(API + "/runs/{run_id}/sequences")
    def get_sequences(run_id: str, display: str | None = None):
        payload = service.load_run(run_id)
        sequences = payload["sequences"]
        if display == "scatter":
            engine = service.engine_for_run(run_id)
            kept = {
                seq.id
                for seq in minimal_prefix_filter(
                    engine.result.sequences, engine.result.config.min_len_display
                )
            }
            sequences = [seq for seq in sequences if seq["id"] in kept]
        return _ok(
            {
                "run_id": run_id,
                "config": payload["config"],
                "total_days": payload["total_days"],
                "sequences": sequences,
            }
        )

    @app.get(API + "/runs/{run_id}/sequences/{sequence_id}/occurrences")
    def get_occurrences(run_id: str, sequence_id: str):
        service.engine_for_run(run_id).pattern_of(sequence_id)  # 400 on unknown

        def lines():
            for line in service.stream_occurrences(run_id, sequence_id):
                yield line + "\n"

        return StreamingResponse(lines(), media_type="application/jsonl")

    # -- timelines ----------------------------------------------------------------------

    @app.post(API + "/runs/{run_id}/timelines")
    async def post_timeline(run_id: str, request: Request):
        body = await request.json()
        focal = body.get("focal") or []
        if not focal:
            raise ValidationError("timeline requires a non-empty focal list")
        session = body.get("session", "default")
        timeline = service.create_timeline(run_id, focal, session_id=session)
        return _ok(timeline.to_json_dict(), status_code=201)

    @app.get(API + "/timelines/compare")
    def get_compare(a: str = Query(...), b: str = Query(...)):
        engine_a, timeline_a = service.get_timeline(a)
        _engine_b, timeline_b = service.get_timeline(b)
        return _ok(engine_a.compare_timelines(timeline_a, timeline_b))

    @app.get(API + "/timelines/{timeline_id}")
    def get_timeline(timeline_id: str):
        _engine, timeline = service.get_timeline(timeline_id)
        return _ok(timeline.to_json_dict())

    @app.post(API + "/timelines/{timeline_id}/focal")
    async def post_focal(timeline_id: str, request: Request):
        body = await request.json()
        engine, timeline = service.get_timeline(timeline_id)
        lock = service.timeline_lock(timeline_id)
        if not lock.acquire(timeout=10.0):
            return _error("conflict", "timeline is being mutated", 409)
        try:
            engine.add_focal(
                timeline, body["sid"], int(body.get("position", len(timeline.focal_chain)))
            )
        finally:
            lock.release()
        return _ok(timeline.to_json_dict())

    @app.delete(API + "/timelines/{timeline_id}/focal/{position}")
    def delete_focal(timeline_id: str, position: int):
        engine, timeline = service.get_timeline(timeline_id)
        lock = service.timeline_lock(timeline_id)
        if not lock.acquire(timeout=10.0):
            return _error("conflict", "timeline is being mutated", 409)
        try:
            engine.remove_focal(timeline, position)
        finally:
            lock.release()
        return _ok(timeline.to_json_dict())

    @app.get(API + "/timelines/{timeline_id}/cohort")
    def get_cohort(timeline_id: str):
        _engine, timeline = service.get_timeline(timeline_id)
        return _ok(
            {
                "timeline_id": timeline_id,
                "cohort": [list(key) for key in sorted(timeline.cohort)],
                "assignments": {
                    "|".join(key): [occ.to_json_dict() for occ in assignment.occurrences]
                    for key, assignment in sorted(timeline.cohort.items())
                },
            }
        )

    @app.get(API + "/timelines/{timeline_id}/adjacent")
    def get_adjacent(
        timeline_id: str,
        region: str = Query(...),
        index: int | None = None,
        top: int = 10,
        page: int = 0,
    ):
        engine, timeline = service.get_timeline(timeline_id)
        entries = engine.adjacent(timeline, region, index, top_n=top, page=page)
        return _ok(
            {
                "timeline_id": timeline_id,
                "region": region,
                "index": index,
                "page": page,
                "adjacent": [entry.to_json_dict() for entry in entries],
            }
        )

    @app.post(API + "/timelines/{timeline_id}/clone")
    def post_clone(timeline_id: str):
        clone = service.clone_timeline(timeline_id)
        return _ok(clone.to_json_dict(), status_code=201)

    # -- motif runs ------------------------------------------------------------------------

    @app.get(API + "/motif-runs/{motif_run_id}")
    def get_motif_run(motif_run_id: str):
        payload = service.load_motif_run(motif_run_id)
        return _ok(
            {
                "motif_run_id": motif_run_id,
                "dataset_id": payload["dataset_id"],
                "config": payload["config"],
                "motifs": payload["motifs"],
                "window_count": payload["window_count"],
            }
        )

    @app.get(API + "/motif-runs/{motif_run_id}/occurrences")
    def get_motif_occurrences(motif_run_id: str, motif: str | None = None):
        service.load_motif_run(motif_run_id)

        def lines():
            for line in service.motif_occurrences(motif_run_id, motif):
                yield line + "\n"

        return StreamingResponse(lines(), media_type="application/jsonl")

    @app.post(API + "/motifs/{motif_id}/promote")
    async def post_promote(motif_id: str, request: Request):
        body = await request.json() if await request.body() else {}
        result = service.promote_motif(motif_id, derivation_id=body.get("derivation_id"))
        return _ok(result, status_code=201)

    _mount_frontend(app)
    return app


def _mount_frontend(app: FastAPI) -> None:
    """Serve the built exploration UI when frontend/dist exists."""
    from pathlib import Path

    from fastapi.staticfiles import StaticFiles

    root = Path(os.environ.get("CHRONOSEQ_FRONTEND", "frontend"))
    if (root / "dist").is_dir() and (root / "index.html").is_file():
        app.mount("/dist", StaticFiles(directory=root / "dist"), name="dist")
        app.mount("/", StaticFiles(directory=root, html=True), name="ui")


def main(port: int | None = None, data_dir: str | None = None, host: str = "127.0.0.1") -> None:
    import uvicorn

    port = port or int(os.environ.get("CHRONOSEQ_PORT", "8080"))
    uvicorn.run(create_app(data_dir), host=host, port=port, log_level="warning")
