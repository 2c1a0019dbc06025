"""Asynchronous job execution with polling: queued -> running -> done|failed."""

from __future__ import annotations

import threading
import traceback
import uuid
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable

STATE_QUEUED = "queued"
STATE_RUNNING = "running"
STATE_DONE = "done"
STATE_FAILED = "failed"


@dataclass
class Job:
    job_id: str
    kind: str
    state: str = STATE_QUEUED
    progress: float = 0.0
    result: dict | None = None
    error: str | None = None

    def to_json_dict(self) -> dict:
        return {
            "job_id": self.job_id,
            "kind": self.kind,
            "state": self.state,
            "progress": self.progress,
            "result": self.result,
            "error": self.error,
        }


class JobManager:
    """Bounded worker pool running batch stages; jobs are polled by id."""

    def __init__(self, max_workers: int = 2):
        self._pool = ThreadPoolExecutor(max_workers=max_workers)
        self._jobs: dict[str, Job] = {}
        self._lock = threading.Lock()

    def submit(self, kind: str, fn: Callable[[Callable[[float], None]], dict]) -> Job:
        """Queue fn(progress_callback) -> result payload."""
        job = Job(job_id="job-" + uuid.uuid4().hex[:12], kind=kind)
        with self._lock:
            self._jobs[job.job_id] = job

        def set_progress(fraction: float) -> None:
            job.progress = min(1.0, max(job.progress, float(fraction)))

        def run() -> None:
            job.state = STATE_RUNNING
            try:
                result = fn(set_progress)
            except Exception as exc:  # jobs surface failures via polling
                job.state = STATE_FAILED
                job.error = f"{type(exc).__name__}: {exc}"
                job.result = None
                traceback.print_exc()
                return
            job.progress = 1.0
            job.result = result
            job.state = STATE_DONE

        self._pool.submit(run)
        return job

    def get(self, job_id: str) -> Job | None:
        with self._lock:
            return self._jobs.get(job_id)

    def wait(self, job_id: str, timeout_s: float = 60.0) -> Job:
        """Poll until the job leaves queued/running (test and CLI helper)."""
        import time

        deadline = time.monotonic() + timeout_s
        while time.monotonic() < deadline:
            job = self.get(job_id)
            if job is not None and job.state in (STATE_DONE, STATE_FAILED):
                return job
            time.sleep(0.01)
        raise TimeoutError(f"job {job_id} did not finish within {timeout_s}s")

    def shutdown(self) -> None:
        self._pool.shutdown(wait=True)
