"""In-process background jobs for ingest and projection.

Ingest jobs are serialized per collection. Projection follows the
supersession policy: at most one job runs per collection, a newer
request replaces (cancels) a queued one, and the running job is left to
finish and commit atomically.
"""

from __future__ import annotations

import threading
import uuid
from dataclasses import dataclass, field


@dataclass
class Job:
    job_id: str
    kind: str  # "ingest" | "projection"
    collection_id: str
    status: str = "queued"  # queued | running | done | failed | cancelled
    progress: float = 0.0
    error: str | None = None
    _cancel: threading.Event = field(default_factory=threading.Event, repr=False)

    def cancel_requested(self) -> bool:
        return self._cancel.is_set()

    def to_dict(self) -> dict:
        return {
            "job_id": self.job_id,
            "kind": self.kind,
            "collection_id": self.collection_id,
            "status": self.status,
            "progress": round(self.progress, 4),
            "error": self.error,
        }


class JobManager:
    def __init__(self):
        self._lock = threading.RLock()
        self._jobs: dict[str, Job] = {}
        # collection_id -> {"running": Job|None, "queued": (Job, fn)|None}
        self._projection_state: dict[str, dict] = {}

    def get(self, job_id: str) -> Job | None:
        with self._lock:
            return self._jobs.get(job_id)

    def running_projection(self, collection_id: str) -> Job | None:
        with self._lock:
            state = self._projection_state.get(collection_id)
            return state["running"] if state else None

    def _new_job(self, kind: str, collection_id: str) -> Job:
        job = Job(job_id=uuid.uuid4().hex[:12], kind=kind, collection_id=collection_id)
        self._jobs[job.job_id] = job
        return job

    def submit_ingest(self, collection_id: str, fn) -> Job:
        """fn(job) runs in a daemon thread; job status tracks its outcome."""
        with self._lock:
            job = self._new_job("ingest", collection_id)
        thread = threading.Thread(
            target=self._run, args=(job, fn), name=f"ingest-{collection_id}", daemon=True
        )
        thread.start()
        return job

    def _run(self, job: Job, fn) -> None:
        job.status = "running"
        try:
            fn(job)
            job.progress = 1.0
            job.status = "done"
        except Exception as exc:
            job.error = str(exc)
            job.status = "cancelled" if job.cancel_requested() else "failed"

    def submit_projection(self, collection_id: str, fn) -> tuple[Job, Job | None]:
        """Returns (job, running_job). If a job is running the new one is
        queued, cancelling and replacing any previously queued job."""
        with self._lock:
            state = self._projection_state.setdefault(
                collection_id, {"running": None, "queued": None}
            )
            job = self._new_job("projection", collection_id)
            running = state["running"]
            if running is not None:
                previous = state["queued"]
                if previous is not None:
                    previous[0].status = "cancelled"
                    previous[0]._cancel.set()
                state["queued"] = (job, fn)
                return job, running
            state["running"] = job
        self._start_projection(collection_id, job, fn)
        return job, None

    def _start_projection(self, collection_id: str, job: Job, fn) -> None:
        def runner():
            self._run(job, fn)
            with self._lock:
                state = self._projection_state[collection_id]
                state["running"] = None
                queued = state["queued"]
                state["queued"] = None
                if queued is not None and queued[0].status == "queued":
                    state["running"] = queued[0]
                else:
                    queued = None
            if queued is not None:
                self._start_projection(collection_id, queued[0], queued[1])

        thread = threading.Thread(
            target=runner, name=f"projection-{collection_id}", daemon=True
        )
        thread.start()

    def wait_all(self, timeout: float = 60.0) -> None:
        """Test helper: block until no job is queued or running."""
        import time

        deadline = time.monotonic() + timeout
        while time.monotonic() < deadline:
            with self._lock:
                busy = any(j.status in ("queued", "running") for j in self._jobs.values())
            if not busy:
                return
            time.sleep(0.02)
        raise TimeoutError("jobs did not settle in time")
