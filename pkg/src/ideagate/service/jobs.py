"""In-process job runner for long-running agent steps.

Gate submissions return a job handle immediately; the UI polls. One logical
writer per session: jobs for the same session run strictly in submission
order under the session's lock.
"""

from __future__ import annotations

import threading
import traceback
import uuid
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

JOB_PENDING = "pending"
JOB_RUNNING = "running"
JOB_SUCCEEDED = "succeeded"
JOB_FAILED = "failed"


@dataclass
class Job:
    job_id: str
    session_id: str
    status: str = JOB_PENDING
    error: str | None = None
    error_kind: str | None = None
    done: threading.Event = field(default_factory=threading.Event)

    def to_dict(self) -> dict:
        return {
            "job_id": self.job_id,
            "session_id": self.session_id,
            "status": self.status,
            "error": self.error,
            "error_kind": self.error_kind,
        }


class JobRunner:
    def __init__(self, max_workers: int = 8):
        self._pool = ThreadPoolExecutor(max_workers=max_workers)
        self._jobs: dict[str, Job] = {}
        self._session_locks: dict[str, threading.Lock] = {}
        self._registry_lock = threading.Lock()

    def session_lock(self, session_id: str) -> threading.Lock:
        with self._registry_lock:
            return self._session_locks.setdefault(session_id, threading.Lock())

    def submit(self, session_id: str, fn) -> Job:
        job = Job(job_id=uuid.uuid4().hex[:12], session_id=session_id)
        with self._registry_lock:
            self._jobs[job.job_id] = job
        lock = self.session_lock(session_id)

        def run():
            with lock:
                job.status = JOB_RUNNING
                try:
                    fn()
                    job.status = JOB_SUCCEEDED
                except Exception as exc:  # surfaced via the job, not lost
                    job.status = JOB_FAILED
                    job.error = str(exc)
                    job.error_kind = type(exc).__name__
                    job.traceback = traceback.format_exc()
                finally:
                    job.done.set()

        self._pool.submit(run)
        return job

    def get(self, job_id: str) -> Job | None:
        return self._jobs.get(job_id)

    def shutdown(self) -> None:
        self._pool.shutdown(wait=False)
