"""Generation job registry: one running job per project, ordered progress.

Each job owns an append-only message log guarded by a condition variable.
Subscribers read from their subscription point onward; anyone subscribing
after the job ended gets a single terminal replay frame.
"""

from __future__ import annotations

import threading
import uuid
from typing import Callable

from ..errors import GenerationRunning, UnknownJob
from ..pipeline import TranscriptEntry

FRAME_VERSION = 1
TERMINAL_KINDS = frozenset({"job_done", "error"})


def make_frame(job_id: str, kind: str, chapter_index: int | None = None,
               payload: str = "") -> dict:
    return {"v": FRAME_VERSION, "job_id": job_id, "kind": kind,
            "chapter_index": chapter_index, "payload": payload}


class Job:
    def __init__(self, job_id: str, project_id: str):
        self.job_id = job_id
        self.project_id = project_id
        self.state = "pending"
        self.chapter_index: int | None = None
        self.reason: str | None = None
        self.cancel_event = threading.Event()
        self.transcript: list[TranscriptEntry] = []
        self._messages: list[dict] = []
        self._cond = threading.Condition()
        self._terminal = False

    def emit(self, kind: str, chapter_index: int | None = None, payload: str = "") -> None:
        """Append one progress frame; ignored once a terminal frame exists."""
        with self._cond:
            if self._terminal:
                return
            self._messages.append(make_frame(self.job_id, kind, chapter_index, payload))
            if kind == "chapter_started":
                self.state, self.chapter_index = "running_chapter", chapter_index
            elif kind == "chapter_done":
                self.state = "summarizing"
            elif kind == "job_done":
                self.state, self._terminal = "done", True
            elif kind == "error":
                self.state, self.reason, self._terminal = "failed", payload, True
                if chapter_index is not None:
                    self.chapter_index = chapter_index
            self._cond.notify_all()

    @property
    def done(self) -> bool:
        with self._cond:
            return self._terminal

    def subscribe(self) -> int:
        """Subscription point: current end of log, or just the terminal frame."""
        with self._cond:
            if self._terminal:
                return len(self._messages) - 1
            return len(self._messages)

    def next_frames(self, index: int, timeout: float | None = None) -> tuple[list[dict], int, bool]:
        """Block until frames beyond ``index`` exist (or timeout / terminal).

        Returns (frames, new_index, saw_terminal).
        """
        with self._cond:
            if len(self._messages) <= index and not self._terminal:
                self._cond.wait(timeout)
            frames = self._messages[index:]
            saw_terminal = any(f["kind"] in TERMINAL_KINDS for f in frames)
            return frames, len(self._messages), saw_terminal

    def describe(self) -> dict:
        with self._cond:
            doc = {"job_id": self.job_id, "project_id": self.project_id,
                   "state": self.state, "chapter_index": self.chapter_index}
            if self.reason is not None:
                doc["reason"] = self.reason
            return doc


class JobManager:
    def __init__(self):
        self._lock = threading.Lock()
        self._jobs: dict[str, Job] = {}
        self._by_project: dict[str, str] = {}

    def start(self, project_id: str, runner: Callable[[Job], None],
              *, start_barrier: threading.Event | None = None) -> Job:
        """Create and launch a job thread; refuses while one is still running."""
        with self._lock:
            active_id = self._by_project.get(project_id)
            if active_id is not None and not self._jobs[active_id].done:
                raise GenerationRunning(
                    f"project {project_id!r} already has job {active_id!r} running")
            job = Job(job_id=uuid.uuid4().hex, project_id=project_id)
            self._jobs[job.job_id] = job
            self._by_project[project_id] = job.job_id

        def run():
            if start_barrier is not None:
                start_barrier.wait()
            try:
                runner(job)
            except Exception as exc:  # terminal frame even on runner bugs
                job.emit("error", payload=f"internal error: {exc}")
            if not job.done:
                job.emit("error", payload="job ended without a terminal frame")

        threading.Thread(target=run, name=f"storyloom-job-{job.job_id[:8]}",
                         daemon=True).start()
        return job

    def get(self, job_id: str) -> Job:
        job = self._jobs.get(job_id)
        if job is None:
            raise UnknownJob(f"no job {job_id!r}")
        return job

    def try_get(self, job_id: str) -> Job | None:
        return self._jobs.get(job_id)

    def active_for(self, project_id: str) -> Job | None:
        with self._lock:
            job_id = self._by_project.get(project_id)
            if job_id is None:
                return None
            job = self._jobs[job_id]
            return None if job.done else job

    def cancel(self, job_id: str) -> dict:
        """Request cancellation; a finished job acknowledges as a no-op."""
        job = self.get(job_id)
        if not job.done:
            job.cancel_event.set()
        return {"acknowledged": True, **job.describe()}
