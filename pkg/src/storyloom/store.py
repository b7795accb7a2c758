"""Durable project persistence: atomic writes, versioning, blobs, transcripts.

Layout per project: ``<root>/projects/<id>/project.json`` plus
``project.json.bak`` (previous document), ``version`` (monotonic counter),
``transcript.log`` (append-only JSON lines) and ``blobs/<sha256>``.

A reader never sees a torn document: writes go to a temp file in the same
directory, fsync, then ``os.replace``.
"""

from __future__ import annotations

import hashlib
import json
import os
import re
from pathlib import Path

from .errors import CorruptDocument, NotFound, StorageFailure, ValidationFailed
from .model import StoryProject, check_invariants
from .serialize import canonical_bytes, from_document

_SAFE_ID = re.compile(r"[A-Za-z0-9_-]+")


def _atomic_write(path: Path, data: bytes) -> None:
    tmp = path.with_name(path.name + ".tmp")
    try:
        with open(tmp, "wb") as fh:
            fh.write(data)
            fh.flush()
            os.fsync(fh.fileno())
        os.replace(tmp, path)
    except OSError as exc:
        raise StorageFailure(f"writing {path}: {exc}") from exc


class ProjectStore:
    def __init__(self, root: str | Path):
        self.root = Path(root)
        (self.root / "projects").mkdir(parents=True, exist_ok=True)

    def _dir(self, project_id: str) -> Path:
        if not _SAFE_ID.fullmatch(project_id):
            raise NotFound(f"no project {project_id!r}")
        return self.root / "projects" / project_id

    # --- documents -----------------------------------------------------------

    def save(self, project: StoryProject) -> int:
        """Atomically replace the project document; returns the new version."""
        problems = check_invariants(project)
        if problems:
            raise ValidationFailed(problems)
        directory = self._dir(project.id)
        directory.mkdir(parents=True, exist_ok=True)
        doc_path = directory / "project.json"
        if doc_path.exists():
            _atomic_write(directory / "project.json.bak", doc_path.read_bytes())
        _atomic_write(doc_path, canonical_bytes(project))
        version = self.version(project.id) + 1
        _atomic_write(directory / "version", str(version).encode("ascii"))
        return version

    def load(self, project_id: str) -> StoryProject:
        """Parse and invariant-check the stored document before returning it."""
        doc_path = self._dir(project_id) / "project.json"
        if not doc_path.exists():
            raise NotFound(f"no project {project_id!r}")
        backup = doc_path.with_name("project.json.bak")
        backup_path = backup if backup.exists() else None
        try:
            doc = json.loads(doc_path.read_bytes())
        except ValueError as exc:
            raise CorruptDocument(f"project {project_id!r} is not valid JSON: {exc}",
                                  backup_path=backup_path)
        try:
            project = from_document(doc, project_id)
        except CorruptDocument as exc:
            raise CorruptDocument(str(exc), backup_path=backup_path)
        problems = check_invariants(project)
        if problems:
            raise CorruptDocument(f"project {project_id!r} violates invariants: "
                                  f"{'; '.join(problems)}", backup_path=backup_path)
        return project

    def version(self, project_id: str) -> int:
        path = self._dir(project_id) / "version"
        try:
            return int(path.read_text("ascii"))
        except (OSError, ValueError):
            return 0

    def list_ids(self) -> list[str]:
        base = self.root / "projects"
        return sorted(p.name for p in base.iterdir()
                      if p.is_dir() and (p / "project.json").exists())

    def delete(self, project_id: str) -> None:
        import shutil

        directory = self._dir(project_id)
        if not directory.exists():
            raise NotFound(f"no project {project_id!r}")
        shutil.rmtree(directory)

    # --- blobs ----------------------------------------------------------------

    def put_blob(self, project_id: str, data: bytes) -> str:
        """Store image bytes content-addressed; returns the sha256 ref."""
        ref = hashlib.sha256(data).hexdigest()
        blob_dir = self._dir(project_id) / "blobs"
        blob_dir.mkdir(parents=True, exist_ok=True)
        path = blob_dir / ref
        if not path.exists():
            _atomic_write(path, data)
        return ref

    def get_blob(self, project_id: str, ref: str) -> bytes | None:
        if not _SAFE_ID.fullmatch(ref or ""):
            return None
        path = self._dir(project_id) / "blobs" / ref
        return path.read_bytes() if path.exists() else None

    def find_blob(self, ref: str) -> bytes | None:
        """Resolve a content-addressed ref across projects (same ref, same bytes)."""
        if not _SAFE_ID.fullmatch(ref or ""):
            return None
        for hit in (self.root / "projects").glob(f"*/blobs/{ref}"):
            return hit.read_bytes()
        return None

    # --- transcript ------------------------------------------------------------

    def append_transcript(self, project_id: str, entry: dict) -> None:
        directory = self._dir(project_id)
        directory.mkdir(parents=True, exist_ok=True)
        line = json.dumps(entry, sort_keys=True, ensure_ascii=False)
        with open(directory / "transcript.log", "a", encoding="utf-8") as fh:
            fh.write(line + "\n")

    def read_transcript(self, project_id: str) -> list[dict]:
        path = self._dir(project_id) / "transcript.log"
        if not path.exists():
            return []
        return [json.loads(line) for line in path.read_text("utf-8").splitlines() if line]
