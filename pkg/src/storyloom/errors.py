"""Typed errors shared across the engine.

Every error carries a stable ``code`` (snake_case) that the HTTP layer maps
into structured error bodies, so callers never have to parse messages.
"""

from __future__ import annotations


class StoryloomError(Exception):
    """Base class for all engine errors."""

    code = "error"

    def __init__(self, message: str = ""):
        super().__init__(message or self.__class__.__name__)
        self.message = message or self.__class__.__name__


class InvalidRequest(StoryloomError):
    code = "invalid_request"


# --- storyboard model -------------------------------------------------------

class UnknownBoard(StoryloomError):
    code = "unknown_board"


class UnknownCharacter(StoryloomError):
    code = "unknown_character"


class UnknownNode(StoryloomError):
    code = "unknown_node"


class EmptyLabel(StoryloomError):
    code = "empty_label"


class EmptyName(StoryloomError):
    code = "empty_name"


class DuplicateName(StoryloomError):
    code = "duplicate_name"


class DuplicateCharacterNode(StoryloomError):
    code = "duplicate_character_node"


class IllegalEndpoints(StoryloomError):
    code = "illegal_endpoints"


class CrossBoard(StoryloomError):
    code = "cross_board"


class DuplicateEdge(StoryloomError):
    code = "duplicate_edge"


class UnknownGenre(StoryloomError):
    code = "unknown_genre"


# --- event extraction -------------------------------------------------------

class NotAPermutation(StoryloomError):
    code = "not_a_permutation"


# --- prompt compiler --------------------------------------------------------

class MissingImage(StoryloomError):
    code = "missing_image"


class SummaryCountMismatch(StoryloomError):
    code = "summary_count_mismatch"


class NoEvents(StoryloomError):
    code = "no_events"


class EmptyChapter(StoryloomError):
    code = "empty_chapter"


# --- generation pipeline ----------------------------------------------------

class ValidationFailed(StoryloomError):
    code = "validation_failed"

    def __init__(self, violations: list[str]):
        super().__init__("; ".join(violations) or "validation failed")
        self.violations = list(violations)


class ProviderError(StoryloomError):
    """A model provider call failed.

    ``transient`` marks failures worth one automatic retry. When raised from
    the pipeline, ``chapter_index`` locates the failure and ``completed``
    holds the chapters finished before it.
    """

    code = "provider_error"

    def __init__(self, message: str, *, transient: bool = False,
                 chapter_index: int | None = None, completed=None):
        super().__init__(message)
        self.transient = transient
        self.chapter_index = chapter_index
        self.completed = list(completed) if completed is not None else []


class Cancelled(StoryloomError):
    code = "cancelled"

    def __init__(self, message: str = "cancelled", *, completed=None):
        super().__init__(message)
        self.completed = list(completed) if completed is not None else []


class NoImage(StoryloomError):
    code = "no_image"


class UnknownJob(StoryloomError):
    code = "unknown_job"


class GenerationRunning(StoryloomError):
    code = "generation_running"


# --- metrics ----------------------------------------------------------------

class EmptyText(StoryloomError):
    code = "empty_text"


class EmptyValues(StoryloomError):
    code = "empty_values"


class OutOfRange(StoryloomError):
    code = "out_of_range"


class WrongLength(StoryloomError):
    code = "wrong_length"


class WrongShape(StoryloomError):
    code = "wrong_shape"


class BadSurveyFile(StoryloomError):
    code = "bad_survey_file"


# --- project store ----------------------------------------------------------

class NotFound(StoryloomError):
    code = "not_found"


class CorruptDocument(StoryloomError):
    code = "corrupt_document"

    def __init__(self, message: str, *, backup_path=None):
        super().__init__(message)
        self.backup_path = backup_path


class StorageFailure(StoryloomError):
    code = "storage_failure"
