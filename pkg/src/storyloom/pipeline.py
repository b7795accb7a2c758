"""Chapter-by-chapter story generation with recursive summary chaining.

Each board becomes one chapter. Chapter k's prompt carries the model-written
summaries of chapters 1..k-1, so later chapters stay coherent with earlier
ones; the dependency chain is why chapters are never generated in parallel.
"""

from __future__ import annotations

import threading
from dataclasses import dataclass
from typing import Callable, Sequence

from .errors import Cancelled, NoImage, ProviderError, StoryloomError, ValidationFailed
from .events import (
    extract_events,
    extract_relations,
    render_event_text,
    render_relation_text,
)
from .model import Chapter, CharacterRef, Storyboard, StoryProject, validate_structure
from .prompts import (
    CompiledPrompt,
    compile_character_prompt,
    compile_chapter_prompt,
    compile_scenery_prompt,
    compile_summary_prompt,
)
from .providers import ModelProvider


@dataclass(frozen=True)
class PipelineEvent:
    kind: str  # chapter_started | text_chunk | chapter_done | summary_done
    chapter_index: int
    payload: str = ""


@dataclass(frozen=True)
class TranscriptEntry:
    prompt: CompiledPrompt
    response: str


ProgressSink = Callable[[PipelineEvent], None]


def validate_for_generation(project: StoryProject) -> list[str]:
    """Everything that must hold before the first provider call.

    Structure violations, boards without a single valid event, and incomplete
    connectors (either kind) all block generation outright.
    """
    violations = list(validate_structure(project))
    for board in project.boards:
        extraction = extract_events(board, project)
        relations = extract_relations(board, project)
        for inc in (*extraction.incomplete, *relations.incomplete):
            violations.append(
                f"board {board.id} ({board.act_label}): {inc.kind} connector "
                f"{inc.connector_id} is {inc.reason}")
        if not extraction.events:
            violations.append(f"board {board.id} ({board.act_label}) has no events")
    return violations


def _call(provider: ModelProvider, prompt: CompiledPrompt,
          transcript: list[TranscriptEntry]) -> str:
    """One provider call with a single automatic retry on transient failure."""
    attempts = 0
    while True:
        attempts += 1
        try:
            response = provider.generate(prompt.text, prompt.attachments)
            break
        except ProviderError as exc:
            if exc.transient and attempts == 1:
                continue
            raise
        except StoryloomError:
            raise
        except Exception as exc:  # provider bugs become typed failures
            raise ProviderError(f"provider raised {type(exc).__name__}: {exc}") from exc
    transcript.append(TranscriptEntry(prompt=prompt, response=response))
    return response


def _board_characters(board: Storyboard, project: StoryProject) -> list[tuple[str, str | None]]:
    """(name, appearance) for each character placed on the board, node order."""
    details = []
    for node in board.nodes:
        if isinstance(node.kind, CharacterRef):
            character = project.characters[node.kind.character_id]
            details.append((character.name, character.appearance))
    return details


def generate_story(
    project: StoryProject,
    provider: ModelProvider,
    progress_sink: ProgressSink | None = None,
    *,
    cancel: threading.Event | None = None,
    transcript: list[TranscriptEntry] | None = None,
    on_chapter: Callable[[Chapter], None] | None = None,
) -> list[Chapter]:
    """Generate one chapter per board, in board order.

    Per board k: compile the chapter prompt with summaries 1..k-1, call the
    provider, then compile and run the summary prompt on the fresh chapter.
    A chapter only counts as completed once its summary exists, so a failure
    at chapter k leaves exactly chapters 1..k-1 behind (on the raised error's
    ``completed`` attribute).
    """
    violations = validate_for_generation(project)
    if violations:
        raise ValidationFailed(violations)
    if transcript is None:
        transcript = []
    emit = progress_sink or (lambda event: None)

    completed: list[Chapter] = []
    summaries: list[str] = []
    for k, board in enumerate(project.boards, start=1):
        if cancel is not None and cancel.is_set():
            raise Cancelled(completed=completed)
        extraction = extract_events(board, project)
        rendered_events = [render_event_text(e, project) for e in extraction.events]
        rendered_relations = [
            render_relation_text(r, project)
            for r in extract_relations(board, project).relations
        ]
        prompt = compile_chapter_prompt(
            chapter_no=k,
            characters_with_details=_board_characters(board, project),
            relations=rendered_relations,
            ordered_events=rendered_events,
            prev_summaries=summaries,
            place_description=board.scenery_description,
            genre=project.genre,
            structure_name=project.structure.display_name,
        )
        emit(PipelineEvent("chapter_started", k))
        try:
            text = _call(provider, prompt, transcript)
        except ProviderError as exc:
            exc.chapter_index = k
            exc.completed = list(completed)
            raise
        emit(PipelineEvent("text_chunk", k, text))
        emit(PipelineEvent("chapter_done", k))

        if cancel is not None and cancel.is_set():
            raise Cancelled(completed=completed)
        try:
            summary = _call(provider, compile_summary_prompt(text), transcript)
        except ProviderError as exc:
            exc.chapter_index = k
            exc.completed = list(completed)
            raise
        chapter = Chapter(index=k, text=text, summary=summary)
        summaries.append(summary)
        completed.append(chapter)
        if on_chapter is not None:
            on_chapter(chapter)
        emit(PipelineEvent("summary_done", k))
    return completed


def describe_character(project: StoryProject, character_id: str, provider: ModelProvider,
                       transcript: list[TranscriptEntry] | None = None):
    """Fill a character's appearance from its image; re-running overwrites."""
    from .errors import UnknownCharacter

    character = project.characters.get(character_id)
    if character is None:
        raise UnknownCharacter(f"no character {character_id!r}")
    if not character.image_ref:
        raise NoImage(f"character {character_id!r} has no image")
    if not provider.supports_vision:
        raise ProviderError(f"provider {provider.name!r} cannot describe images")
    prompt = compile_character_prompt(character.name, character.image_ref)
    character.appearance = _call(provider, prompt, transcript if transcript is not None else [])
    return character


def describe_scenery(project: StoryProject, board_id: str, provider: ModelProvider,
                     transcript: list[TranscriptEntry] | None = None) -> Storyboard:
    """Fill a board's scenery description from its image."""
    from .model import get_board

    board = get_board(project, board_id)
    if not board.scenery_image_ref:
        raise NoImage(f"board {board_id!r} has no scenery image")
    if not provider.supports_vision:
        raise ProviderError(f"provider {provider.name!r} cannot describe images")
    prompt = compile_scenery_prompt(board.scenery_image_ref)
    board.scenery_description = _call(provider, prompt,
                                      transcript if transcript is not None else [])
    return board
