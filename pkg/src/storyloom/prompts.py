"""The four prompt templates and their slot-filling compilers.

This module is the only place prompt text exists. Template bodies are frozen
and golden-tested byte for byte, delimiter quirks included; do not reflow or
"fix" them. Substitution is single-pass over the template, so slot markers
that happen to occur inside user data are never re-expanded.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from enum import Enum
from typing import Sequence

from .errors import EmptyChapter, EmptyName, MissingImage, NoEvents, SummaryCountMismatch


class TemplateId(str, Enum):
    SCENERY = "scenery"
    CHARACTER_APPEARANCE = "character_appearance"
    CHAPTER = "chapter"
    SUMMARY = "summary"


SCENERY_TEMPLATE = (
    "This image represents a place where events happened. Describe the place in "
    "detail. If the image has characters in it, do not describe them and ignore "
    "them. Your main focus is to describe the place and its surroundings in detail."
)

CHARACTER_TEMPLATE = (
    "Describe the character's appearance in detail for the attached image. The "
    "character name is [name], refrain from using pronouns, please use the "
    "character name instead. Make sure you start describing the character "
    "immediately. Do not use words like 'Certainly', or 'Okay'. If you do not "
    "receive an image, respond with nothing."
)

# First line is a deliberate extension: genre and structure feed the chapter
# prompt even though the frozen body below has no slot for them.
CHAPTER_TEMPLATE = (
    "You are writing a [genre] novel following a [structure] structure.\n"
    "Write chapter [chapter number] with dialogues using the following "
    "characters' details:\n"
    "[characters names and details]\n"
    "and the relationships between them are [list of relations].\n"
    "now map it to the information you have in the following events:\n"
    "[list of events]\n"
    "[previous chapters summary]\n"
    '<[description for the place where the events happened]>"""\n'
    'Output Length: """<3000 words>"""\n'
    'Structure of Writing: """<You are writing a chapter, follow the rules to '
    'write an amazing chapter"""\n'
    "Take your time with the writing, perfecting this chapter."
)

SUMMARY_TEMPLATE = (
    "Summarize the following the chapter shortly and concisely. Make sure you "
    "include all the important events in your summary as the next chapters will "
    "depend on it:\n"
    "[chapter to summarize]"
)

# Everything before the slot; the deterministic mock keys on this to tell
# summary calls apart from chapter calls.
SUMMARY_TEMPLATE_PREFIX = SUMMARY_TEMPLATE[: SUMMARY_TEMPLATE.index("[chapter to summarize]")]

TEMPLATES: dict[TemplateId, str] = {
    TemplateId.SCENERY: SCENERY_TEMPLATE,
    TemplateId.CHARACTER_APPEARANCE: CHARACTER_TEMPLATE,
    TemplateId.CHAPTER: CHAPTER_TEMPLATE,
    TemplateId.SUMMARY: SUMMARY_TEMPLATE,
}


@dataclass(frozen=True)
class CompiledPrompt:
    template_id: TemplateId
    text: str
    attachments: tuple[str, ...] = ()


def _fill(template: str, values: dict[str, str]) -> str:
    """Replace [slot] markers in one pass; substituted text is never rescanned."""
    pattern = re.compile("|".join(re.escape(f"[{name}]") for name in values))
    parts: list[str] = []
    pos = 0
    for m in pattern.finditer(template):
        parts.append(template[pos:m.start()])
        parts.append(values[m.group(0)[1:-1]])
        pos = m.end()
    parts.append(template[pos:])
    return "".join(parts)


def compile_scenery_prompt(image_ref: str | None) -> CompiledPrompt:
    """Prompt for describing a place image; the image rides as an attachment."""
    if not image_ref:
        raise MissingImage("scenery description needs an image")
    return CompiledPrompt(TemplateId.SCENERY, SCENERY_TEMPLATE, attachments=(image_ref,))


def compile_character_prompt(name: str, image_ref: str | None) -> CompiledPrompt:
    """Prompt for describing a character's appearance from an image."""
    if not image_ref:
        raise MissingImage("character description needs an image")
    name = name.strip()
    if not name:
        raise EmptyName("character name must be non-empty")
    text = _fill(CHARACTER_TEMPLATE, {"name": name})
    return CompiledPrompt(TemplateId.CHARACTER_APPEARANCE, text, attachments=(image_ref,))


def compile_chapter_prompt(
    chapter_no: int,
    characters_with_details: Sequence[tuple[str, str | None]],
    relations: Sequence[str],
    ordered_events: Sequence[str],
    prev_summaries: Sequence[str],
    place_description: str | None,
    genre: str,
    structure_name: str,
) -> CompiledPrompt:
    """Fill the chapter template from project state.

    ``ordered_events`` and ``relations`` arrive pre-rendered (see
    events.render_event_text); events keep the board's order, one per line.
    ``prev_summaries`` must hold exactly the summaries of chapters
    1..chapter_no-1, in chapter order.
    """
    if chapter_no < 1:
        raise ValueError("chapter_no is 1-based")
    if not ordered_events:
        raise NoEvents(f"chapter {chapter_no} has no events")
    if len(prev_summaries) != chapter_no - 1:
        raise SummaryCountMismatch(
            f"chapter {chapter_no} needs {chapter_no - 1} summaries, "
            f"got {len(prev_summaries)}")
    character_lines = "\n".join(
        f"{name}: {details}" if details else name
        for name, details in characters_with_details
    )
    values = {
        "genre": genre,
        "structure": structure_name,
        "chapter number": str(chapter_no),
        "characters names and details": character_lines,
        "list of relations": ", ".join(relations),
        "list of events": "\n".join(ordered_events),
        "previous chapters summary": "\n".join(prev_summaries),
        "description for the place where the events happened": place_description or "",
    }
    return CompiledPrompt(TemplateId.CHAPTER, _fill(CHAPTER_TEMPLATE, values))


def compile_summary_prompt(chapter_text: str) -> CompiledPrompt:
    """Prompt that condenses a finished chapter for the next chapter's context."""
    if not chapter_text.strip():
        raise EmptyChapter("cannot summarize an empty chapter")
    text = _fill(SUMMARY_TEMPLATE, {"chapter to summarize": chapter_text})
    return CompiledPrompt(TemplateId.SUMMARY, text)
