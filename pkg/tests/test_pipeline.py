"""Generation pipeline over the deterministic mock provider."""

import threading

import pytest

from helpers import humiliation_project, project_with_boards
from storyloom import model
from storyloom.errors import Cancelled, NoImage, ProviderError, ValidationFailed
from storyloom.model import Action, Structure
from storyloom.pipeline import (
    PipelineEvent,
    describe_character,
    describe_scenery,
    generate_story,
    validate_for_generation,
)
from storyloom.prompts import TemplateId
from storyloom.providers import MockProvider


class CountingMock(MockProvider):
    def __init__(self):
        self.calls = 0

    def generate(self, prompt, attachments=()):
        self.calls += 1
        return super().generate(prompt, attachments)


class ScriptedFailure(MockProvider):
    """Fails on the given 1-based call numbers."""

    def __init__(self, fail_on, transient=False):
        self.fail_on = set(fail_on)
        self.transient = transient
        self.calls = 0

    def generate(self, prompt, attachments=()):
        self.calls += 1
        if self.calls in self.fail_on:
            raise ProviderError("scripted failure", transient=self.transient)
        return super().generate(prompt, attachments)


def chapter_prompts(transcript):
    return [e for e in transcript if e.prompt.template_id is TemplateId.CHAPTER]


def summary_responses(transcript):
    return [e.response for e in transcript
            if e.prompt.template_id is TemplateId.SUMMARY]


def test_three_board_transcript_chains_summaries():
    project = project_with_boards(3)
    transcript = []
    chapters = generate_story(project, MockProvider(), transcript=transcript)
    assert len(chapters) == 3
    prompts = chapter_prompts(transcript)
    assert "SUM(CH1" in prompts[1].prompt.text
    summaries = summary_responses(transcript)
    assert summaries[0] in prompts[2].prompt.text
    assert summaries[1] in prompts[2].prompt.text
    assert prompts[2].prompt.text.index(summaries[0]) < prompts[2].prompt.text.index(summaries[1])


@pytest.mark.parametrize("n", [1, 2, 3, 5])
def test_call_count_is_two_per_board(n):
    project = project_with_boards(n)
    provider = CountingMock()
    chapters = generate_story(project, provider)
    assert provider.calls == 2 * n
    assert [c.index for c in chapters] == list(range(1, n + 1))
    assert all(c.summary for c in chapters)


@pytest.mark.parametrize("n", [1, 2, 3, 5])
def test_chapter_k_contains_exactly_prior_summaries(n):
    project = project_with_boards(n)
    transcript = []
    generate_story(project, MockProvider(), transcript=transcript)
    summaries = summary_responses(transcript)
    for k, entry in enumerate(chapter_prompts(transcript), start=1):
        text = entry.prompt.text
        for j, summary in enumerate(summaries, start=1):
            expected = 1 if j < k else 0
            assert text.count(summary) == expected, (
                f"chapter {k} prompt should contain summary {j} "
                f"{expected} times")
        # prior summaries appear in chapter order
        positions = [text.index(s) for s in summaries[: k - 1]]
        assert positions == sorted(positions)


def test_board_without_events_fails_before_any_call():
    project = project_with_boards(2)
    empty = model.add_board(project)  # third board, no nodes
    provider = CountingMock()
    with pytest.raises(ValidationFailed) as err:
        generate_story(project, provider)
    assert provider.calls == 0
    assert any("has no events" in v for v in err.value.violations)


def test_structure_violation_blocks_generation():
    project = project_with_boards(2, Structure.THREE_ACT)
    provider = CountingMock()
    with pytest.raises(ValidationFailed) as err:
        generate_story(project, provider)
    assert provider.calls == 0
    assert "expected 3 boards, found 2" in err.value.violations


def test_incomplete_connector_blocks_generation():
    project, board_id, nodes = humiliation_project()
    dangling = model.add_node(project, board_id, Action("vanished"))
    model.add_edge(project, board_id, nodes["Ahmad"], dangling)
    with pytest.raises(ValidationFailed) as err:
        generate_story(project, MockProvider())
    assert any(dangling in v for v in err.value.violations)


def test_mock_runs_are_deterministic():
    project = project_with_boards(3)
    t1, t2 = [], []
    generate_story(model.snapshot(project), MockProvider(), transcript=t1)
    generate_story(model.snapshot(project), MockProvider(), transcript=t2)
    assert t1 == t2


def test_provider_failure_keeps_earlier_chapters():
    project = project_with_boards(3)
    # call 3 is chapter 2's text call (calls 1-2 are chapter 1 text + summary)
    provider = ScriptedFailure(fail_on={3})
    with pytest.raises(ProviderError) as err:
        generate_story(project, provider)
    assert err.value.chapter_index == 2
    assert len(err.value.completed) == 1
    assert all(c.summary for c in err.value.completed)


def test_failure_during_summary_drops_that_chapter():
    project = project_with_boards(2)
    provider = ScriptedFailure(fail_on={2})  # chapter 1's summary call
    with pytest.raises(ProviderError) as err:
        generate_story(project, provider)
    assert err.value.chapter_index == 1
    assert err.value.completed == []


def test_transient_failure_retried_once():
    project = project_with_boards(1)
    provider = ScriptedFailure(fail_on={1}, transient=True)
    chapters = generate_story(project, provider)
    assert len(chapters) == 1
    assert provider.calls == 3  # failed try, retry, summary


def test_two_transient_failures_fail_the_job():
    project = project_with_boards(1)
    provider = ScriptedFailure(fail_on={1, 2}, transient=True)
    with pytest.raises(ProviderError):
        generate_story(project, provider)


def test_cancel_stops_before_next_chapter():
    project = project_with_boards(3)
    provider = CountingMock()
    cancel = threading.Event()

    def sink(event: PipelineEvent):
        if event.kind == "summary_done" and event.chapter_index == 1:
            cancel.set()

    with pytest.raises(Cancelled) as err:
        generate_story(project, provider, sink, cancel=cancel)
    assert provider.calls == 2  # chapter 1 text + summary; chapter 2 never requested
    assert len(err.value.completed) == 1


def test_progress_event_sequence():
    project = project_with_boards(2)
    events = []
    generate_story(project, MockProvider(), events.append)
    assert [(e.kind, e.chapter_index) for e in events] == [
        ("chapter_started", 1), ("text_chunk", 1), ("chapter_done", 1),
        ("summary_done", 1),
        ("chapter_started", 2), ("text_chunk", 2), ("chapter_done", 2),
        ("summary_done", 2),
    ]
    text_chunks = [e for e in events if e.kind == "text_chunk"]
    assert all(e.payload.startswith(f"CH{e.chapter_index}:") for e in text_chunks)


def test_describe_character_with_mock():
    project, _, _ = humiliation_project()
    cid = next(iter(project.characters))
    project.characters[cid].image_ref = "someref"
    character = describe_character(project, cid, MockProvider())
    assert character.appearance == MockProvider.VISION_SENTINEL
    # idempotent re-run overwrites
    character.appearance = "stale"
    assert describe_character(project, cid, MockProvider()).appearance == \
        MockProvider.VISION_SENTINEL


def test_describe_character_without_image():
    project, _, _ = humiliation_project()
    cid = next(iter(project.characters))
    with pytest.raises(NoImage):
        describe_character(project, cid, MockProvider())


def test_describe_scenery_feeds_chapter_prompt():
    project, board_id, _ = humiliation_project()
    board = model.get_board(project, board_id)
    board.scenery_image_ref = "sceneref"
    describe_scenery(project, board_id, MockProvider())
    assert board.scenery_description == MockProvider.VISION_SENTINEL

    transcript = []
    generate_story(project, MockProvider(), transcript=transcript)
    first_chapter = chapter_prompts(transcript)[0].prompt.text
    assert f"<{MockProvider.VISION_SENTINEL}>" in first_chapter


def test_text_only_provider_cannot_describe():
    class TextOnly(MockProvider):
        capabilities = frozenset({"text"})

    project, board_id, _ = humiliation_project()
    board = model.get_board(project, board_id)
    board.scenery_image_ref = "sceneref"
    with pytest.raises(ProviderError):
        describe_scenery(project, board_id, TextOnly())


def test_validate_for_generation_reports_all_boards():
    project = project_with_boards(1)
    model.add_board(project)
    model.add_board(project)
    report = validate_for_generation(project)
    assert len([v for v in report if "has no events" in v]) == 2
