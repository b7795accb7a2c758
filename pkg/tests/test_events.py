"""Event/relation extraction, ordering, and textualization."""

import itertools

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from helpers import add_event, humiliation_project
from storyloom import model
from storyloom.errors import NotAPermutation
from storyloom.events import (
    extract_events,
    extract_relations,
    render_event_text,
    render_relation_text,
    set_event_order,
    valid_action_connector_ids,
)
from storyloom.model import Action, CharacterRef, Relationship, Structure


def test_worked_example_extracts_one_event():
    project, board_id, nodes = humiliation_project()
    board = model.get_board(project, board_id)
    extraction = extract_events(board, project)
    assert len(extraction.events) == 1
    assert extraction.incomplete == ()
    event = extraction.events[0]
    assert event.verb == "humiliated"
    assert render_event_text(event, project) == "Ahmad humiliated John and Ben"


def test_empty_board_extracts_nothing():
    project = model.new_project("p", "T", "drama", Structure.FREE)
    board_id = model.add_board(project)
    board = model.get_board(project, board_id)
    assert extract_events(board, project).events == ()
    assert extract_relations(board, project).relations == ()


def test_action_with_only_inbound_edges_is_incomplete():
    project = model.new_project("p", "T", "drama", Structure.FREE)
    board_id = model.add_board(project)
    a = model.add_node(project, board_id,
                       CharacterRef(model.add_character(project, "Ava")))
    act = model.add_node(project, board_id, Action("fled"))
    model.add_edge(project, board_id, a, act)
    extraction = extract_events(model.get_board(project, board_id), project)
    assert extraction.events == ()
    assert [i.connector_id for i in extraction.incomplete] == [act]
    assert extraction.incomplete[0].kind == "action"


def _single_action_board(n_in: int, n_out: int):
    """One action node with n_in inbound and n_out outbound character edges."""
    project = model.new_project("p", "T", "drama", Structure.FREE)
    board_id = model.add_board(project)
    act = model.add_node(project, board_id, Action("met"))
    for i in range(n_in + n_out):
        cid = model.add_character(project, f"Char{i}")
        node = model.add_node(project, board_id, CharacterRef(cid))
        if i < n_in:
            model.add_edge(project, board_id, node, act)
        else:
            model.add_edge(project, board_id, act, node)
    return project, model.get_board(project, board_id), act


def test_brute_force_single_action_configurations():
    # enumerate every (inbound, outbound) count up to 3 per side;
    # exactly the configurations with >=1 on each side yield an event
    for n_in, n_out in itertools.product(range(4), range(4)):
        project, board, act = _single_action_board(n_in, n_out)
        extraction = extract_events(board, project)
        expected_event = n_in >= 1 and n_out >= 1
        assert len(extraction.events) == (1 if expected_event else 0)
        assert len(extraction.incomplete) == (0 if expected_event else 1)
        assert len(extraction.events) + len(extraction.incomplete) == 1


def test_relation_direct_mapping():
    project = model.new_project("p", "T", "drama", Structure.FREE)
    board_id = model.add_board(project)
    a = model.add_node(project, board_id,
                       CharacterRef(model.add_character(project, "Ava")))
    b = model.add_node(project, board_id,
                       CharacterRef(model.add_character(project, "Brin")))
    rel = model.add_node(project, board_id, Relationship("brother of"))
    model.add_edge(project, board_id, a, rel)
    model.add_edge(project, board_id, rel, b)
    result = extract_relations(model.get_board(project, board_id), project)
    assert len(result.relations) == 1
    assert render_relation_text(result.relations[0], project) == "Ava brother of Brin"


def test_relation_with_no_edges_warns():
    project = model.new_project("p", "T", "drama", Structure.FREE)
    board_id = model.add_board(project)
    rel = model.add_node(project, board_id, Relationship("knows"))
    result = extract_relations(model.get_board(project, board_id), project)
    assert result.relations == ()
    assert [i.connector_id for i in result.incomplete] == [rel]
    assert result.incomplete[0].kind == "relationship"


def test_two_relations_keep_insertion_order():
    project = model.new_project("p", "T", "drama", Structure.FREE)
    board_id = model.add_board(project)
    a = model.add_node(project, board_id,
                       CharacterRef(model.add_character(project, "Ava")))
    b = model.add_node(project, board_id,
                       CharacterRef(model.add_character(project, "Brin")))
    r1 = model.add_node(project, board_id, Relationship("mentor of"))
    r2 = model.add_node(project, board_id, Relationship("rival of"))
    for rel in (r1, r2):
        model.add_edge(project, board_id, a, rel)
        model.add_edge(project, board_id, rel, b)
    result = extract_relations(model.get_board(project, board_id), project)
    assert [r.connector_id for r in result.relations] == [r1, r2]


def test_render_event_text_joins():
    project = model.new_project("p", "T", "drama", Structure.FREE)
    board_id = model.add_board(project)
    names = {}
    for name in ("A", "B", "C"):
        names[name] = model.add_node(
            project, board_id, CharacterRef(model.add_character(project, name)))
    met = add_event(project, board_id, names["A"], "met", names["B"])
    board = model.get_board(project, board_id)
    events = extract_events(board, project).events
    assert render_event_text(events[0], project) == "A met B"

    fought = model.add_node(project, board_id, Action("fought"))
    model.add_edge(project, board_id, names["A"], fought)
    model.add_edge(project, board_id, names["B"], fought)
    model.add_edge(project, board_id, fought, names["C"])
    events = extract_events(board, project).events
    rendered = [render_event_text(e, project) for e in events]
    assert rendered == ["A met B", "A and B fought C"]


def _two_event_board():
    project, board_id, nodes = humiliation_project()
    e2 = add_event(project, board_id, nodes["John"], "met", nodes["Ben"])
    return project, model.get_board(project, board_id), nodes["act"], e2


def test_set_event_order_applies_to_extraction():
    project, board, e1, e2 = _two_event_board()
    set_event_order(board, [e2, e1])
    events = extract_events(board, project).events
    assert [e.connector_id for e in events] == [e2, e1]
    assert [e.order_index for e in events] == [0, 1]


def test_set_event_order_rejects_duplicates():
    project, board, e1, e2 = _two_event_board()
    with pytest.raises(NotAPermutation):
        set_event_order(board, [e1, e1])


def test_set_event_order_rejects_missing_ids():
    project, board, e1, e2 = _two_event_board()
    with pytest.raises(NotAPermutation):
        set_event_order(board, [e1])
    with pytest.raises(NotAPermutation):
        set_event_order(board, [e1, e2, "n999"])


def test_extraction_is_pure():
    project, board_id, _ = humiliation_project()
    board = model.get_board(project, board_id)
    assert extract_events(board, project) == extract_events(board, project)


def test_events_reference_registered_characters():
    project, board_id, _ = humiliation_project()
    board = model.get_board(project, board_id)
    for event in extract_events(board, project).events:
        for cid in (*event.subjects, *event.objects):
            assert cid in project.characters


@settings(max_examples=30, deadline=None)
@given(seed=st.randoms(use_true_random=False))
def test_permuting_order_never_changes_event_set(seed):
    project, board, e1, e2 = _two_event_board()
    ahmad_node, _, ben_node = (n.id for n in board.nodes[:3])
    add_event(project, board.id, ahmad_node, "helped", ben_node)
    baseline = extract_events(board, project).events
    ids = [e.connector_id for e in baseline]
    permutation = list(ids)
    seed.shuffle(permutation)
    set_event_order(board, permutation)
    permuted = extract_events(board, project).events
    assert [e.connector_id for e in permuted] == permutation
    strip = lambda evs: {(e.connector_id, e.subjects, e.verb, e.objects) for e in evs}
    assert strip(permuted) == strip(baseline)
    count_actions = sum(isinstance(n.kind, Action) for n in board.nodes)
    extraction = extract_events(board, project)
    assert len(extraction.events) + len(extraction.incomplete) == count_actions
