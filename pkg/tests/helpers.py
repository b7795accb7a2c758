"""Shared project builders for the test suite."""

from __future__ import annotations

from storyloom import model
from storyloom.model import Action, CharacterRef, Position, Relationship, Structure


def humiliation_project() -> tuple[model.StoryProject, str, dict[str, str]]:
    """The worked example: Ahmad humiliated John and Ben, on one free board.

    Returns (project, board_id, {name: node_id}) with the action node under
    key "act".
    """
    project = model.new_project("p1", "Example", "fantasy", Structure.FREE)
    board_id = model.add_board(project)
    ids = {}
    nodes = {}
    for name in ("Ahmad", "John", "Ben"):
        ids[name] = model.add_character(project, name)
        nodes[name] = model.add_node(project, board_id, CharacterRef(ids[name]),
                                     Position(10, 20))
    nodes["act"] = model.add_node(project, board_id, Action("humiliated"))
    model.add_edge(project, board_id, nodes["Ahmad"], nodes["act"])
    model.add_edge(project, board_id, nodes["act"], nodes["John"])
    model.add_edge(project, board_id, nodes["act"], nodes["Ben"])
    return project, board_id, nodes


def project_with_boards(n: int, structure: Structure = Structure.FREE,
                        genre: str = "fantasy",
                        project_id: str = "p") -> model.StoryProject:
    """A valid project with ``n`` boards, each holding one complete event."""
    project = model.new_project(project_id, "Multi", genre, structure)
    ava = model.add_character(project, "Ava")
    brin = model.add_character(project, "Brin")
    for _ in range(n):
        board_id = model.add_board(project)
        na = model.add_node(project, board_id, CharacterRef(ava))
        nb = model.add_node(project, board_id, CharacterRef(brin))
        act = model.add_node(project, board_id, Action("met"))
        model.add_edge(project, board_id, na, act)
        model.add_edge(project, board_id, act, nb)
    return project


def add_event(project: model.StoryProject, board_id: str, subject_node: str,
              verb: str, object_node: str) -> str:
    """Wire subject -> Action(verb) -> object; returns the action node id."""
    act = model.add_node(project, board_id, Action(verb))
    model.add_edge(project, board_id, subject_node, act)
    model.add_edge(project, board_id, act, object_node)
    return act
