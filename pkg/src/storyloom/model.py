"""Domain model for story projects: boards, nodes, edges, characters.

The model is plain data with value semantics. Operations either apply fully
or raise without touching the aggregate; ids are allocated from per-project
sequential counters so replaying the same operation log reproduces the same
state byte for byte.
"""

from __future__ import annotations

import copy
import re
from dataclasses import dataclass, field
from enum import Enum
from typing import Iterable, Union

from .errors import (
    CrossBoard,
    DuplicateCharacterNode,
    DuplicateEdge,
    DuplicateName,
    EmptyLabel,
    EmptyName,
    IllegalEndpoints,
    UnknownBoard,
    UnknownCharacter,
    UnknownGenre,
    UnknownNode,
)
from .vocab import DEFAULT_VOCAB, Vocab

SCHEMA_VERSION = 1


class Structure(str, Enum):
    FREE = "free"
    THREE_ACT = "three_act"
    FIVE_ACT = "five_act"

    @property
    def display_name(self) -> str:
        return {"free": "free", "three_act": "three-act", "five_act": "five-act"}[self.value]


THREE_ACT_LABELS = ("Introduction", "Climax", "Resolution")
FIVE_ACT_LABELS = ("Exposition", "Rising Action", "Climax", "Falling Action", "Resolution")


def act_label(structure: Structure, index: int) -> str:
    """Label for the board at ``index`` (0-based) under ``structure``."""
    labels: tuple[str, ...] = ()
    if structure is Structure.THREE_ACT:
        labels = THREE_ACT_LABELS
    elif structure is Structure.FIVE_ACT:
        labels = FIVE_ACT_LABELS
    if index < len(labels):
        return labels[index]
    return f"Board {index + 1}"


@dataclass(frozen=True)
class Position:
    """Canvas coordinates; persisted but never interpreted by the engine."""

    x: float = 0.0
    y: float = 0.0


@dataclass(frozen=True)
class CharacterRef:
    character_id: str


@dataclass(frozen=True)
class Action:
    label: str
    is_custom: bool = False


@dataclass(frozen=True)
class Relationship:
    label: str


NodeKind = Union[CharacterRef, Action, Relationship]


@dataclass
class Character:
    id: str
    name: str
    appearance: str | None = None
    image_ref: str | None = None


@dataclass
class Node:
    id: str
    board_id: str
    kind: NodeKind
    position: Position = Position()


@dataclass
class Edge:
    """Directed edge; direction encodes subject -> connector -> object."""

    id: str
    board_id: str
    source: str
    target: str


@dataclass
class Storyboard:
    id: str
    act_label: str
    nodes: list[Node] = field(default_factory=list)
    edges: list[Edge] = field(default_factory=list)
    event_order: list[str] = field(default_factory=list)
    scenery_description: str | None = None
    scenery_image_ref: str | None = None


@dataclass
class Chapter:
    index: int
    text: str
    summary: str | None = None
    word_target: int = 3000


@dataclass
class StoryProject:
    id: str
    title: str
    genre: str
    structure: Structure
    characters: dict[str, Character] = field(default_factory=dict)
    boards: list[Storyboard] = field(default_factory=list)
    chapters: list[Chapter] = field(default_factory=list)
    schema_version: int = SCHEMA_VERSION


# --- lookups -----------------------------------------------------------------

def get_board(project: StoryProject, board_id: str) -> Storyboard:
    for board in project.boards:
        if board.id == board_id:
            return board
    raise UnknownBoard(f"no board {board_id!r}")


def find_node(board: Storyboard, node_id: str) -> Node | None:
    for node in board.nodes:
        if node.id == node_id:
            return node
    return None


def _alloc_id(prefix: str, existing: Iterable[str]) -> str:
    pattern = re.compile(rf"{prefix}(\d+)$")
    highest = 0
    for item in existing:
        m = pattern.fullmatch(item)
        if m:
            highest = max(highest, int(m.group(1)))
    return f"{prefix}{highest + 1}"


def _all_node_ids(project: StoryProject) -> list[str]:
    return [n.id for b in project.boards for n in b.nodes]


def _all_edge_ids(project: StoryProject) -> list[str]:
    return [e.id for b in project.boards for e in b.edges]


def snapshot(project: StoryProject) -> StoryProject:
    """Deep copy safe to hand to other threads or to mutate speculatively."""
    return copy.deepcopy(project)


# --- operations ---------------------------------------------------------------

def new_project(project_id: str, title: str, genre: str,
                structure: Structure, vocab: Vocab = DEFAULT_VOCAB) -> StoryProject:
    if genre not in vocab.genres:
        raise UnknownGenre(f"genre {genre!r} not in configured list {list(vocab.genres)}")
    return StoryProject(id=project_id, title=title, genre=genre, structure=structure)


def set_genre(project: StoryProject, genre: str, vocab: Vocab = DEFAULT_VOCAB) -> None:
    if genre not in vocab.genres:
        raise UnknownGenre(f"genre {genre!r} not in configured list {list(vocab.genres)}")
    project.genre = genre


def set_structure(project: StoryProject, structure: Structure) -> None:
    """Switch story structure and re-derive act labels; boards are kept."""
    project.structure = structure
    relabel_boards(project)


def relabel_boards(project: StoryProject) -> None:
    for i, board in enumerate(project.boards):
        board.act_label = act_label(project.structure, i)


def add_character(project: StoryProject, name: str,
                  appearance: str | None = None, image_ref: str | None = None) -> str:
    name = name.strip()
    if not name:
        raise EmptyName("character name must be non-empty")
    if any(c.name == name for c in project.characters.values()):
        raise DuplicateName(f"character named {name!r} already exists")
    cid = _alloc_id("c", project.characters)
    project.characters[cid] = Character(id=cid, name=name, appearance=appearance,
                                        image_ref=image_ref)
    return cid


def add_board(project: StoryProject) -> str:
    bid = _alloc_id("b", (b.id for b in project.boards))
    board = Storyboard(id=bid, act_label=act_label(project.structure, len(project.boards)))
    project.boards.append(board)
    return bid


def remove_board(project: StoryProject, board_id: str) -> None:
    board = get_board(project, board_id)
    project.boards.remove(board)
    relabel_boards(project)
    # keep chapters <= boards after shrinking
    del project.chapters[len(project.boards):]


def add_node(project: StoryProject, board_id: str, kind: NodeKind,
             position: Position = Position()) -> str:
    board = get_board(project, board_id)
    if isinstance(kind, CharacterRef):
        if kind.character_id not in project.characters:
            raise UnknownCharacter(f"no character {kind.character_id!r}")
        for node in board.nodes:
            if isinstance(node.kind, CharacterRef) and node.kind.character_id == kind.character_id:
                raise DuplicateCharacterNode(
                    f"character {kind.character_id!r} already has a node on board {board_id!r}")
    elif isinstance(kind, (Action, Relationship)):
        if not kind.label.strip():
            raise EmptyLabel("connector label must be non-empty")
    else:
        raise TypeError(f"unsupported node kind: {kind!r}")
    nid = _alloc_id("n", _all_node_ids(project))
    board.nodes.append(Node(id=nid, board_id=board_id, kind=kind, position=position))
    return nid


def remove_node(project: StoryProject, board_id: str, node_id: str) -> None:
    """Remove a node together with its incident edges and order entry."""
    board = get_board(project, board_id)
    node = find_node(board, node_id)
    if node is None:
        raise UnknownNode(f"no node {node_id!r} on board {board_id!r}")
    board.nodes.remove(node)
    board.edges = [e for e in board.edges if node_id not in (e.source, e.target)]
    board.event_order = [i for i in board.event_order if i != node_id]


def add_edge(project: StoryProject, board_id: str, source: str, target: str) -> str:
    board = get_board(project, board_id)
    src = find_node(board, source)
    dst = find_node(board, target)
    for missing in (source, target):
        if find_node(board, missing) is None:
            for other in project.boards:
                if other.id != board_id and find_node(other, missing) is not None:
                    raise CrossBoard(f"node {missing!r} lives on board {other.id!r}")
            raise UnknownNode(f"no node {missing!r} on board {board_id!r}")
    assert src is not None and dst is not None
    character_ends = sum(isinstance(n.kind, CharacterRef) for n in (src, dst))
    if character_ends != 1:
        raise IllegalEndpoints(
            "an edge must join exactly one character node and one connector node")
    if any(e.source == source and e.target == target for e in board.edges):
        raise DuplicateEdge(f"edge {source!r}->{target!r} already exists")
    eid = _alloc_id("e", _all_edge_ids(project))
    board.edges.append(Edge(id=eid, board_id=board_id, source=source, target=target))
    return eid


def remove_edge(project: StoryProject, board_id: str, edge_id: str) -> None:
    board = get_board(project, board_id)
    for edge in board.edges:
        if edge.id == edge_id:
            board.edges.remove(edge)
            return
    raise UnknownNode(f"no edge {edge_id!r} on board {board_id!r}")


# --- validation ---------------------------------------------------------------

_REQUIRED_BOARDS = {Structure.THREE_ACT: 3, Structure.FIVE_ACT: 5}


def validate_structure(project: StoryProject) -> list[str]:
    """Check board count against the selected structure.

    Returns a list of violations; empty means the project may generate.
    """
    n = len(project.boards)
    if project.structure is Structure.FREE:
        if n < 1:
            return ["expected at least 1 board, found 0"]
        return []
    required = _REQUIRED_BOARDS[project.structure]
    if n != required:
        return [f"expected {required} boards, found {n}"]
    return []


def check_invariants(project: StoryProject) -> list[str]:
    """Exhaustive structural scan used by the store on save and load."""
    problems: list[str] = []
    if project.schema_version != SCHEMA_VERSION:
        problems.append(f"unsupported schema_version {project.schema_version}")
    seen_names: set[str] = set()
    for cid, character in project.characters.items():
        if cid != character.id:
            problems.append(f"character registry key {cid!r} != id {character.id!r}")
        if not character.name.strip():
            problems.append(f"character {cid!r} has an empty name")
        if character.name in seen_names:
            problems.append(f"duplicate character name {character.name!r}")
        seen_names.add(character.name)
    if len(project.chapters) > len(project.boards):
        problems.append(
            f"{len(project.chapters)} chapters exceed {len(project.boards)} boards")
    for board in project.boards:
        node_ids = {n.id for n in board.nodes}
        for node in board.nodes:
            if node.board_id != board.id:
                problems.append(f"node {node.id!r} claims board {node.board_id!r}")
            if isinstance(node.kind, CharacterRef):
                if node.kind.character_id not in project.characters:
                    problems.append(
                        f"node {node.id!r} references unknown character "
                        f"{node.kind.character_id!r}")
            elif not node.kind.label.strip():
                problems.append(f"node {node.id!r} has an empty label")
        seen_pairs: set[tuple[str, str]] = set()
        for edge in board.edges:
            if edge.source not in node_ids or edge.target not in node_ids:
                problems.append(f"edge {edge.id!r} has endpoints off board {board.id!r}")
                continue
            ends = (find_node(board, edge.source), find_node(board, edge.target))
            if sum(isinstance(n.kind, CharacterRef) for n in ends if n) != 1:
                problems.append(f"edge {edge.id!r} does not join a character to a connector")
            pair = (edge.source, edge.target)
            if pair in seen_pairs:
                problems.append(f"duplicate edge {pair!r} on board {board.id!r}")
            seen_pairs.add(pair)
        if board.event_order and not _order_matches(board, project):
            problems.append(f"event_order on board {board.id!r} is not a permutation "
                            "of its valid action connectors")
    return problems


def _order_matches(board: Storyboard, project: StoryProject) -> bool:
    from .events import valid_action_connector_ids  # cycle-free at call time
    expected = set(valid_action_connector_ids(board))
    order = board.event_order
    return len(order) == len(set(order)) and set(order) == expected
