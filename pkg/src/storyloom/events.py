"""Derive events and relations from a board's node/edge graph.

Everything here is a pure function over immutable snapshots: same board and
project in, byte-identical extraction out.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import NotAPermutation
from .model import Action, CharacterRef, Relationship, Storyboard, StoryProject


@dataclass(frozen=True)
class Event:
    connector_id: str
    subjects: tuple[str, ...]
    verb: str
    objects: tuple[str, ...]
    order_index: int


@dataclass(frozen=True)
class Relation:
    connector_id: str
    subjects: tuple[str, ...]
    label: str
    objects: tuple[str, ...]


@dataclass(frozen=True)
class IncompleteConnector:
    """A connector missing a side; reported, never silently dropped."""

    connector_id: str
    kind: str  # "action" | "relationship"
    reason: str


@dataclass(frozen=True)
class EventExtraction:
    events: tuple[Event, ...]
    incomplete: tuple[IncompleteConnector, ...]


@dataclass(frozen=True)
class RelationExtraction:
    relations: tuple[Relation, ...]
    incomplete: tuple[IncompleteConnector, ...]


def _sides(board: Storyboard, connector_id: str) -> tuple[tuple[str, ...], tuple[str, ...]]:
    """Character ids flowing into and out of a connector, edge insertion order."""
    node_by_id = {n.id: n for n in board.nodes}
    subjects = []
    objects = []
    for edge in board.edges:
        if edge.target == connector_id:
            src = node_by_id.get(edge.source)
            if src is not None and isinstance(src.kind, CharacterRef):
                subjects.append(src.kind.character_id)
        elif edge.source == connector_id:
            dst = node_by_id.get(edge.target)
            if dst is not None and isinstance(dst.kind, CharacterRef):
                objects.append(dst.kind.character_id)
    return tuple(subjects), tuple(objects)


def valid_action_connector_ids(board: Storyboard) -> list[str]:
    """Action connectors with at least one character on each side, board order."""
    ids = []
    for node in board.nodes:
        if isinstance(node.kind, Action):
            subjects, objects = _sides(board, node.id)
            if subjects and objects:
                ids.append(node.id)
    return ids


def extract_events(board: Storyboard, project: StoryProject) -> EventExtraction:
    """One Event per complete Action connector, in the user's order.

    Ordering follows ``board.event_order`` when set, else connector insertion
    order. Connectors missing a side come back as IncompleteConnector reports,
    so ``len(events) + len(incomplete)`` always equals the action-node count.
    """
    complete: dict[str, tuple[tuple[str, ...], str, tuple[str, ...]]] = {}
    incomplete: list[IncompleteConnector] = []
    for node in board.nodes:
        if not isinstance(node.kind, Action):
            continue
        subjects, objects = _sides(board, node.id)
        if subjects and objects:
            complete[node.id] = (subjects, node.kind.label, objects)
        else:
            missing = "both sides" if not subjects and not objects else (
                "a subject side" if not subjects else "an object side")
            incomplete.append(IncompleteConnector(node.id, "action", f"missing {missing}"))
    ordering = list(board.event_order) if board.event_order else list(complete)
    events = tuple(
        Event(connector_id=cid, subjects=complete[cid][0], verb=complete[cid][1],
              objects=complete[cid][2], order_index=i)
        for i, cid in enumerate(ordering)
    )
    return EventExtraction(events=events, incomplete=tuple(incomplete))


def extract_relations(board: Storyboard, project: StoryProject) -> RelationExtraction:
    """One Relation per complete Relationship connector, insertion order."""
    relations: list[Relation] = []
    incomplete: list[IncompleteConnector] = []
    for node in board.nodes:
        if not isinstance(node.kind, Relationship):
            continue
        subjects, objects = _sides(board, node.id)
        if subjects and objects:
            relations.append(Relation(connector_id=node.id, subjects=subjects,
                                      label=node.kind.label, objects=objects))
        else:
            missing = "both sides" if not subjects and not objects else (
                "a subject side" if not subjects else "an object side")
            incomplete.append(
                IncompleteConnector(node.id, "relationship", f"missing {missing}"))
    return RelationExtraction(relations=tuple(relations), incomplete=tuple(incomplete))


def _names(project: StoryProject, character_ids: tuple[str, ...]) -> str:
    return " and ".join(project.characters[cid].name for cid in character_ids)


def render_event_text(event: Event, project: StoryProject) -> str:
    """Textualize as "<subjects> <verb> <objects>", sides joined with ' and '."""
    return f"{_names(project, event.subjects)} {event.verb} {_names(project, event.objects)}"


def render_relation_text(relation: Relation, project: StoryProject) -> str:
    return (f"{_names(project, relation.subjects)} {relation.label} "
            f"{_names(project, relation.objects)}")


def set_event_order(board: Storyboard, permutation: list[str]) -> Storyboard:
    """Replace the board's event order.

    Raises NotAPermutation unless the ids are exactly the board's valid
    action connectors, each once.
    """
    expected = valid_action_connector_ids(board)
    if len(permutation) != len(set(permutation)):
        raise NotAPermutation("duplicate ids in event order")
    if set(permutation) != set(expected):
        missing = sorted(set(expected) - set(permutation))
        extra = sorted(set(permutation) - set(expected))
        raise NotAPermutation(f"event order mismatch (missing {missing}, extra {extra})")
    board.event_order = list(permutation)
    return board
