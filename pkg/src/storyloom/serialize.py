"""Project file format: strict JSON (de)serialization.

The document is canonical: sorted keys, two-space indent, every field present
(null where unset), trailing newline. That makes save/load round trips
byte-stable and diffs quiet. Unknown fields are rejected at every level.
"""

from __future__ import annotations

import json

from .errors import CorruptDocument
from .model import (
    Action,
    Chapter,
    Character,
    CharacterRef,
    Edge,
    Node,
    NodeKind,
    Position,
    Relationship,
    Storyboard,
    StoryProject,
    Structure,
)

_TOP_FIELDS = {"schema_version", "title", "genre", "structure", "characters",
               "boards", "chapters"}
_CHARACTER_FIELDS = {"id", "name", "appearance", "image_ref"}
_BOARD_FIELDS = {"id", "act_label", "nodes", "edges", "event_order",
                 "scenery_description", "scenery_image_ref"}
_NODE_FIELDS = {"id", "board_id", "kind", "position"}
_EDGE_FIELDS = {"id", "board_id", "source", "target"}
_CHAPTER_FIELDS = {"index", "text", "summary", "word_target"}


def _kind_to_doc(kind: NodeKind) -> dict:
    if isinstance(kind, CharacterRef):
        return {"type": "character_ref", "character_id": kind.character_id}
    if isinstance(kind, Action):
        return {"type": "action", "label": kind.label, "is_custom": kind.is_custom}
    return {"type": "relationship", "label": kind.label}


def to_document(project: StoryProject) -> dict:
    return {
        "schema_version": project.schema_version,
        "title": project.title,
        "genre": project.genre,
        "structure": project.structure.value,
        "characters": [
            {"id": c.id, "name": c.name, "appearance": c.appearance,
             "image_ref": c.image_ref}
            for c in project.characters.values()
        ],
        "boards": [
            {
                "id": b.id,
                "act_label": b.act_label,
                "nodes": [
                    {"id": n.id, "board_id": n.board_id, "kind": _kind_to_doc(n.kind),
                     "position": {"x": float(n.position.x), "y": float(n.position.y)}}
                    for n in b.nodes
                ],
                "edges": [
                    {"id": e.id, "board_id": e.board_id, "source": e.source,
                     "target": e.target}
                    for e in b.edges
                ],
                "event_order": list(b.event_order),
                "scenery_description": b.scenery_description,
                "scenery_image_ref": b.scenery_image_ref,
            }
            for b in project.boards
        ],
        "chapters": [
            {"index": ch.index, "text": ch.text, "summary": ch.summary,
             "word_target": ch.word_target}
            for ch in project.chapters
        ],
    }


def canonical_bytes(project: StoryProject) -> bytes:
    doc = to_document(project)
    return (json.dumps(doc, sort_keys=True, indent=2, ensure_ascii=False) + "\n").encode("utf-8")


def _require(doc: dict, fields: set[str], where: str) -> None:
    if not isinstance(doc, dict):
        raise CorruptDocument(f"{where}: expected an object")
    unknown = set(doc) - fields
    if unknown:
        raise CorruptDocument(f"{where}: unknown fields {sorted(unknown)}")
    missing = fields - set(doc)
    if missing:
        raise CorruptDocument(f"{where}: missing fields {sorted(missing)}")


def _string(value, where: str, optional: bool = False):
    if optional and value is None:
        return None
    if not isinstance(value, str):
        raise CorruptDocument(f"{where}: expected a string")
    return value


def _kind_from_doc(doc: dict, where: str) -> NodeKind:
    if not isinstance(doc, dict) or "type" not in doc:
        raise CorruptDocument(f"{where}: kind must be a tagged object")
    tag = doc["type"]
    if tag == "character_ref":
        _require(doc, {"type", "character_id"}, where)
        return CharacterRef(character_id=_string(doc["character_id"], where))
    if tag == "action":
        _require(doc, {"type", "label", "is_custom"}, where)
        if not isinstance(doc["is_custom"], bool):
            raise CorruptDocument(f"{where}: is_custom must be a boolean")
        return Action(label=_string(doc["label"], where), is_custom=doc["is_custom"])
    if tag == "relationship":
        _require(doc, {"type", "label"}, where)
        return Relationship(label=_string(doc["label"], where))
    raise CorruptDocument(f"{where}: unknown kind {tag!r}")


def from_document(doc: dict, project_id: str) -> StoryProject:
    """Parse a project document; the id comes from the storage location."""
    _require(doc, _TOP_FIELDS, "project")
    if not isinstance(doc["schema_version"], int):
        raise CorruptDocument("project: schema_version must be an integer")
    try:
        structure = Structure(doc["structure"])
    except ValueError:
        raise CorruptDocument(f"project: unknown structure {doc['structure']!r}")

    characters: dict[str, Character] = {}
    for c in doc["characters"]:
        _require(c, _CHARACTER_FIELDS, "character")
        cid = _string(c["id"], "character.id")
        if cid in characters:
            raise CorruptDocument(f"character: duplicate id {cid!r}")
        characters[cid] = Character(
            id=cid,
            name=_string(c["name"], "character.name"),
            appearance=_string(c["appearance"], "character.appearance", optional=True),
            image_ref=_string(c["image_ref"], "character.image_ref", optional=True),
        )

    boards: list[Storyboard] = []
    for b in doc["boards"]:
        _require(b, _BOARD_FIELDS, "board")
        nodes = []
        for n in b["nodes"]:
            _require(n, _NODE_FIELDS, "node")
            pos = n["position"]
            _require(pos, {"x", "y"}, "node.position")
            if not all(isinstance(pos[a], (int, float)) for a in ("x", "y")):
                raise CorruptDocument("node.position: x and y must be numbers")
            nodes.append(Node(
                id=_string(n["id"], "node.id"),
                board_id=_string(n["board_id"], "node.board_id"),
                kind=_kind_from_doc(n["kind"], f"node {n['id']!r}"),
                position=Position(x=float(pos["x"]), y=float(pos["y"])),
            ))
        edges = []
        for e in b["edges"]:
            _require(e, _EDGE_FIELDS, "edge")
            edges.append(Edge(
                id=_string(e["id"], "edge.id"),
                board_id=_string(e["board_id"], "edge.board_id"),
                source=_string(e["source"], "edge.source"),
                target=_string(e["target"], "edge.target"),
            ))
        order = b["event_order"]
        if not isinstance(order, list) or not all(isinstance(i, str) for i in order):
            raise CorruptDocument("board.event_order: expected a list of node ids")
        boards.append(Storyboard(
            id=_string(b["id"], "board.id"),
            act_label=_string(b["act_label"], "board.act_label"),
            nodes=nodes,
            edges=edges,
            event_order=list(order),
            scenery_description=_string(b["scenery_description"],
                                        "board.scenery_description", optional=True),
            scenery_image_ref=_string(b["scenery_image_ref"],
                                      "board.scenery_image_ref", optional=True),
        ))

    chapters: list[Chapter] = []
    for ch in doc["chapters"]:
        _require(ch, _CHAPTER_FIELDS, "chapter")
        if not isinstance(ch["index"], int) or not isinstance(ch["word_target"], int):
            raise CorruptDocument("chapter: index and word_target must be integers")
        chapters.append(Chapter(
            index=ch["index"],
            text=_string(ch["text"], "chapter.text"),
            summary=_string(ch["summary"], "chapter.summary", optional=True),
            word_target=ch["word_target"],
        ))

    return StoryProject(
        id=project_id,
        title=_string(doc["title"], "project.title"),
        genre=_string(doc["genre"], "project.genre"),
        structure=structure,
        characters=characters,
        boards=boards,
        chapters=chapters,
        schema_version=doc["schema_version"],
    )
