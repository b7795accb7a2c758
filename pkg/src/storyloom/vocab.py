"""Configurable genre and default-action vocabularies.

Defaults ship as package data; deployments may point ``load_vocab`` at their
own JSON file with the same shape.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from importlib import resources
from pathlib import Path


@dataclass(frozen=True)
class Vocab:
    genres: tuple[str, ...]
    actions: tuple[str, ...]


def load_vocab(path: str | Path | None = None) -> Vocab:
    """Load a vocabulary file; with no path, the packaged defaults."""
    if path is None:
        raw = resources.files("storyloom.data").joinpath("vocab.json").read_text("utf-8")
    else:
        raw = Path(path).read_text("utf-8")
    doc = json.loads(raw)
    return Vocab(genres=tuple(doc["genres"]), actions=tuple(doc["actions"]))


DEFAULT_VOCAB = load_vocab()
