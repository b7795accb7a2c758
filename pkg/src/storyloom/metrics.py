"""Evaluation instruments: lexical diversity, usability and creativity scoring.

All functions are pure. CSV ingestion expects one row per respondent with a
header row; reports come back as plain dicts ready for JSON serialization.
"""

from __future__ import annotations

import csv
import re
import statistics
from dataclasses import dataclass
from typing import IO, Iterable, Mapping, Sequence

from .errors import (
    BadSurveyFile,
    EmptyText,
    EmptyValues,
    OutOfRange,
    WrongLength,
    WrongShape,
)

_TOKEN_SPLIT = re.compile(r"[\W_]+", re.UNICODE)


def tokenize(text: str) -> list[str]:
    """Lowercase and split on maximal runs of non-alphanumeric characters."""
    return [t for t in _TOKEN_SPLIT.split(text.lower()) if t]


def ttr(text: str) -> float:
    """Type-token ratio: distinct tokens divided by total tokens, in (0, 1]."""
    tokens = tokenize(text)
    if not tokens:
        raise EmptyText("cannot compute a type-token ratio of empty text")
    return len(set(tokens)) / len(tokens)


@dataclass(frozen=True)
class SusResponse:
    """One usability questionnaire response: 10 items on a 1..5 scale."""

    items: tuple[int, ...]

    def __post_init__(self):
        if len(self.items) != 10:
            raise WrongLength(f"expected 10 items, got {len(self.items)}")
        for i, value in enumerate(self.items, start=1):
            if not isinstance(value, int) or not 1 <= value <= 5:
                raise OutOfRange(f"item {i} is {value!r}, expected an integer in 1..5")


def sus_score(response: SusResponse | Sequence[int]) -> float:
    """Score a 10-item usability response on the 0..100 scale.

    Odd-numbered items contribute (value - 1), even-numbered items (5 - value);
    the sum of contributions is multiplied by 2.5.
    """
    if not isinstance(response, SusResponse):
        response = SusResponse(items=tuple(response))
    total = 0
    for i, value in enumerate(response.items, start=1):
        total += (value - 1) if i % 2 == 1 else (5 - value)
    return total * 2.5


PAIRED_SUBSCALES = ("enjoyment", "exploration", "expressiveness", "immersion",
                    "results_worth_effort")
SINGLE_SUBSCALES = ("communication", "alignment", "agency", "partnership")
POSITIVE_THRESHOLD = 5.0


@dataclass(frozen=True)
class MicsiResponse:
    """18 items on a 1..7 scale: five question pairs plus four single questions."""

    paired_items: Mapping[str, tuple[int, int]]
    single_items: Mapping[str, int]

    def __post_init__(self):
        if set(self.paired_items) != set(PAIRED_SUBSCALES):
            raise WrongShape(f"paired sub-scales must be exactly {PAIRED_SUBSCALES}")
        if set(self.single_items) != set(SINGLE_SUBSCALES):
            raise WrongShape(f"single sub-scales must be exactly {SINGLE_SUBSCALES}")
        for name, pair in self.paired_items.items():
            if len(pair) != 2:
                raise WrongShape(f"{name} must hold exactly 2 items")
            for value in pair:
                _check_seven_point(name, value)
        for name, value in self.single_items.items():
            _check_seven_point(name, value)


def _check_seven_point(name: str, value) -> None:
    if not isinstance(value, int) or not 1 <= value <= 7:
        raise OutOfRange(f"{name} item is {value!r}, expected an integer in 1..7")


@dataclass(frozen=True)
class SubScaleScore:
    score: float
    positive: bool  # score of 5 or higher reads as a positive experience


def micsi_scores(response: MicsiResponse) -> dict[str, SubScaleScore]:
    """Pair means for the paired sub-scales, raw values for the single ones."""
    scores: dict[str, SubScaleScore] = {}
    for name in PAIRED_SUBSCALES:
        a, b = response.paired_items[name]
        mean = (a + b) / 2
        scores[name] = SubScaleScore(score=mean, positive=mean >= POSITIVE_THRESHOLD)
    for name in SINGLE_SUBSCALES:
        value = float(response.single_items[name])
        scores[name] = SubScaleScore(score=value, positive=value >= POSITIVE_THRESHOLD)
    return scores


@dataclass(frozen=True)
class Aggregate:
    mean: float
    sd: float | None  # sample (n-1) standard deviation; None when n == 1


def aggregate(values: Sequence[float]) -> Aggregate:
    """Mean and sample standard deviation; SD is undefined for a single value."""
    if not values:
        raise EmptyValues("cannot aggregate zero values")
    mean = statistics.fmean(values)
    sd = statistics.stdev(values) if len(values) > 1 else None
    return Aggregate(mean=mean, sd=sd)


# --- CSV ingestion ------------------------------------------------------------

SUS_COLUMNS = tuple(f"q{i}" for i in range(1, 11))
MICSI_COLUMNS = tuple(
    f"{name}_{i}" for name in PAIRED_SUBSCALES for i in (1, 2)
) + SINGLE_SUBSCALES


def _read_rows(source: IO[str], required: Sequence[str]) -> Iterable[dict[str, int]]:
    reader = csv.DictReader(source)
    if reader.fieldnames is None:
        raise BadSurveyFile("missing header row")
    header = [h.strip() for h in reader.fieldnames]
    missing = [c for c in required if c not in header]
    if missing:
        raise BadSurveyFile(f"header lacks columns {missing}")
    for line_no, row in enumerate(reader, start=2):
        parsed = {}
        for column in required:
            cell = (row.get(column) or "").strip()
            try:
                parsed[column] = int(cell)
            except ValueError:
                raise BadSurveyFile(
                    f"line {line_no}: column {column!r} holds {cell!r}, expected an integer")
        yield parsed


def read_sus_csv(source: IO[str]) -> list[SusResponse]:
    """Parse responses from CSV with columns q1..q10."""
    return [SusResponse(items=tuple(row[c] for c in SUS_COLUMNS))
            for row in _read_rows(source, SUS_COLUMNS)]


def read_micsi_csv(source: IO[str]) -> list[MicsiResponse]:
    """Parse responses from CSV with explicit sub-scale column labels."""
    responses = []
    for row in _read_rows(source, MICSI_COLUMNS):
        paired = {name: (row[f"{name}_1"], row[f"{name}_2"]) for name in PAIRED_SUBSCALES}
        single = {name: row[name] for name in SINGLE_SUBSCALES}
        responses.append(MicsiResponse(paired_items=paired, single_items=single))
    return responses


def sus_report(responses: Sequence[SusResponse]) -> dict:
    """Per-respondent scores plus mean/SD across respondents."""
    scores = [sus_score(r) for r in responses]
    agg = aggregate(scores)
    return {"scores": scores, "aggregate": {"mean": agg.mean, "sd": agg.sd}}


def micsi_report(responses: Sequence[MicsiResponse]) -> dict:
    """Per-respondent sub-scale scores plus mean/SD per sub-scale."""
    per_respondent = [
        {name: {"score": s.score, "positive": s.positive}
         for name, s in micsi_scores(r).items()}
        for r in responses
    ]
    summary = {}
    for name in PAIRED_SUBSCALES + SINGLE_SUBSCALES:
        agg = aggregate([r[name]["score"] for r in per_respondent])
        summary[name] = {"mean": agg.mean, "sd": agg.sd}
    return {"respondents": per_respondent, "aggregate": summary}
