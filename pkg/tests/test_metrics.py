"""Survey scoring and lexical diversity."""

import io
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from storyloom.errors import (
    BadSurveyFile,
    EmptyText,
    EmptyValues,
    OutOfRange,
    WrongLength,
    WrongShape,
)
from storyloom.metrics import (
    Aggregate,
    MicsiResponse,
    PAIRED_SUBSCALES,
    SINGLE_SUBSCALES,
    SusResponse,
    aggregate,
    micsi_report,
    micsi_scores,
    read_micsi_csv,
    read_sus_csv,
    sus_report,
    sus_score,
    tokenize,
    ttr,
)

# --- tokenize / ttr -------------------------------------------------------------


def test_tokenize_rule_application():
    assert tokenize("The cat sat.") == ["the", "cat", "sat"]
    assert tokenize("") == []
    assert tokenize("the The THE cat") == ["the", "the", "the", "cat"]


def test_tokenize_splits_on_nonalnum_runs():
    assert tokenize("don't--stop;now_please 42x") == ["don", "t", "stop", "now",
                                                      "please", "42x"]


def test_ttr_hand_counts():
    assert ttr("a a a a") == 0.25
    assert ttr("each word here differs") == 1.0
    assert ttr("the The THE cat") == 0.5


def test_ttr_empty_text_rejected():
    with pytest.raises(EmptyText):
        ttr("")
    with pytest.raises(EmptyText):
        ttr("!!! --- ...")


@settings(max_examples=100, deadline=None)
@given(st.lists(st.text(alphabet="abcdef", min_size=1, max_size=5), min_size=1,
                max_size=30))
def test_ttr_doubling_never_increases(words):
    text = " ".join(words)
    assert ttr(text + " " + text) <= ttr(text)


@settings(max_examples=50, deadline=None)
@given(st.lists(st.sampled_from(["wolf", "Moon", "RIVER", "stone"]), min_size=1,
                max_size=20))
def test_ttr_case_invariant(words):
    text = " ".join(words)
    assert ttr(text.upper()) == ttr(text.lower()) == ttr(text)


# --- SUS -------------------------------------------------------------------------


def sus_oracle(items):
    """Independent table-lookup oracle for the 0..100 usability score."""
    odd_contrib = {1: 0, 2: 1, 3: 2, 4: 3, 5: 4}
    even_contrib = {1: 4, 2: 3, 3: 2, 4: 1, 5: 0}
    total = 0
    for i, value in enumerate(items, start=1):
        total += odd_contrib[value] if i % 2 == 1 else even_contrib[value]
    return total * 2.5


def test_sus_neutral_max_min():
    assert sus_score([3] * 10) == 50.0
    assert sus_score([5, 1] * 5) == 100.0
    assert sus_score([1, 5] * 5) == 0.0


def test_sus_rejects_bad_shapes():
    with pytest.raises(WrongLength):
        sus_score([3] * 9)
    with pytest.raises(OutOfRange):
        sus_score([3] * 9 + [6])
    with pytest.raises(OutOfRange):
        sus_score([0] + [3] * 9)


def test_sus_randomized_against_oracle():
    rng = random.Random(20240817)
    for _ in range(20):
        items = [rng.randint(1, 5) for _ in range(10)]
        assert sus_score(items) == sus_oracle(items)


@settings(max_examples=60, deadline=None)
@given(items=st.lists(st.integers(1, 5), min_size=10, max_size=10),
       position=st.integers(0, 9))
def test_sus_monotonicity(items, position):
    value = items[position]
    if value == 5:
        return
    bumped = list(items)
    bumped[position] = value + 1
    if position % 2 == 0:  # 1-based odd item
        assert sus_score(bumped) >= sus_score(items)
    else:
        assert sus_score(bumped) <= sus_score(items)


# --- MICSI -----------------------------------------------------------------------


def make_micsi(pair=(6, 7), single=4):
    return MicsiResponse(
        paired_items={name: pair for name in PAIRED_SUBSCALES},
        single_items={name: single for name in SINGLE_SUBSCALES},
    )


def test_micsi_pair_mean_and_positivity():
    scores = micsi_scores(make_micsi(pair=(6, 7), single=4))
    assert scores["enjoyment"].score == 6.5
    assert scores["enjoyment"].positive
    assert scores["agency"].score == 4.0
    assert not scores["agency"].positive


def test_micsi_all_sevens():
    scores = micsi_scores(make_micsi(pair=(7, 7), single=7))
    assert all(s.score == 7.0 and s.positive for s in scores.values())


def test_micsi_threshold_boundary():
    scores = micsi_scores(make_micsi(pair=(4, 6), single=5))
    assert scores["exploration"].score == 5.0 and scores["exploration"].positive
    below = micsi_scores(make_micsi(pair=(4, 5), single=4))
    assert below["exploration"].score == 4.5 and not below["exploration"].positive


def test_micsi_pair_means_within_bounds_exhaustive():
    for a in range(1, 8):
        for b in range(1, 8):
            scores = micsi_scores(make_micsi(pair=(a, b), single=4))
            for name in PAIRED_SUBSCALES:
                assert min(a, b) <= scores[name].score <= max(a, b)


def test_micsi_rejects_bad_shapes():
    with pytest.raises(WrongShape):
        MicsiResponse(paired_items={"enjoyment": (5, 5)}, single_items={})
    with pytest.raises(OutOfRange):
        make_micsi(pair=(0, 7))
    with pytest.raises(OutOfRange):
        make_micsi(single=8)


# --- aggregation ------------------------------------------------------------------


def test_aggregate_hand_computation():
    assert aggregate([1, 2, 3]) == Aggregate(mean=2.0, sd=1.0)


def test_aggregate_singleton_sd_undefined():
    assert aggregate([0.47]) == Aggregate(mean=0.47, sd=None)


def test_aggregate_empty_rejected():
    with pytest.raises(EmptyValues):
        aggregate([])


@settings(max_examples=50, deadline=None)
@given(st.floats(min_value=-1e6, max_value=1e6, allow_nan=False))
def test_aggregate_singleton_mean_identity(x):
    assert aggregate([x]).mean == x


# --- CSV ingestion ------------------------------------------------------------------


SUS_CSV = "q1,q2,q3,q4,q5,q6,q7,q8,q9,q10\n" "3,3,3,3,3,3,3,3,3,3\n" "5,1,5,1,5,1,5,1,5,1\n"


def test_read_sus_csv_and_report():
    responses = read_sus_csv(io.StringIO(SUS_CSV))
    report = sus_report(responses)
    assert report["scores"] == [50.0, 100.0]
    assert report["aggregate"]["mean"] == 75.0
    assert report["aggregate"]["sd"] == pytest.approx(35.3553, abs=1e-4)


def test_read_sus_csv_requires_header():
    with pytest.raises(BadSurveyFile):
        read_sus_csv(io.StringIO("3,3,3,3,3,3,3,3,3,3\n1,1,1,1,1,1,1,1,1,1\n"))


def test_read_sus_csv_rejects_noninteger_cells():
    bad = SUS_CSV.replace("5,1,5", "5,x,5")
    with pytest.raises(BadSurveyFile):
        read_sus_csv(io.StringIO(bad))


def micsi_csv_row(pair, single):
    cells = []
    header = []
    for name in PAIRED_SUBSCALES:
        header += [f"{name}_1", f"{name}_2"]
        cells += [str(pair[0]), str(pair[1])]
    header += list(SINGLE_SUBSCALES)
    cells += [str(single)] * len(SINGLE_SUBSCALES)
    return ",".join(header), ",".join(cells)


def test_read_micsi_csv_and_report():
    header, row = micsi_csv_row((6, 7), 5)
    responses = read_micsi_csv(io.StringIO(f"{header}\n{row}\n{row}\n"))
    assert len(responses) == 2
    report = micsi_report(responses)
    assert report["aggregate"]["enjoyment"]["mean"] == 6.5
    assert report["respondents"][0]["communication"] == {"score": 5.0, "positive": True}


def test_read_micsi_csv_missing_column():
    header, row = micsi_csv_row((6, 7), 5)
    header = header.replace("agency,", "")
    row = ",".join(row.split(",")[:-1])
    with pytest.raises(BadSurveyFile):
        read_micsi_csv(io.StringIO(f"{header}\n{row}\n"))
