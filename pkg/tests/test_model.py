from collections import Counter

import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import APP_QUAD, TV_APP_TEXT, TV_QUAD
from quadkit.model import (
    DomainTaxonomy,
    FailureMode,
    FailureRecord,
    Quad,
    Sentiment,
    canonical_quad_order,
)


def test_sentiment_labels():
    assert [s.value for s in Sentiment] == ["positive", "negative", "neutral", "mixed"]
    with pytest.raises(ValueError):
        Sentiment.parse("angry")
    with pytest.raises(ValueError):
        Sentiment.parse("Positive")


def test_failure_modes_in_table_order():
    assert [m.value for m in FailureMode] == [
        "InvalidJson",
        "IncorrectKeys",
        "InvalidSentiment",
        "InvalidAspectCategory",
        "NonExtractiveTarget",
        "NonExtractiveOpinionExpression",
    ]
    assert [m.column for m in FailureMode] == ["JSON", "Keys", "Sent", "AspCat", "NETarg", "NEOpExp"]


def test_failure_record_locus_roundtrip():
    response = FailureRecord(FailureMode.INVALID_JSON, "s1")
    quad = FailureRecord(FailureMode.NON_EXTRACTIVE_TARGET, "s1", 2, "costs")
    assert response.locus == "response"
    assert quad.locus == 2
    for r in (response, quad):
        assert FailureRecord.from_dict(r.to_dict()) == r


def test_null_target_is_case_sensitive():
    text = "pretty good"
    assert Quad("NULL", "general", "positive", "pretty good").is_extractive(text)
    assert not Quad("null", "general", "positive", "pretty good").is_extractive(text)
    assert not Quad("Null", "general", "positive", "pretty good").is_implicit


def test_quad_check():
    Quad("TV", "x", "positive", "TV ok").check()
    Quad("TV", "x", "positive", "").check("triple")
    with pytest.raises(ValueError):
        Quad("", "x", "positive", "e").check()
    with pytest.raises(ValueError):
        Quad("TV", "x", "positive", "").check()
    with pytest.raises(ValueError):
        Quad("TV", "x", "POS", "e").check()


def test_canonical_order_by_offset():
    text = "aaaaa first thing here and then some padding text, second thing"
    late = Quad("x", "c", "positive", "second thing")
    early = Quad("y", "c", "positive", "first thing")
    assert text.find("second thing") > text.find("first thing")
    assert canonical_quad_order([late, early], text) == [early, late]


def test_canonical_order_single():
    assert canonical_quad_order([TV_QUAD], TV_APP_TEXT) == [TV_QUAD]


def test_canonical_order_tv_app_example():
    assert canonical_quad_order([APP_QUAD, TV_QUAD], TV_APP_TEXT) == [TV_QUAD, APP_QUAD]


def test_canonical_order_ties_and_unlocatable():
    text = "the screen is great"
    a = Quad("screen", "c", "positive", "the screen is great")
    b = Quad("NULL", "c", "positive", "the screen is great")
    lost = Quad("x", "c", "negative", "not in text")
    # same expression: target offset breaks the tie, NULL (not found) goes after
    assert canonical_quad_order([lost, b, a], text) == [a, b, lost]


def test_taxonomy_rejects_duplicate_labels():
    with pytest.raises(ValueError):
        DomainTaxonomy("D", "s", [("a", "x"), ("a", "y")], "t", [])


def test_taxonomy_rejects_non_extractive_one_shot():
    with pytest.raises(ValueError):
        DomainTaxonomy("D", "s", [("a", "x")], "good phone", [Quad("telephone", "a", "positive", "good phone")])


def test_taxonomy_dict_roundtrip(ps_taxonomy):
    assert len(ps_taxonomy.labels) == 14
    assert DomainTaxonomy.from_dict(ps_taxonomy.to_dict()) == ps_taxonomy


words = st.sampled_from(["good", "bad", "app", "price", "screen", "slow", "NULL", "it"])
texts = st.lists(words, min_size=1, max_size=12).map(" ".join)


@st.composite
def quads_and_text(draw):
    text = draw(texts)
    tokens = text.split()
    quads = []
    for _ in range(draw(st.integers(0, 6))):
        i = draw(st.integers(0, len(tokens) - 1))
        j = draw(st.integers(i, len(tokens) - 1))
        expr = " ".join(tokens[i : j + 1]) if draw(st.booleans()) else "missing words"
        quads.append(Quad(draw(words), "c", draw(st.sampled_from(list(Sentiment))).value, expr))
    return quads, text


@given(quads_and_text())
def test_canonical_order_idempotent_permutation(data):
    quads, text = data
    once = canonical_quad_order(quads, text)
    assert canonical_quad_order(once, text) == once
    assert Counter(once) == Counter(quads)
    located = [q for q in once if text.find(q.opinion_expression) >= 0]
    offsets = [text.find(q.opinion_expression) for q in located]
    assert offsets == sorted(offsets)
    assert once[: len(located)] == located
