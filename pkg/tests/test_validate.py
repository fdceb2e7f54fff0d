import json

import pytest

from conftest import DATA
from quadkit.mend import mend
from quadkit.model import FailureMode, Quad
from quadkit.validate import FailureTally, ValidationConfig, tally_failures, validate

LADDER = json.loads((DATA / "failure_ladder.json").read_text(encoding="utf-8"))
SENTIMENTS = {"positive", "negative", "neutral", "mixed"}


@pytest.fixture
def config():
    return ValidationConfig(SENTIMENTS, frozenset(LADDER["categories"]))


def run(raw, config, text=LADDER["text"], sid="s"):
    return validate(mend(raw), text, config, sid)


def wrap(*quads):
    return json.dumps({"aspect_based_sentiment_analysis": list(quads)})


@pytest.mark.parametrize("case", LADDER["cases"], ids=[c["id"] for c in LADDER["cases"]])
def test_ladder_case(case, config):
    result = run(case["raw"], config, sid=case["id"])
    got = [[f.mode.value, f.locus] for f in result.failures]
    assert got == case["expected"]
    assert result.pred_count == case["pred_count"]


def test_ladder_has_three_cases_per_mode():
    for mode in FailureMode:
        n = sum(any(e[0] == mode.value for e in c["expected"]) for c in LADDER["cases"])
        assert n >= 3, mode


def test_ladder_tally_matches_manifest(config):
    tally = tally_failures(run(c["raw"], config, sid=c["id"]) for c in LADDER["cases"])
    assert tally.to_dict() == LADDER["totals"]


def test_valid_quad_passes(config):
    q = {"target": "app", "aspect_category": "usability", "sentiment": "positive",
         "opinion_expression": "the app works well"}
    result = run(wrap(q), config)
    assert result.failures == ()
    assert result.quads == (Quad("app", "usability", "positive", "the app works well"),)


def test_sentiment_case_is_normalized(config):
    q = {"target": "NULL", "aspect_category": "price", "sentiment": "NEGATIVE",
         "opinion_expression": "The price is too high"}
    result = run(wrap(q), config)
    assert result.failures == ()
    assert result.quads[0].sentiment == "negative"


def test_strict_sentiment_case(config):
    strict = ValidationConfig(SENTIMENTS, config.allowed_categories, sentiment_case_insensitive=False)
    q = {"target": "NULL", "aspect_category": "price", "sentiment": "Negative",
         "opinion_expression": "The price is too high"}
    assert [f.mode for f in run(wrap(q), strict).failures] == [FailureMode.INVALID_SENTIMENT]


def test_category_case_option(config):
    loose = ValidationConfig(SENTIMENTS, config.allowed_categories, category_case_insensitive=True)
    q = {"target": "NULL", "aspect_category": "PRICE", "sentiment": "negative",
         "opinion_expression": "The price is too high"}
    result = run(wrap(q), loose)
    assert result.failures == ()
    assert result.quads[0].aspect_category == "price"


def test_empty_answer_has_no_failures(config):
    result = run(wrap(), config)
    assert result.failures == () and result.pred_count == 0


def test_triple_mode_ignores_expression():
    config = ValidationConfig(SENTIMENTS, {"price"}, arity="triple")
    result = run(wrap({"target": "price", "aspect_category": "price", "sentiment": "negative"}), config)
    assert result.failures == ()
    assert result.quads[0].opinion_expression == ""


def test_non_string_value_is_a_key_failure(config):
    q = {"target": "app", "aspect_category": "usability", "sentiment": 1, "opinion_expression": "the app"}
    result = run(wrap(q), config)
    assert [(f.mode, f.locus) for f in result.failures] == [(FailureMode.INCORRECT_KEYS, 0)]
    assert result.pred_count == 0


def test_indices_point_into_original_array(config):
    good = {"target": "app", "aspect_category": "usability", "sentiment": "positive",
            "opinion_expression": "the app works well"}
    bad = dict(good, target="application")
    result = run(wrap({"x": 1}, good, bad), config)
    assert result.indices == (1, 2)
    assert [f.locus for f in result.failures] == [0, 2]


def test_tally_addition():
    a = FailureTally()
    a.counts[FailureMode.INVALID_JSON] = 2
    a.total_preds = 3
    b = FailureTally()
    b.counts[FailureMode.INVALID_JSON] = 1
    b.keys_quad = 1
    b.counts[FailureMode.INCORRECT_KEYS] = 1
    s = a + b
    assert s[FailureMode.INVALID_JSON] == 3
    assert s.total_preds == 3
    assert s.to_dict()["IncorrectKeys_by_locus"] == {"response": 0, "quad": 1}
