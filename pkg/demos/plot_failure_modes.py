"""
Classifying bad model outputs
=============================

Raw completions go through ``mend`` (lenient JSON repair) and then
``validate``, which assigns each problem to one of six failure modes.
"""

from quadkit.mend import mend
from quadkit.model import FailureMode
from quadkit.validate import ValidationConfig, tally_failures, validate

text = "The price is too high but the app works well."
config = ValidationConfig({"positive", "negative", "neutral", "mixed"}, {"price", "usability"})

outputs = {
    "prose": "I could not find any opinion.",
    "fenced": "```json\n{'aspect_based_sentiment_analysis': [{'target': 'app', 'aspect_category': "
              "'usability', 'sentiment': 'positive', 'opinion_expression': 'the app works well'}]}\n```",
    "truncated": '{"aspect_based_sentiment_analysis": [{"target": "price", "aspect_category": "cost", '
                 '"sentiment": "negative", "opinion_expression": "price too hi',
    "wrong_key": '{"answer": []}',
}

results = []
for name, raw in outputs.items():
    outcome = mend(raw)
    result = validate(outcome, text, config, name)
    results.append(result)
    print(f"{name:>10}: fixes={list(outcome.applied_fixes)}")
    for f in result.failures:
        print(f"{'':>12}{f.mode.column:<8}{f.locus!s:<10}{f.detail}")

###############################################################################
# Tallies use the short column names.

tally = tally_failures(results)
print({m.column: tally[m] for m in FailureMode}, "preds:", tally.total_preds)
