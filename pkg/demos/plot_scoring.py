"""
Strict and relaxed F1
=====================

Strict matching compares all four fields exactly. Relaxed matching keeps
target, category and sentiment exact but accepts any overlapping opinion
expression. Predictions and gold quads are paired by maximum bipartite
matching, so duplicates are never counted twice.
"""

from quadkit.model import Quad, Sample
from quadkit.scoring import evaluate, score_cell

text = "The app is slow but the price is fine."
gold = (
    Quad("app", "usability", "negative", "The app is slow"),
    Quad("price", "price", "positive", "the price is fine"),
)
sample = Sample("demo", text, "en", "PS", gold)

predictions = [
    Quad("app", "usability", "negative", "app is slow"),   # shorter expression
    Quad("price", "price", "positive", "the price is fine"),
    Quad("price", "price", "positive", "the price is fine"),  # duplicate
]

strict = evaluate([(sample, predictions)], "strict")
relaxed = evaluate([(sample, predictions)], "relaxed")
for r in (strict, relaxed):
    print(f"{r.mode.value:>8}: tp={r.tp} P={r.precision:.3f} R={r.recall:.3f} F1={r.f1:.3f}")
print("table cell:", score_cell(strict.f1, relaxed.f1))
