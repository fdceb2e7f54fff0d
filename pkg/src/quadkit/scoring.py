"""Strict and relaxed micro-averaged P/R/F1 for quad predictions."""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Callable, Iterable, Sequence

from .model import Quad, Sample

OVERLAP_RULE = (
    "first-occurrence character intervals intersect; if either expression is "
    "not found in the text: one contains the other or they share a lowercased token"
)


class MatchMode(str, enum.Enum):
    STRICT = "strict"
    RELAXED = "relaxed"


def _norm(s: str, trim: bool) -> str:
    return s.strip() if trim else s


def quad_equal_strict(pred: Quad, gold: Quad, trim: bool = True) -> bool:
    return (
        _norm(pred.target, trim) == _norm(gold.target, trim)
        and _norm(pred.aspect_category, trim) == _norm(gold.aspect_category, trim)
        and pred.sentiment == gold.sentiment
        and _norm(pred.opinion_expression, trim) == _norm(gold.opinion_expression, trim)
    )


def expressions_overlap(pred_expr: str, gold_expr: str, text: str) -> bool:
    p, g = pred_expr.strip(), gold_expr.strip()
    if p == g:
        return True
    if not p or not g:
        return False
    ps, gs = text.find(p), text.find(g)
    if ps >= 0 and gs >= 0:
        return ps < gs + len(g) and gs < ps + len(p)
    if p in g or g in p:
        return True
    return bool(set(p.lower().split()) & set(g.lower().split()))


def quad_match(pred: Quad, gold: Quad, text: str, mode: MatchMode, trim: bool = True) -> bool:
    if mode is MatchMode.STRICT:
        return quad_equal_strict(pred, gold, trim)
    return (
        _norm(pred.target, trim) == _norm(gold.target, trim)
        and _norm(pred.aspect_category, trim) == _norm(gold.aspect_category, trim)
        and pred.sentiment == gold.sentiment
        and expressions_overlap(pred.opinion_expression, gold.opinion_expression, text)
    )


def max_matching(n_left: int, n_right: int, edge: Callable[[int, int], bool]) -> int:
    """Size of a maximum matching in a bipartite graph (augmenting paths)."""
    adj = [[j for j in range(n_right) if edge(i, j)] for i in range(n_left)]
    owner = [-1] * n_right

    def augment(i, seen):
        for j in adj[i]:
            if j in seen:
                continue
            seen.add(j)
            if owner[j] < 0 or augment(owner[j], seen):
                owner[j] = i
                return True
        return False

    return sum(augment(i, set()) for i in range(n_left))


def match_sample(preds: Sequence[Quad], golds: Sequence[Quad], text: str,
                 mode: MatchMode | str = MatchMode.STRICT, trim: bool = True) -> int:
    mode = MatchMode(mode)
    return max_matching(len(preds), len(golds),
                        lambda i, j: quad_match(preds[i], golds[j], text, mode, trim))


def _prf(tp: int, n_pred: int, n_gold: int) -> tuple[float, float, float]:
    p = tp / n_pred if n_pred else 0.0
    r = tp / n_gold if n_gold else 0.0
    f = 2 * p * r / (p + r) if p + r else 0.0
    return p, r, f


@dataclass
class Counts:
    tp: int = 0
    pred: int = 0
    gold: int = 0

    def add(self, tp: int, pred: int, gold: int) -> None:
        self.tp += tp
        self.pred += pred
        self.gold += gold

    @property
    def f1(self) -> float:
        return _prf(self.tp, self.pred, self.gold)[2]

    def to_dict(self) -> dict:
        return {"tp": self.tp, "pred": self.pred, "gold": self.gold, "f1": self.f1}


@dataclass
class EvalReport:
    mode: MatchMode
    tp: int = 0
    pred_total: int = 0
    gold_total: int = 0
    by_language: dict[str, Counts] = field(default_factory=dict)
    by_domain: dict[str, Counts] = field(default_factory=dict)

    @property
    def precision(self) -> float:
        return _prf(self.tp, self.pred_total, self.gold_total)[0]

    @property
    def recall(self) -> float:
        return _prf(self.tp, self.pred_total, self.gold_total)[1]

    @property
    def f1(self) -> float:
        return _prf(self.tp, self.pred_total, self.gold_total)[2]

    def to_dict(self) -> dict:
        return {
            "mode": self.mode.value,
            "tp": self.tp,
            "pred_total": self.pred_total,
            "gold_total": self.gold_total,
            "precision": self.precision,
            "recall": self.recall,
            "f1": self.f1,
            "by_language": {k: v.to_dict() for k, v in sorted(self.by_language.items())},
            "by_domain": {k: v.to_dict() for k, v in sorted(self.by_domain.items())},
            "metadata": {
                "averaging": "micro",
                "matching": "maximum bipartite",
                "overlap_rule": OVERLAP_RULE,
            },
        }


def evaluate(corpus: Iterable[tuple[Sample, Sequence[Quad]]], mode: MatchMode | str,
             trim: bool = True) -> EvalReport:
    """Micro-averaged scores over (sample, predicted quads) pairs."""
    mode = MatchMode(mode)
    report = EvalReport(mode)
    for sample, preds in corpus:
        tp = match_sample(preds, sample.gold, sample.text, mode, trim)
        n_pred, n_gold = len(preds), len(sample.gold)
        report.tp += tp
        report.pred_total += n_pred
        report.gold_total += n_gold
        report.by_language.setdefault(sample.language, Counts()).add(tp, n_pred, n_gold)
        report.by_domain.setdefault(sample.domain, Counts()).add(tp, n_pred, n_gold)
    return report


def score_cell(strict: float, relaxed: float) -> str:
    """Render a strict/relaxed pair as percentages, e.g. ``30.61/42.46``."""
    return f"{100 * strict:.2f}/{100 * relaxed:.2f}"
