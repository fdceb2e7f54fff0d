"""Failure-mode detection over mended model outputs."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Iterable, Optional

from .mend import MendOutcome
from .model import (
    NULL_TARGET,
    WRAPPER_KEY,
    Arity,
    DomainTaxonomy,
    FailureMode,
    FailureRecord,
    Quad,
    Sentiment,
)

_DETAIL_LIMIT = 200


def _fragment(value) -> str:
    text = value if isinstance(value, str) else json.dumps(value, ensure_ascii=False)
    return text if len(text) <= _DETAIL_LIMIT else text[: _DETAIL_LIMIT - 3] + "..."


@dataclass(frozen=True)
class ValidationConfig:
    allowed_sentiments: frozenset[str]
    allowed_categories: frozenset[str]
    arity: Arity = Arity.QUAD
    sentiment_case_insensitive: bool = True
    category_case_insensitive: bool = False

    def __post_init__(self):
        object.__setattr__(self, "allowed_sentiments", frozenset(str(s.value if isinstance(s, Sentiment) else s) for s in self.allowed_sentiments))
        object.__setattr__(self, "allowed_categories", frozenset(self.allowed_categories))
        object.__setattr__(self, "arity", Arity(self.arity))
        if not self.allowed_sentiments or not self.allowed_categories:
            raise ValueError("allowed sentiment and category sets must be non-empty")

    @classmethod
    def from_taxonomy(cls, taxonomy: DomainTaxonomy, **kwargs) -> "ValidationConfig":
        kwargs.setdefault("arity", taxonomy.arity)
        return cls(frozenset(s.value for s in Sentiment), frozenset(taxonomy.labels), **kwargs)

    @property
    def required_keys(self) -> tuple[str, ...]:
        keys = ("target", "aspect_category", "sentiment")
        return keys + ("opinion_expression",) if self.arity is Arity.QUAD else keys

    def canonical_sentiment(self, label: str) -> Optional[str]:
        return _lookup(label, self.allowed_sentiments, self.sentiment_case_insensitive)

    def canonical_category(self, label: str) -> Optional[str]:
        return _lookup(label, self.allowed_categories, self.category_case_insensitive)


def _lookup(label: str, allowed: frozenset[str], case_insensitive: bool) -> Optional[str]:
    if label in allowed:
        return label
    if case_insensitive:
        folded = label.casefold()
        for candidate in sorted(allowed):
            if candidate.casefold() == folded:
                return candidate
    return None


@dataclass(frozen=True)
class ValidationResult:
    """Quads that survived the key checks, plus every failure found.

    ``indices`` gives, for each surviving quad, its position in the predicted
    array, which is what quad-level failure records point at.
    """

    sample_id: str
    quads: tuple[Quad, ...] = ()
    failures: tuple[FailureRecord, ...] = ()
    pred_count: int = 0
    indices: tuple[int, ...] = ()
    audit: tuple[str, ...] = ()

    def failures_for(self, index: int) -> list[FailureRecord]:
        return [f for f in self.failures if f.quad_index == index]


def _is_extractive(value: str, text: str) -> bool:
    return bool(value) and value in text


def validate(outcome: MendOutcome, sample_text: str, config: ValidationConfig,
             sample_id: str = "") -> ValidationResult:
    """Run the failure ladder over one response.

    JSON and wrapper-level problems stop the ladder with a single
    response-level record. Elements with missing keys are dropped; every
    other failure is recorded but the quad is kept, so ``pred_count`` counts
    all elements that made it past the key checks.
    """
    if not outcome.ok:
        return ValidationResult(
            sample_id, failures=(FailureRecord(FailureMode.INVALID_JSON, sample_id, None, "unparsable output"),)
        )
    root = outcome.value
    if not isinstance(root, dict) or not isinstance(root.get(WRAPPER_KEY), list):
        if not isinstance(root, dict):
            detail = f"response: root is {type(root).__name__}"
        elif WRAPPER_KEY not in root:
            detail = f"response: missing {WRAPPER_KEY!r}; keys {sorted(root)}"
        else:
            detail = f"response: {WRAPPER_KEY!r} is not an array"
        return ValidationResult(
            sample_id, failures=(FailureRecord(FailureMode.INCORRECT_KEYS, sample_id, None, detail),)
        )

    failures = []
    quads = []
    indices = []
    for idx, element in enumerate(root[WRAPPER_KEY]):
        if not isinstance(element, dict):
            failures.append(FailureRecord(FailureMode.INCORRECT_KEYS, sample_id, idx,
                                          "quad: element is not an object: " + _fragment(element)))
            continue
        missing = [k for k in config.required_keys if k not in element]
        if missing:
            failures.append(FailureRecord(FailureMode.INCORRECT_KEYS, sample_id, idx,
                                          f"quad: missing {missing}: " + _fragment(element)))
            continue
        wrong_type = [k for k in config.required_keys if not isinstance(element[k], str)]
        if wrong_type:
            failures.append(FailureRecord(FailureMode.INCORRECT_KEYS, sample_id, idx,
                                          f"quad: non-string {wrong_type}: " + _fragment(element)))
            continue

        target = element["target"]
        sentiment = element["sentiment"]
        category = element["aspect_category"]
        expression = element.get("opinion_expression", "") if config.arity is Arity.QUAD else ""

        canonical = config.canonical_sentiment(sentiment)
        if canonical is None:
            failures.append(FailureRecord(FailureMode.INVALID_SENTIMENT, sample_id, idx, sentiment))
        else:
            sentiment = canonical
        canonical = config.canonical_category(category)
        if canonical is None:
            failures.append(FailureRecord(FailureMode.INVALID_ASPECT_CATEGORY, sample_id, idx, category))
        else:
            category = canonical
        if target != NULL_TARGET and not _is_extractive(target, sample_text):
            failures.append(FailureRecord(FailureMode.NON_EXTRACTIVE_TARGET, sample_id, idx, target))
        if config.arity is Arity.QUAD and not _is_extractive(expression, sample_text):
            failures.append(FailureRecord(FailureMode.NON_EXTRACTIVE_OPINION_EXPRESSION, sample_id, idx, expression))

        quads.append(Quad(target, category, sentiment, expression))
        indices.append(idx)

    return ValidationResult(sample_id, tuple(quads), tuple(failures), len(quads), tuple(indices))


@dataclass
class FailureTally:
    counts: dict[FailureMode, int] = field(default_factory=lambda: {m: 0 for m in FailureMode})
    total_preds: int = 0
    keys_response: int = 0
    keys_quad: int = 0

    def __getitem__(self, mode: FailureMode) -> int:
        return self.counts[mode]

    def __add__(self, other: "FailureTally") -> "FailureTally":
        return FailureTally(
            {m: self.counts[m] + other.counts[m] for m in FailureMode},
            self.total_preds + other.total_preds,
            self.keys_response + other.keys_response,
            self.keys_quad + other.keys_quad,
        )

    def to_dict(self) -> dict:
        d = {m.value: self.counts[m] for m in FailureMode}
        d["total_preds"] = self.total_preds
        d["IncorrectKeys_by_locus"] = {"response": self.keys_response, "quad": self.keys_quad}
        return d


def tally_failures(results: Iterable[ValidationResult]) -> FailureTally:
    tally = FailureTally()
    for result in results:
        tally.total_preds += result.pred_count
        for record in result.failures:
            tally.counts[record.mode] += 1
            if record.mode is FailureMode.INCORRECT_KEYS:
                if record.quad_index is None:
                    tally.keys_response += 1
                else:
                    tally.keys_quad += 1
    return tally
