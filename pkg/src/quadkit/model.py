"""Shared domain types: quads, samples, taxonomies and failure records."""

from __future__ import annotations

import enum
import json
from dataclasses import dataclass
from pathlib import Path
from typing import Optional, Sequence

NULL_TARGET = "NULL"
WRAPPER_KEY = "aspect_based_sentiment_analysis"


class Sentiment(str, enum.Enum):
    POSITIVE = "positive"
    NEGATIVE = "negative"
    NEUTRAL = "neutral"
    MIXED = "mixed"

    @classmethod
    def parse(cls, value: str) -> "Sentiment":
        """Strict lookup; raises ``ValueError`` for anything but the four labels."""
        try:
            return cls(value)
        except ValueError:
            raise ValueError(f"unknown sentiment label {value!r}") from None


# Order used when listing sentiments inside prompts.
PROMPT_SENTIMENT_ORDER = (
    Sentiment.NEGATIVE,
    Sentiment.POSITIVE,
    Sentiment.NEUTRAL,
    Sentiment.MIXED,
)


class Arity(str, enum.Enum):
    QUAD = "quad"
    TRIPLE = "triple"


class FailureMode(str, enum.Enum):
    INVALID_JSON = "InvalidJson"
    INCORRECT_KEYS = "IncorrectKeys"
    INVALID_SENTIMENT = "InvalidSentiment"
    INVALID_ASPECT_CATEGORY = "InvalidAspectCategory"
    NON_EXTRACTIVE_TARGET = "NonExtractiveTarget"
    NON_EXTRACTIVE_OPINION_EXPRESSION = "NonExtractiveOpinionExpression"

    @property
    def column(self) -> str:
        return _COLUMNS[self]


_COLUMNS = {
    FailureMode.INVALID_JSON: "JSON",
    FailureMode.INCORRECT_KEYS: "Keys",
    FailureMode.INVALID_SENTIMENT: "Sent",
    FailureMode.INVALID_ASPECT_CATEGORY: "AspCat",
    FailureMode.NON_EXTRACTIVE_TARGET: "NETarg",
    FailureMode.NON_EXTRACTIVE_OPINION_EXPRESSION: "NEOpExp",
}


@dataclass(frozen=True)
class Quad:
    """One opinion: target, aspect category, sentiment and opinion expression.

    ``sentiment`` is kept as a plain string so that predictions carrying
    labels outside the schema can still be represented; gold data is checked
    with :meth:`check`.
    """

    target: str
    aspect_category: str
    sentiment: str
    opinion_expression: str = ""

    @property
    def is_implicit(self) -> bool:
        return self.target == NULL_TARGET

    def check(self, arity: Arity = Arity.QUAD) -> None:
        """Raise ``ValueError`` unless this is a well-formed annotation."""
        if not self.target:
            raise ValueError("quad target must be non-empty")
        Sentiment.parse(self.sentiment)
        if arity is Arity.QUAD and not self.opinion_expression:
            raise ValueError("opinion_expression must be non-empty in quad mode")

    def is_extractive(self, text: str, arity: Arity = Arity.QUAD) -> bool:
        target_ok = self.is_implicit or (bool(self.target) and self.target in text)
        if arity is Arity.TRIPLE:
            return target_ok
        return target_ok and bool(self.opinion_expression) and self.opinion_expression in text

    def to_dict(self, arity: Arity = Arity.QUAD) -> dict:
        d = {
            "target": self.target,
            "aspect_category": self.aspect_category,
            "sentiment": self.sentiment,
        }
        if arity is Arity.QUAD:
            d["opinion_expression"] = self.opinion_expression
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "Quad":
        return cls(
            target=d["target"],
            aspect_category=d["aspect_category"],
            sentiment=d["sentiment"],
            opinion_expression=d.get("opinion_expression", ""),
        )


def canonical_quad_order(quads: Sequence[Quad], text: str) -> list[Quad]:
    """Sort quads by where their opinion expression first appears in ``text``.

    Ties fall back to the target's first offset, then to input order.
    Quads whose expression cannot be located go last, in input order.
    """

    def key(item):
        pos, quad = item
        start = text.find(quad.opinion_expression) if quad.opinion_expression else -1
        if start < 0:
            return (1, 0, 0, pos)
        tstart = text.find(quad.target) if quad.target else -1
        return (0, start, tstart if tstart >= 0 else len(text) + 1, pos)

    return [q for _, q in sorted(enumerate(quads), key=key)]


@dataclass(frozen=True)
class Sample:
    id: str
    text: str
    language: str
    domain: str
    gold: tuple[Quad, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "gold", tuple(self.gold))


@dataclass(frozen=True)
class DomainTaxonomy:
    """Per-domain prompt variables: system prompt, categories, one-shot example."""

    domain_id: str
    system_prompt: str
    categories: tuple[tuple[str, str], ...]
    one_shot_text: str
    one_shot_quads: tuple[Quad, ...]
    arity: Arity = Arity.QUAD

    def __post_init__(self):
        object.__setattr__(self, "categories", tuple(tuple(c) for c in self.categories))
        object.__setattr__(self, "one_shot_quads", tuple(self.one_shot_quads))
        object.__setattr__(self, "arity", Arity(self.arity))
        labels = self.labels
        if not labels:
            raise ValueError(f"taxonomy {self.domain_id!r} has no categories")
        if len(set(labels)) != len(labels):
            raise ValueError(f"taxonomy {self.domain_id!r} has duplicate category labels")
        for q in self.one_shot_quads:
            q.check(self.arity)
            if not q.is_extractive(self.one_shot_text, self.arity):
                raise ValueError(
                    f"one-shot quad {q} is not extractive from the example text"
                )

    @property
    def labels(self) -> list[str]:
        return [label for label, _ in self.categories]

    @classmethod
    def from_dict(cls, d: dict) -> "DomainTaxonomy":
        one_shot = d["one_shot"]
        return cls(
            domain_id=d["domain_id"],
            system_prompt=d["system_prompt"],
            categories=[(c["label"], c["description"]) for c in d["categories"]],
            one_shot_text=one_shot["text"],
            one_shot_quads=[Quad.from_dict(q) for q in one_shot["quads"]],
            arity=d.get("task_arity", "quad"),
        )

    def to_dict(self) -> dict:
        return {
            "domain_id": self.domain_id,
            "system_prompt": self.system_prompt,
            "categories": [{"label": l, "description": d} for l, d in self.categories],
            "one_shot": {
                "text": self.one_shot_text,
                "quads": [q.to_dict(self.arity) for q in self.one_shot_quads],
            },
            "task_arity": self.arity.value,
        }


def load_taxonomy(path) -> DomainTaxonomy:
    with open(path, encoding="utf-8") as f:
        return DomainTaxonomy.from_dict(json.load(f))


@dataclass(frozen=True)
class FailureRecord:
    """A single detected failure.

    ``quad_index`` is None for response-level records, otherwise the position
    of the offending element in the predicted array.
    """

    mode: FailureMode
    sample_id: str
    quad_index: Optional[int] = None
    detail: str = ""

    @property
    def locus(self):
        return "response" if self.quad_index is None else self.quad_index

    def to_dict(self) -> dict:
        return {
            "mode": self.mode.value,
            "sample_id": self.sample_id,
            "locus": self.locus,
            "detail": self.detail,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "FailureRecord":
        locus = d["locus"]
        return cls(
            mode=FailureMode(d["mode"]),
            sample_id=d["sample_id"],
            quad_index=None if locus == "response" else int(locus),
            detail=d.get("detail", ""),
        )


def package_resource(*parts: str) -> Path:
    return Path(__file__).resolve().parent.joinpath("resources", *parts)
