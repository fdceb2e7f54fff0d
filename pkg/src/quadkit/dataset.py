"""Line-delimited JSON datasets and descriptive statistics."""

from __future__ import annotations

import json
from collections import Counter
from dataclasses import dataclass, field
from typing import Iterable

from .model import Arity, Quad, Sample, Sentiment, canonical_quad_order

HISTOGRAM_BUCKETS = ("0", "1", "2", "3", "4", "5+")


class DatasetError(Exception):
    """Base class for data errors raised while loading files."""


class MalformedLine(DatasetError):
    def __init__(self, line_no: int, reason: str, path=None):
        self.line_no = line_no
        self.reason = reason
        self.path = path
        where = f"{path}:{line_no}" if path else f"line {line_no}"
        super().__init__(f"{where}: {reason}")


class DuplicateId(DatasetError):
    def __init__(self, sample_id: str, path=None):
        self.sample_id = sample_id
        super().__init__(f"duplicate sample id {sample_id!r}" + (f" in {path}" if path else ""))


class UnknownSentiment(DatasetError):
    def __init__(self, value, line_no=None):
        self.value = value
        suffix = f" (line {line_no})" if line_no is not None else ""
        super().__init__(f"unknown sentiment {value!r}{suffix}")


_SENTIMENT_ALIASES = {
    "pos": "positive",
    "neg": "negative",
    "neu": "neutral",
    "mix": "mixed",
}


def normalize_sentiment(value: str) -> str:
    """Map raw annotation labels such as ``POS`` or ``Negative`` to the canonical set."""
    v = value.strip().casefold()
    return _SENTIMENT_ALIASES.get(v, v)


@dataclass(frozen=True)
class DatasetSplit:
    name: str
    samples: tuple[Sample, ...]

    def __post_init__(self):
        object.__setattr__(self, "samples", tuple(self.samples))
        seen = set()
        for s in self.samples:
            if s.id in seen:
                raise DuplicateId(s.id)
            seen.add(s.id)

    def __len__(self):
        return len(self.samples)

    def __iter__(self):
        return iter(self.samples)

    @property
    def domains(self) -> list[str]:
        return sorted({s.domain for s in self.samples})


def _parse_quad(raw, arity: Arity, normalize: bool, line_no: int) -> Quad:
    if not isinstance(raw, dict):
        raise MalformedLine(line_no, "quad is not an object")
    try:
        target = raw["target"]
        category = raw["aspect_category"]
        sentiment = raw["sentiment"]
    except KeyError as e:
        raise MalformedLine(line_no, f"quad missing key {e.args[0]!r}") from None
    if arity is Arity.QUAD and "opinion_expression" not in raw:
        raise MalformedLine(line_no, "quad missing key 'opinion_expression'")
    expression = raw.get("opinion_expression", "")
    if not all(isinstance(v, str) for v in (target, category, sentiment, expression)):
        raise MalformedLine(line_no, "quad fields must be strings")
    if normalize:
        sentiment = normalize_sentiment(sentiment)
    try:
        Sentiment.parse(sentiment)
    except ValueError:
        raise UnknownSentiment(sentiment, line_no) from None
    quad = Quad(target, category, sentiment, expression)
    try:
        quad.check(arity)
    except ValueError as e:
        raise MalformedLine(line_no, str(e)) from None
    return quad


def parse_sample(line: str, arity: Arity = Arity.QUAD, normalize: bool = False, line_no: int = 1) -> Sample:
    try:
        obj = json.loads(line)
    except json.JSONDecodeError as e:
        raise MalformedLine(line_no, f"invalid JSON ({e.msg})") from None
    if not isinstance(obj, dict):
        raise MalformedLine(line_no, "expected a JSON object")
    try:
        sid, text, lang, domain = obj["id"], obj["text"], obj["language"], obj["domain"]
    except KeyError as e:
        raise MalformedLine(line_no, f"missing field {e.args[0]!r}") from None
    if not all(isinstance(v, str) for v in (sid, text, lang, domain)):
        raise MalformedLine(line_no, "id, text, language and domain must be strings")
    raw_quads = obj.get("quads", [])
    if not isinstance(raw_quads, list):
        raise MalformedLine(line_no, "'quads' must be a list")
    quads = [_parse_quad(q, arity, normalize, line_no) for q in raw_quads]
    return Sample(sid, text, lang, domain, tuple(canonical_quad_order(quads, text)))


def read_samples(lines: Iterable[str], arity=Arity.QUAD, normalize=False, path=None) -> list[Sample]:
    samples = []
    seen = set()
    for line_no, line in enumerate(lines, start=1):
        if not line.strip():
            continue
        try:
            sample = parse_sample(line, arity, normalize, line_no)
        except MalformedLine as e:
            if path is None:
                raise
            raise MalformedLine(e.line_no, e.reason, path) from None
        if sample.id in seen:
            raise DuplicateId(sample.id, path)
        seen.add(sample.id)
        samples.append(sample)
    return samples


def load_dataset(path, arity: Arity | str = Arity.QUAD, normalize_sentiment: bool = False,
                 name: str = "test") -> DatasetSplit:
    """Load a JSONL dataset file.

    Each line holds ``{id, text, language, domain, quads}``. Gold quads are
    re-sorted into canonical order. With ``normalize_sentiment`` set, labels
    such as ``POS`` or ``Negative`` are mapped onto the four canonical ones
    before validation.
    """
    arity = Arity(arity)
    with open(path, encoding="utf-8") as f:
        samples = read_samples(f, arity, normalize_sentiment, path)
    return DatasetSplit(name, samples)


def sample_to_dict(sample: Sample, arity: Arity = Arity.QUAD) -> dict:
    return {
        "id": sample.id,
        "text": sample.text,
        "language": sample.language,
        "domain": sample.domain,
        "quads": [q.to_dict(arity) for q in sample.gold],
    }


def write_dataset(split: DatasetSplit, path, arity: Arity | str = Arity.QUAD) -> None:
    arity = Arity(arity)
    with open(path, "w", encoding="utf-8") as f:
        for sample in split.samples:
            f.write(json.dumps(sample_to_dict(sample, arity), ensure_ascii=False) + "\n")


@dataclass
class DatasetStats:
    per_language_counts: dict[str, int] = field(default_factory=dict)
    implicit_targets: int = 0
    explicit_targets: int = 0
    n_samples: int = 0
    quad_histogram: dict[str, int] = field(
        default_factory=lambda: {b: 0 for b in HISTOGRAM_BUCKETS}
    )

    @property
    def total_quads(self) -> int:
        return self.implicit_targets + self.explicit_targets

    @property
    def avg_quads_per_sample(self) -> float:
        return self.total_quads / self.n_samples if self.n_samples else 0.0

    def __add__(self, other: "DatasetStats") -> "DatasetStats":
        langs = Counter(self.per_language_counts)
        langs.update(other.per_language_counts)
        return DatasetStats(
            per_language_counts=dict(sorted(langs.items())),
            implicit_targets=self.implicit_targets + other.implicit_targets,
            explicit_targets=self.explicit_targets + other.explicit_targets,
            n_samples=self.n_samples + other.n_samples,
            quad_histogram={
                b: self.quad_histogram[b] + other.quad_histogram[b] for b in HISTOGRAM_BUCKETS
            },
        )

    def to_dict(self) -> dict:
        return {
            "per_language_counts": dict(self.per_language_counts),
            "implicit_targets": self.implicit_targets,
            "explicit_targets": self.explicit_targets,
            "n_samples": self.n_samples,
            "avg_quads_per_sample": self.avg_quads_per_sample,
            "quad_histogram": dict(self.quad_histogram),
        }


def _bucket(n: int) -> str:
    return "5+" if n >= 5 else str(n)


def compute_stats(split: DatasetSplit | Iterable[Sample]) -> DatasetStats:
    samples = split.samples if isinstance(split, DatasetSplit) else list(split)
    langs = Counter(s.language for s in samples)
    hist = Counter(_bucket(len(s.gold)) for s in samples)
    implicit = sum(q.is_implicit for s in samples for q in s.gold)
    total = sum(len(s.gold) for s in samples)
    return DatasetStats(
        per_language_counts=dict(sorted(langs.items())),
        implicit_targets=implicit,
        explicit_targets=total - implicit,
        n_samples=len(samples),
        quad_histogram={b: hist.get(b, 0) for b in HISTOGRAM_BUCKETS},
    )


def filter_unlocatable(split: DatasetSplit) -> tuple[DatasetSplit, list[str]]:
    """Drop samples with an explicit gold target that is not a substring of the text."""
    kept, dropped = [], []
    for s in split.samples:
        if all(q.is_implicit or q.target in s.text for q in s.gold):
            kept.append(s)
        else:
            dropped.append(s.id)
    return DatasetSplit(split.name, kept), dropped
