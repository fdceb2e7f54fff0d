"""Realign non-extractive predictions onto the closest span of the input text.

Candidate spans are all contiguous runs of words, where a word is a run of
letters/digits (apostrophes and hyphens allowed inside) or a run of
punctuation, so "cost?" yields both "cost" and "cost?" as candidates. Each
candidate is scored with normalised Levenshtein similarity against the
prediction and the best one wins; ties go to the shorter span (UTF-8 bytes),
then the earlier one.

Offsets are Python string (code point) indices.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, replace
from typing import Optional

import numpy as np

from .model import FailureMode

_WORD_RE = re.compile(r"\w+(?:['’-]\w+)*|[^\w\s]+")
# rows of start positions processed per numpy block; bounds memory on long texts
_BLOCK = 1024


@dataclass(frozen=True)
class SpanCandidate:
    start: int
    end: int
    text: str


@dataclass(frozen=True)
class AlignConfig:
    max_span_words: int = 30
    min_similarity: float = 0.4

    def __post_init__(self):
        if self.max_span_words < 1:
            raise ValueError("max_span_words must be >= 1")
        if not 0.0 <= self.min_similarity <= 1.0:
            raise ValueError("min_similarity must lie in [0, 1]")


@dataclass(frozen=True)
class AlignOutcome:
    replacement: Optional[SpanCandidate]
    similarity: float
    candidates_scored: int


class EmptyPrediction(ValueError):
    pass


def word_bounds(text: str) -> list[tuple[int, int]]:
    return [m.span() for m in _WORD_RE.finditer(text)]


def enumerate_spans(text: str, config: AlignConfig = AlignConfig()) -> list[SpanCandidate]:
    words = word_bounds(text)
    spans = []
    for i, (start, _) in enumerate(words):
        for j in range(i, min(len(words), i + config.max_span_words)):
            end = words[j][1]
            spans.append(SpanCandidate(start, end, text[start:end]))
    return spans


def levenshtein(a: str, b: str) -> int:
    if len(a) < len(b):
        a, b = b, a
    prev = list(range(len(b) + 1))
    for i, ca in enumerate(a, 1):
        cur = [i]
        for j, cb in enumerate(b, 1):
            cur.append(min(prev[j] + 1, cur[j - 1] + 1, prev[j - 1] + (ca != cb)))
        prev = cur
    return prev[-1]


def similarity(a: str, b: str) -> float:
    """``1 - levenshtein(a, b) / max(len(a), len(b))``; two empty strings score 1."""
    longest = max(len(a), len(b))
    if longest == 0:
        return 1.0
    return 1.0 - levenshtein(a, b) / longest


def _codepoints(s: str) -> np.ndarray:
    return np.frombuffer(s.encode("utf-32-le"), dtype=np.uint32).astype(np.int64)


def _prefix_distances(pred: np.ndarray, windows: np.ndarray) -> np.ndarray:
    """Edit distance between ``pred`` and every prefix of every window row.

    Returns an array D with ``D[r, j] = lev(pred, windows[r, :j])``. Rows are
    filled one prediction character at a time; the in-row insertion chain is
    resolved with a running minimum of ``D[i, k] - k``.
    """
    n_rows, width = windows.shape
    cols = np.arange(width + 1, dtype=np.int64)
    row = np.broadcast_to(cols, (n_rows, width + 1)).copy()
    for i, ch in enumerate(pred, 1):
        cand = np.empty_like(row)
        cand[:, 0] = i
        np.minimum(row[:, :-1] + (windows != ch), row[:, 1:] + 1, out=cand[:, 1:])
        row = np.minimum.accumulate(cand - cols, axis=1) + cols
    return row


def _score_all(prediction: str, text: str, config: AlignConfig):
    """Distances, denominators, byte lengths and offsets for every candidate span."""
    words = word_bounds(text)
    if not words:
        empty = np.zeros(0, dtype=np.int64)
        return empty, empty, empty, empty, empty
    starts = np.array([s for s, _ in words], dtype=np.int64)
    ends = np.array([e for _, e in words], dtype=np.int64)
    n = len(words)
    k = config.max_span_words
    chars = _codepoints(text)
    byte_len = np.concatenate(([0], np.cumsum([len(c.encode("utf-8")) for c in text])))
    pred = _codepoints(prediction)

    out_d, out_start, out_end = [], [], []
    for lo in range(0, n, _BLOCK):
        hi = min(n, lo + _BLOCK)
        blk_starts = starts[lo:hi]
        last_word = np.minimum(np.arange(lo, hi) + k - 1, n - 1)
        width = int((ends[last_word] - blk_starts).max())
        idx = blk_starts[:, None] + np.arange(width)
        # pad with a value no character can take; padded columns are never read
        windows = np.where(idx < len(chars), chars[np.minimum(idx, len(chars) - 1)], -1)
        dist = _prefix_distances(pred, windows)

        offs = np.arange(k)
        word_j = np.arange(lo, hi)[:, None] + offs
        valid = word_j < n
        rows = np.broadcast_to(np.arange(hi - lo)[:, None], word_j.shape)[valid]
        span_start = np.broadcast_to(blk_starts[:, None], word_j.shape)[valid]
        span_end = ends[word_j[valid]]
        out_d.append(dist[rows, span_end - span_start])
        out_start.append(span_start)
        out_end.append(span_end)

    d = np.concatenate(out_d)
    s = np.concatenate(out_start)
    e = np.concatenate(out_end)
    denom = np.maximum(len(prediction), e - s)
    return d, denom, byte_len[e] - byte_len[s], s, e


def align(prediction: str, text: str, config: AlignConfig = AlignConfig()) -> AlignOutcome:
    """Find the span of ``text`` most similar to ``prediction``."""
    if not prediction:
        raise EmptyPrediction("prediction must be non-empty")
    pos = text.find(prediction)
    if pos >= 0:
        return AlignOutcome(SpanCandidate(pos, pos + len(prediction), prediction), 1.0, 0)

    dist, denom, nbytes, starts, ends = _score_all(prediction, text, config)
    if len(dist) == 0:
        return AlignOutcome(None, 0.0, 0)
    sims = 1.0 - dist / denom
    best = np.lexsort((starts, nbytes, -sims))[0]
    sim = float(sims[best])
    if sim < config.min_similarity:
        return AlignOutcome(None, sim, len(dist))
    s, e = int(starts[best]), int(ends[best])
    return AlignOutcome(SpanCandidate(s, e, text[s:e]), sim, len(dist))


_FIELDS = {
    FailureMode.NON_EXTRACTIVE_TARGET: "target",
    FailureMode.NON_EXTRACTIVE_OPINION_EXPRESSION: "opinion_expression",
}
UNREPAIRED = " [unrepaired]"


def repair_result(result, sample_text: str, config: AlignConfig = AlignConfig()):
    """Replace non-extractive fields of a validation result with realigned spans.

    Failure records are kept (they describe the raw output); unrepairable ones
    get an ``[unrepaired]`` marker in their detail. Successful repairs are
    listed in ``result.audit``.
    """
    if not any(f.mode in _FIELDS for f in result.failures):
        return result
    position = {idx: n for n, idx in enumerate(result.indices)}
    quads = list(result.quads)
    failures = []
    audit = list(result.audit)
    for record in result.failures:
        field_name = _FIELDS.get(record.mode)
        n = position.get(record.quad_index) if field_name else None
        if n is None:
            failures.append(record)
            continue
        raw = getattr(quads[n], field_name)
        outcome = align(raw, sample_text, config) if raw else AlignOutcome(None, 0.0, 0)
        if outcome.replacement is None:
            failures.append(replace(record, detail=record.detail + UNREPAIRED))
            continue
        quads[n] = replace(quads[n], **{field_name: outcome.replacement.text})
        failures.append(record)
        audit.append(
            f"quad {record.quad_index}: {field_name} {raw!r} -> {outcome.replacement.text!r}"
            f" (similarity {outcome.similarity:.4f})"
        )
    return replace(result, quads=tuple(quads), failures=tuple(failures), audit=tuple(audit))
