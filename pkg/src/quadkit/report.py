"""Plain-text tables for stats, failure tallies and scores."""

from __future__ import annotations

from typing import Mapping, Sequence

from .dataset import HISTOGRAM_BUCKETS, DatasetStats
from .model import FailureMode
from .scoring import EvalReport, score_cell
from .validate import FailureTally


def format_table(header: Sequence[str], rows: Sequence[Sequence], align_left: int = 1) -> str:
    cells = [[str(c) for c in header]] + [[str(c) for c in r] for r in rows]
    widths = [max(len(row[i]) for row in cells) for i in range(len(header))]

    def fmt(row):
        parts = [
            c.ljust(w) if i < align_left else c.rjust(w)
            for i, (c, w) in enumerate(zip(row, widths))
        ]
        return "  ".join(parts).rstrip()

    rule = "  ".join("-" * w for w in widths)
    return "\n".join([fmt(cells[0]), rule] + [fmt(r) for r in cells[1:]])


def stats_table(name: str, stats: DatasetStats) -> str:
    langs = list(stats.per_language_counts)
    header = ["split"] + langs + ["Implicit", "Explicit", "Avg. # quads"] + list(HISTOGRAM_BUCKETS)
    row = (
        [name]
        + [f"{stats.per_language_counts[l]:,}" for l in langs]
        + [f"{stats.implicit_targets:,}", f"{stats.explicit_targets:,}", f"{stats.avg_quads_per_sample:.2f}"]
        + [f"{stats.quad_histogram[b]:,}" for b in HISTOGRAM_BUCKETS]
    )
    return format_table(header, [row])


def failure_table(rows: Mapping[str, FailureTally]) -> str:
    header = [""] + [m.column for m in FailureMode] + ["Total preds"]
    body = [
        [name] + [f"{t[m]:,}" for m in FailureMode] + [f"{t.total_preds:,}"]
        for name, t in rows.items()
    ]
    return format_table(header, body)


def score_table(rows: Mapping[str, tuple[EvalReport, EvalReport]]) -> str:
    """One strict/relaxed F1 cell per row label (typically per domain)."""
    header = ["", "strict/relaxed F1"]
    body = [[name, score_cell(s.f1, r.f1)] for name, (s, r) in rows.items()]
    return format_table(header, body)


def language_breakdown(per_domain: Mapping[str, tuple[EvalReport, EvalReport]]) -> str:
    """Domains as rows, sample languages as columns, strict/relaxed F1 cells."""
    langs = sorted({l for s, _ in per_domain.values() for l in s.by_language})
    header = ["dataset"] + langs + ["overall"]
    body = []
    for domain, (s, r) in per_domain.items():
        row = [domain]
        for l in langs:
            if l in s.by_language:
                row.append(score_cell(s.by_language[l].f1, r.by_language[l].f1))
            else:
                row.append("-")
        row.append(score_cell(s.f1, r.f1))
        body.append(row)
    return format_table(header, body)
