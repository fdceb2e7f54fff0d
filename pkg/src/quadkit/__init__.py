"""Toolkit for LLM-based aspect-sentiment quad extraction.

Builds instruction prompts, queries OpenAI-compatible endpoints, repairs and
validates model outputs, realigns non-extractive spans and scores predictions
with strict and relaxed F1.
"""

from .align import AlignConfig, AlignOutcome, SpanCandidate, align, enumerate_spans, repair_result, similarity
from .dataset import (
    DatasetSplit,
    DatasetStats,
    compute_stats,
    filter_unlocatable,
    load_dataset,
    write_dataset,
)
from .mend import MendOutcome, mend
from .model import (
    NULL_TARGET,
    Arity,
    DomainTaxonomy,
    FailureMode,
    FailureRecord,
    Quad,
    Sample,
    Sentiment,
    canonical_quad_order,
    load_taxonomy,
)
from .prompts import (
    PromptLanguagePolicy,
    PromptTemplate,
    SftPair,
    build_instruction_set,
    default_template,
    export_sft,
    render_prompt,
    serialize_answer,
)
from .scoring import EvalReport, MatchMode, evaluate, expressions_overlap, match_sample, quad_equal_strict
from .validate import ValidationConfig, ValidationResult, tally_failures, validate

__all__ = [
    "AlignConfig",
    "AlignOutcome",
    "Arity",
    "DatasetSplit",
    "DatasetStats",
    "DomainTaxonomy",
    "EvalReport",
    "FailureMode",
    "FailureRecord",
    "MatchMode",
    "MendOutcome",
    "NULL_TARGET",
    "PromptLanguagePolicy",
    "PromptTemplate",
    "Quad",
    "Sample",
    "Sentiment",
    "SftPair",
    "SpanCandidate",
    "ValidationConfig",
    "ValidationResult",
    "align",
    "build_instruction_set",
    "canonical_quad_order",
    "compute_stats",
    "default_template",
    "enumerate_spans",
    "evaluate",
    "export_sft",
    "expressions_overlap",
    "filter_unlocatable",
    "load_dataset",
    "load_taxonomy",
    "match_sample",
    "mend",
    "quad_equal_strict",
    "render_prompt",
    "repair_result",
    "serialize_answer",
    "similarity",
    "tally_failures",
    "validate",
    "write_dataset",
]

__version__ = "0.1.0"
