"""Prompt rendering, answer serialization and SFT instruction-set assembly."""

from __future__ import annotations

import enum
import json
import random
import re
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Mapping, Sequence

from .dataset import DatasetSplit
from .model import (
    PROMPT_SENTIMENT_ORDER,
    WRAPPER_KEY,
    Arity,
    DomainTaxonomy,
    Quad,
    canonical_quad_order,
    package_resource,
)

PLACEHOLDERS = (
    "example_text",
    "allowed_sentiments",
    "allowed_aspect_categories",
    "one_shot_document",
    "one_shot_answer",
)
SECTION_HEADERS = (
    "DOCUMENT",
    "ALLOWED SENTIMENTS",
    "ALLOWED ASPECT CATEGORIES",
    "FORMATTING EXAMPLE",
    "RESPONSE",
)
_PLACEHOLDER_RE = re.compile(r"\{(" + "|".join(PLACEHOLDERS) + r")\}")


class PromptError(Exception):
    pass


class MissingPlaceholder(PromptError):
    def __init__(self, name: str):
        self.name = name
        super().__init__(f"template is missing placeholder {{{name}}}")


class MissingTemplate(PromptError):
    def __init__(self, language: str):
        self.language = language
        super().__init__(f"no prompt template for language {language!r}")


class UnknownDomain(PromptError):
    def __init__(self, domain: str):
        self.domain = domain
        super().__init__(f"no taxonomy for domain {domain!r}")


@dataclass(frozen=True)
class PromptTemplate:
    language: str
    body: str

    def __post_init__(self):
        for name in PLACEHOLDERS:
            n = self.body.count("{" + name + "}")
            if n == 0:
                raise MissingPlaceholder(name)
            if n > 1:
                raise PromptError(f"placeholder {{{name}}} occurs {n} times")
        positions = []
        for header in SECTION_HEADERS:
            m = re.search(rf"^{re.escape(header)}$", self.body, flags=re.MULTILINE)
            if m is None:
                raise PromptError(f"template lacks a {header!r} section header")
            positions.append(m.start())
        if positions != sorted(positions):
            raise PromptError("template section headers are out of order")

    @classmethod
    def from_file(cls, path, language: str | None = None) -> "PromptTemplate":
        path = Path(path)
        return cls(language or path.stem, path.read_text(encoding="utf-8"))


def default_template(language: str = "en") -> PromptTemplate:
    path = package_resource("templates", f"{language}.txt")
    if not path.exists():
        raise MissingTemplate(language)
    return PromptTemplate.from_file(path, language)


def load_templates(template_dir=None) -> dict[str, PromptTemplate]:
    """Read every ``<lang>.txt`` in ``template_dir`` (shipped templates if None)."""
    directory = Path(template_dir) if template_dir else package_resource("templates")
    return {p.stem: PromptTemplate.from_file(p) for p in sorted(directory.glob("*.txt"))}


class PromptLanguagePolicy(str, enum.Enum):
    ENGLISH_ONLY = "english_only"
    FRENCH_ONLY = "french_only"
    MIXED = "mixed"

    @classmethod
    def parse(cls, value: str) -> "PromptLanguagePolicy":
        aliases = {"en": cls.ENGLISH_ONLY, "fr": cls.FRENCH_ONLY, "mix": cls.MIXED}
        return aliases.get(value) or cls(value)

    def select(self, sample_language: str) -> str:
        if self is PromptLanguagePolicy.ENGLISH_ONLY:
            return "en"
        if self is PromptLanguagePolicy.FRENCH_ONLY:
            return "fr"
        return "fr" if sample_language == "fr" else "en"

    @property
    def languages(self) -> tuple[str, ...]:
        return {"english_only": ("en",), "french_only": ("fr",), "mixed": ("en", "fr")}[self.value]


def serialize_answer(quads: Iterable[Quad], text: str, arity: Arity | str = Arity.QUAD) -> str:
    """Single-line JSON answer with the quads in canonical order."""
    arity = Arity(arity)
    ordered = canonical_quad_order(list(quads), text)
    return json.dumps({WRAPPER_KEY: [q.to_dict(arity) for q in ordered]}, ensure_ascii=False)


def render_prompt(taxonomy: DomainTaxonomy, template: PromptTemplate, text: str) -> str:
    values = {
        "example_text": text,
        "allowed_sentiments": "\n".join(f"- {s.value}" for s in PROMPT_SENTIMENT_ORDER),
        "allowed_aspect_categories": "\n".join(
            f"- {label} (description: {description})" for label, description in taxonomy.categories
        ),
        "one_shot_document": taxonomy.one_shot_text,
        "one_shot_answer": serialize_answer(
            taxonomy.one_shot_quads, taxonomy.one_shot_text, taxonomy.arity
        ),
    }
    # single pass so that placeholder-like text inside the document is left alone
    return _PLACEHOLDER_RE.sub(lambda m: values[m.group(1)], template.body)


@dataclass(frozen=True)
class SftPair:
    system: str
    user: str
    assistant: str
    sample_id: str
    domain: str
    language: str
    prompt_language: str = "en"

    def to_dict(self) -> dict:
        return {
            "messages": [
                {"role": "system", "content": self.system},
                {"role": "user", "content": self.user},
                {"role": "assistant", "content": self.assistant},
            ],
            "sample_id": self.sample_id,
            "domain": self.domain,
            "language": self.language,
            "prompt_language": self.prompt_language,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "SftPair":
        content = {m["role"]: m["content"] for m in d["messages"]}
        return cls(
            system=content.get("system", ""),
            user=content["user"],
            assistant=content.get("assistant", ""),
            sample_id=d["sample_id"],
            domain=d["domain"],
            language=d["language"],
            prompt_language=d.get("prompt_language", "en"),
        )


def build_instruction_set(
    splits: Sequence[tuple[DomainTaxonomy, DatasetSplit]],
    policy: PromptLanguagePolicy | str,
    seed: int,
    templates: Mapping[str, PromptTemplate] | None = None,
) -> list[SftPair]:
    """Render SFT pairs for every sample, concatenate across domains, shuffle once.

    Each sample is rendered with the taxonomy registered for its own domain,
    so a multi-domain set is simply the union of single-domain prompts.
    """
    policy = PromptLanguagePolicy.parse(policy) if isinstance(policy, str) else policy
    if templates is None:
        templates = load_templates()
    taxonomies = {tax.domain_id: tax for tax, _ in splits}
    pairs = []
    for _, split in splits:
        for sample in split.samples:
            tax = taxonomies.get(sample.domain)
            if tax is None:
                raise UnknownDomain(sample.domain)
            lang = policy.select(sample.language)
            if lang not in templates:
                raise MissingTemplate(lang)
            pairs.append(
                SftPair(
                    system=tax.system_prompt,
                    user=render_prompt(tax, templates[lang], sample.text),
                    assistant=serialize_answer(sample.gold, sample.text, tax.arity),
                    sample_id=sample.id,
                    domain=sample.domain,
                    language=sample.language,
                    prompt_language=lang,
                )
            )
    random.Random(seed).shuffle(pairs)
    return pairs


def export_sft(pairs: Iterable[SftPair], path) -> None:
    with open(path, "w", encoding="utf-8") as f:
        for pair in pairs:
            f.write(json.dumps(pair.to_dict(), ensure_ascii=False) + "\n")


def read_sft(path) -> list[SftPair]:
    with open(path, encoding="utf-8") as f:
        return [SftPair.from_dict(json.loads(line)) for line in f if line.strip()]
