"""Command-line entry point: ``quadkit {stats,build,infer,evaluate}``."""

from __future__ import annotations

import argparse
import json
import logging
import sys
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Optional, Sequence

from .align import AlignConfig, repair_result
from .dataset import DatasetError, DatasetSplit, compute_stats, load_dataset
from .gateway import ConfigError, EndpointConfig, emit_json_schema, pending, read_predictions, run_batch
from .mend import mend
from .model import Arity, DomainTaxonomy, FailureRecord, load_taxonomy
from .prompts import (
    MissingTemplate,
    PromptError,
    PromptLanguagePolicy,
    UnknownDomain,
    build_instruction_set,
    export_sft,
    load_templates,
    read_sft,
)
from .report import failure_table, language_breakdown, score_table, stats_table
from .scoring import EvalReport, MatchMode, evaluate
from .validate import FailureTally, ValidationConfig, tally_failures, validate

log = logging.getLogger("quadkit")

EXIT_OK, EXIT_CONFIG, EXIT_DATA = 0, 1, 2


@dataclass
class RunConfig:
    taxonomies: list[Path] = field(default_factory=list)
    datasets: list[Path] = field(default_factory=list)
    template_dir: Optional[Path] = None
    prompt_language_policy: PromptLanguagePolicy = PromptLanguagePolicy.ENGLISH_ONLY
    seed: int = 0
    align: AlignConfig = field(default_factory=AlignConfig)
    endpoint: Optional[EndpointConfig] = None
    arity: Arity = Arity.QUAD
    repair_spans: bool = True
    normalize_sentiment: bool = False

    @classmethod
    def from_file(cls, path) -> "RunConfig":
        path = Path(path)
        try:
            raw = json.loads(path.read_text(encoding="utf-8"))
        except (OSError, json.JSONDecodeError) as e:
            raise ConfigError(f"cannot read run config {path}: {e}") from None
        base = path.parent

        def resolve(p):
            p = Path(p)
            return p if p.is_absolute() else base / p

        try:
            return cls(
                taxonomies=[resolve(p) for p in raw.get("taxonomies", [])],
                datasets=[resolve(p) for p in raw.get("datasets", [])],
                template_dir=resolve(raw["template_dir"]) if raw.get("template_dir") else None,
                prompt_language_policy=PromptLanguagePolicy.parse(raw.get("prompt_language_policy", "english_only")),
                seed=int(raw.get("seed", 0)),
                align=AlignConfig(**raw.get("align", {})),
                endpoint=EndpointConfig.from_dict(raw["endpoint"]) if raw.get("endpoint") else None,
                arity=Arity(raw.get("arity", "quad")),
                repair_spans=bool(raw.get("repair_spans", True)),
                normalize_sentiment=bool(raw.get("normalize_sentiment", False)),
            )
        except (TypeError, ValueError) as e:
            raise ConfigError(f"invalid run config {path}: {e}") from None

    def load_taxonomies(self) -> dict[str, DomainTaxonomy]:
        """Load taxonomy files; the run's arity overrides the one in each file."""
        taxonomies = {}
        for p in self.taxonomies:
            try:
                tax = replace(load_taxonomy(p), arity=self.arity)
            except (OSError, KeyError, ValueError) as e:
                raise ConfigError(f"cannot load taxonomy {p}: {e}") from None
            taxonomies[tax.domain_id] = tax
        return taxonomies


def _apply_overrides(config: RunConfig, args) -> RunConfig:
    updates = {}
    if getattr(args, "seed", None) is not None:
        updates["seed"] = args.seed
    if getattr(args, "policy", None):
        updates["prompt_language_policy"] = PromptLanguagePolicy.parse(args.policy)
    if getattr(args, "arity", None):
        updates["arity"] = Arity(args.arity)
    if getattr(args, "no_repair", False):
        updates["repair_spans"] = False
    return replace(config, **updates)


def _load(config: RunConfig, path, name: str = "test") -> DatasetSplit:
    return load_dataset(path, config.arity, config.normalize_sentiment, name=name)


def cmd_stats(config: RunConfig, datasets: Sequence[Path], out: Optional[Path] = None) -> str:
    blocks, payload = [], {}
    for path in datasets:
        path = Path(path)
        stats = compute_stats(_load(config, path, path.stem))
        blocks.append(f"== {path.stem}\n" + stats_table(path.stem, stats))
        payload[path.stem] = stats.to_dict()
    text = "\n\n".join(blocks)
    if out is not None:
        out.mkdir(parents=True, exist_ok=True)
        (out / "stats.json").write_text(json.dumps(payload, indent=2, ensure_ascii=False) + "\n", encoding="utf-8")
        (out / "stats.txt").write_text(text + "\n", encoding="utf-8")
    return text


def _check_templates(config: RunConfig):
    templates = load_templates(config.template_dir)
    for lang in config.prompt_language_policy.languages:
        if lang not in templates:
            raise MissingTemplate(lang)
    return templates


def cmd_build(config: RunConfig, out: Path) -> list[Path]:
    """Write one SFT file per dataset and, with two or more, a merged multi-domain file."""
    taxonomies = config.load_taxonomies()
    templates = _check_templates(config)
    splits = []
    for path in config.datasets:
        split = _load(config, path, Path(path).stem)
        for domain in split.domains:
            if domain not in taxonomies:
                raise UnknownDomain(domain)
        splits.append((Path(path).stem, split))

    out.mkdir(parents=True, exist_ok=True)
    written = []

    def pairs_for(named):
        by_tax = []
        for _, split in named:
            for domain in split.domains:
                sub = DatasetSplit(split.name, [s for s in split if s.domain == domain])
                by_tax.append((taxonomies[domain], sub))
        return build_instruction_set(by_tax, config.prompt_language_policy, config.seed, templates)

    for stem, split in splits:
        dest = out / f"sft_{stem}.jsonl"
        export_sft(pairs_for([(stem, split)]), dest)
        written.append(dest)
    if len(splits) >= 2:
        dest = out / "sft_multi.jsonl"
        export_sft(pairs_for(splits), dest)
        written.append(dest)
    return written


def cmd_infer(config: RunConfig, prompts_file: Path, predictions: Path, transport=None) -> int:
    """Run the endpoint over every prompt not already answered; returns the request count."""
    if config.endpoint is None:
        raise ConfigError("run config has no endpoint section")
    pairs = read_sft(prompts_file)
    prompts = [(p.sample_id, p.system, p.user) for p in pairs]
    todo = pending(prompts, read_predictions(predictions))
    print(f"{len(prompts) - len(todo)} of {len(prompts)} prompts already answered; {len(todo)} to send")

    schema = None
    if config.endpoint.structured_output:
        taxonomies = config.load_taxonomies()
        domain_of = {p.sample_id: p.domain for p in pairs}
        for domain in set(domain_of.values()):
            if domain not in taxonomies:
                raise UnknownDomain(domain)
        schemas = {d: emit_json_schema(t) for d, t in taxonomies.items()}
        schema = lambda sid: schemas[domain_of[sid]]  # noqa: E731

    predictions.parent.mkdir(parents=True, exist_ok=True)
    results = run_batch(todo, config.endpoint, schema, sink=predictions, transport=transport)
    failed = sum(r.error is not None for r in results)
    print(f"sent {len(results)} requests; {failed} failed")
    return len(results)


@dataclass
class Evaluation:
    tally: FailureTally
    strict: EvalReport
    relaxed: EvalReport
    per_domain: dict[str, tuple[EvalReport, EvalReport]]
    records: list[FailureRecord]
    audit: list[str]
    missing_predictions: list[str]
    unknown_predictions: list[str]


def run_evaluation(config: RunConfig, split: DatasetSplit, raw_outputs: dict[str, str],
                   taxonomies: dict[str, DomainTaxonomy]) -> Evaluation:
    """mend -> validate -> tally -> (repair) -> score, over one dataset."""
    known = {s.id for s in split}
    missing = [s.id for s in split if s.id not in raw_outputs]
    unknown = sorted(set(raw_outputs) - known)
    validation_configs = {}
    results, scored, records, audit = [], [], [], []
    for sample in split:
        if sample.id not in raw_outputs:
            continue
        if sample.domain not in taxonomies:
            raise UnknownDomain(sample.domain)
        vcfg = validation_configs.get(sample.domain)
        if vcfg is None:
            vcfg = ValidationConfig.from_taxonomy(taxonomies[sample.domain], arity=config.arity)
            validation_configs[sample.domain] = vcfg
        result = validate(mend(raw_outputs[sample.id]), sample.text, vcfg, sample.id)
        results.append(result)
        if config.repair_spans:
            result = repair_result(result, sample.text, config.align)
        records.extend(result.failures)
        audit.extend(f"{sample.id}: {note}" for note in result.audit)
        scored.append((sample, result.quads))

    per_domain = {}
    for domain in sorted({s.domain for s, _ in scored}):
        subset = [(s, q) for s, q in scored if s.domain == domain]
        per_domain[domain] = (evaluate(subset, MatchMode.STRICT), evaluate(subset, MatchMode.RELAXED))
    return Evaluation(
        tally=tally_failures(results),
        strict=evaluate(scored, MatchMode.STRICT),
        relaxed=evaluate(scored, MatchMode.RELAXED),
        per_domain=per_domain,
        records=records,
        audit=audit,
        missing_predictions=missing,
        unknown_predictions=unknown,
    )


def cmd_evaluate(config: RunConfig, predictions: Path, dataset: Path, out: Optional[Path] = None) -> str:
    split = _load(config, dataset, Path(dataset).stem)
    raw = {sid: p.raw_output for sid, p in read_predictions(predictions).items()}
    ev = run_evaluation(config, split, raw, config.load_taxonomies())

    name = Path(predictions).stem
    rows = dict(ev.per_domain)
    if len(rows) > 1:
        rows["overall"] = (ev.strict, ev.relaxed)
    sections = [
        "Failure modes (before span repair)\n" + failure_table({name: ev.tally}),
        "Scores" + (" (after span repair)" if config.repair_spans else " (no span repair)")
        + "\n" + score_table(rows),
        "By language\n" + language_breakdown(ev.per_domain),
    ]
    mismatched = len(ev.missing_predictions) + len(ev.unknown_predictions)
    if mismatched:
        for sid in ev.missing_predictions:
            log.warning("no prediction for sample %s; excluded from scoring", sid)
        for sid in ev.unknown_predictions:
            log.warning("prediction for unknown sample %s; ignored", sid)
        sections.append(f"warnings: {mismatched} id mismatches excluded from scoring")
    text = "\n\n".join(sections)

    if out is not None:
        out.mkdir(parents=True, exist_ok=True)
        report = {
            "failures": ev.tally.to_dict(),
            "strict": ev.strict.to_dict(),
            "relaxed": ev.relaxed.to_dict(),
            "repair_spans": config.repair_spans,
            "missing_predictions": ev.missing_predictions,
            "unknown_predictions": ev.unknown_predictions,
        }
        (out / "report.json").write_text(json.dumps(report, indent=2, ensure_ascii=False) + "\n", encoding="utf-8")
        with open(out / "validation.jsonl", "w", encoding="utf-8") as f:
            for record in ev.records:
                f.write(json.dumps(record.to_dict(), ensure_ascii=False) + "\n")
        summary = dict(ev.tally.to_dict(), repairs=ev.audit)
        (out / "validation_summary.json").write_text(json.dumps(summary, indent=2, ensure_ascii=False) + "\n", encoding="utf-8")
        (out / "report.txt").write_text(text + "\n", encoding="utf-8")
    return text


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", type=Path, help="run config JSON")
    common.add_argument("--seed", type=int)
    common.add_argument("--policy", choices=["en", "fr", "mix"])
    common.add_argument("--arity", choices=["quad", "triple"])
    common.add_argument("--out", type=Path, help="output directory")
    common.add_argument("-v", "--verbose", action="store_true")

    parser = argparse.ArgumentParser(prog="quadkit", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("stats", parents=[common], help="dataset statistics tables")
    p.add_argument("datasets", nargs="*", type=Path)

    sub.add_parser("build", parents=[common], help="export SFT instruction sets")

    p = sub.add_parser("infer", parents=[common], help="query the configured endpoint")
    p.add_argument("--prompts", type=Path, required=True, help="SFT export to take prompts from")
    p.add_argument("--predictions", type=Path, help="predictions file (default: OUT/predictions.jsonl)")

    p = sub.add_parser("evaluate", parents=[common], help="failure modes and strict/relaxed F1")
    p.add_argument("--predictions", type=Path, required=True)
    p.add_argument("--dataset", type=Path, required=True)
    p.add_argument("--no-repair", action="store_true", help="score raw predictions without span repair")
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        config = RunConfig.from_file(args.config) if args.config else RunConfig()
        config = _apply_overrides(config, args)
        if args.command == "stats":
            datasets = args.datasets or config.datasets
            if not datasets:
                raise ConfigError("no datasets given")
            print(cmd_stats(config, datasets, args.out))
        elif args.command == "build":
            if not config.datasets:
                raise ConfigError("run config lists no datasets")
            for path in cmd_build(config, args.out or Path(".")):
                print(f"wrote {path}")
        elif args.command == "infer":
            predictions = args.predictions or (args.out or Path(".")) / "predictions.jsonl"
            cmd_infer(config, args.prompts, predictions)
        elif args.command == "evaluate":
            print(cmd_evaluate(config, args.predictions, args.dataset, args.out))
    except (ConfigError, PromptError) as e:
        print(f"config error: {e}", file=sys.stderr)
        return EXIT_CONFIG
    except DatasetError as e:
        print(f"data error: {e}", file=sys.stderr)
        return EXIT_DATA
    except OSError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_DATA
    return EXIT_OK
