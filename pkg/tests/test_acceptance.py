"""Acceptance criteria for the package, one test per criterion.

Each test prints a single PASS/FAIL line (also repeated in the pytest
terminal summary). Run standalone with ``python tests/test_acceptance.py``.
"""

import json
import random
import shutil
import sys
import time
from collections import Counter
from pathlib import Path

sys.path.insert(0, str(Path(__file__).parent))

from conftest import APP_QUAD, TV_APP_TEXT, DATA, TV_QUAD  # noqa: E402
from generators import new_rng, random_corpus, random_instance, random_prediction, random_text  # noqa: E402
from mock_server import MockEndpoint  # noqa: E402
from mutate import fuzz_cases  # noqa: E402
from oracles import brute_force_align, brute_force_matching  # noqa: E402
from quadkit.align import AlignConfig, align  # noqa: E402
from quadkit.cli import RunConfig, cmd_build, run_evaluation  # noqa: E402
from quadkit.dataset import DatasetSplit, compute_stats, load_dataset  # noqa: E402
from quadkit.gateway import EndpointConfig, emit_json_schema, pending, read_predictions, run_batch  # noqa: E402
from quadkit.mend import mend  # noqa: E402
from quadkit.model import Quad, Sample, load_taxonomy, package_resource  # noqa: E402
from quadkit.prompts import default_template, render_prompt, serialize_answer  # noqa: E402
from quadkit.scoring import MatchMode, evaluate, match_sample, quad_match  # noqa: E402
from quadkit.validate import ValidationConfig, tally_failures, validate  # noqa: E402

RESULTS = []


def report(number, name, ok, detail):
    line = f"[{'PASS' if ok else 'FAIL'}] criterion {number:>2}: {name} ({detail})"
    RESULTS.append(line)
    print(line)
    assert ok, line


def test_criterion_01_span_example():
    text, pred = "I love New Yrok Citee --- it is the best!", "New York City"
    align(pred, text)  # warm numpy code paths
    t0 = time.perf_counter()
    outcome = align(pred, text)
    ms = (time.perf_counter() - t0) * 1000
    got = outcome.replacement.text if outcome.replacement else None
    report(1, "span repair example", got == "New Yrok Citee" and ms < 10, f"got {got!r} in {ms:.2f} ms")


def test_criterion_02_align_vs_oracle():
    rng = random.Random(2002)
    t0 = time.perf_counter()
    agree = 0
    for _ in range(1000):
        text = random_text(rng, 12)
        pred = random_prediction(rng, text)
        outcome = align(pred, text)
        expected = brute_force_align(pred, text)
        got = None if outcome.replacement is None else (outcome.replacement.start, outcome.replacement.end)
        agree += got == (None if expected is None else expected[:2])
    secs = time.perf_counter() - t0
    report(2, "align vs brute force", agree == 1000 and secs < 30, f"{agree}/1000 agree, {secs:.1f} s")


def test_criterion_03_matching_vs_oracle():
    rng = new_rng(3003)
    t0 = time.perf_counter()
    agree = 0
    for _ in range(1000):
        text, preds, golds = random_instance(rng, 5)
        for mode in MatchMode:
            oracle = brute_force_matching(len(preds), len(golds), lambda i, j: quad_match(preds[i], golds[j], text, mode))
            agree += match_sample(preds, golds, text, mode) == oracle
    secs = time.perf_counter() - t0
    report(3, "matching vs brute force", agree == 2000 and secs < 30,
           f"{agree}/2000 (1000 instances x 2 modes) agree, {secs:.1f} s")


def test_criterion_04_relaxed_dominance():
    rng = new_rng(4004)
    violations = 0
    for _ in range(200):
        corpus = random_corpus(rng)
        violations += evaluate(corpus, "relaxed").f1 < evaluate(corpus, "strict").f1
    extremes_ok = True
    for _ in range(20):
        corpus = random_corpus(rng)
        # guarantee at least one gold quad so F1 is defined
        corpus[0] = (Sample("s0", "a b", "en", "PS", (Quad("a", "price", "positive", "a b"),)), [])
        for mode in MatchMode:
            extremes_ok &= evaluate([(s, list(s.gold)) for s, _ in corpus], mode).f1 == 1.0
            extremes_ok &= evaluate([(s, []) for s, _ in corpus], mode).f1 == 0.0
    report(4, "relaxed F1 >= strict F1", violations == 0 and extremes_ok,
           f"{violations} violations over 200 corpora; perfect/empty exact: {extremes_ok}")


def test_criterion_05_failure_ladder():
    ladder = json.loads((DATA / "failure_ladder.json").read_text(encoding="utf-8"))
    config = ValidationConfig({"positive", "negative", "neutral", "mixed"}, frozenset(ladder["categories"]))
    results, agree = [], 0
    for case in ladder["cases"]:
        r = validate(mend(case["raw"]), ladder["text"], config, case["id"])
        results.append(r)
        agree += [[f.mode.value, f.locus] for f in r.failures] == case["expected"] and r.pred_count == case["pred_count"]
    tally_ok = tally_failures(results).to_dict() == ladder["totals"]
    n = len(ladder["cases"])
    report(5, "failure-mode ladder", agree == n and n >= 18 and tally_ok,
           f"{agree}/{n} fixtures agree, tally matches manifest: {tally_ok}")


def test_criterion_06_mend_conformance():
    corpus = sorted((DATA / "mend_corpus").iterdir())
    agree = 0
    for case in corpus:
        outcome = mend((case / "raw.txt").read_text(encoding="utf-8"))
        if (case / "INVALID").exists():
            agree += not outcome.ok
        else:
            agree += outcome.ok and outcome.value == json.loads((case / "expected.json").read_text(encoding="utf-8"))
    valid = ['{"a": [1, 2]}', "[]", '{"aspect_based_sentiment_analysis": []}', '"s"', "0"]
    passthrough = all(not mend(v).repaired and mend(v).ok for v in valid)
    crashes = 0
    for raw in fuzz_cases(10_000, seed=6006):
        try:
            mend(raw)
        except Exception:
            crashes += 1
    ok = len(corpus) >= 30 and agree == len(corpus) and passthrough and crashes == 0
    report(6, "JSON mend conformance", ok,
           f"corpus {agree}/{len(corpus)}, passthrough {passthrough}, {crashes} crashes in 10000 fuzz cases")


def test_criterion_07_prompt_golden():
    tax = load_taxonomy(package_resource("taxonomies", "ps_example.json"))
    golden = (DATA / "golden" / "ps_prompt_ok.txt").read_text(encoding="utf-8")
    prompt_ok = render_prompt(tax, default_template(), "ok") == golden
    expected = (
        '{"aspect_based_sentiment_analysis": [{"target": "TV", "aspect_category": "reliability", '
        '"sentiment": "positive", "opinion_expression": "My new TV never breaks down"}, '
        '{"target": "app store", "aspect_category": "price", "sentiment": "negative", '
        '"opinion_expression": "the app store is too expensive"}]}'
    )
    answer_ok = serialize_answer([TV_QUAD, APP_QUAD], TV_APP_TEXT) == expected
    report(7, "prompt golden file", prompt_ok and answer_ok, f"golden byte-exact {prompt_ok}, example answer {answer_ok}")


def test_criterion_08_deterministic_build(tmp_path):
    codes = ("ps", "hr", "cr")

    def build(seed, out):
        cfg = tmp_path / f"run{seed}.json"
        cfg.write_text(json.dumps({
            "taxonomies": [str(DATA / f"taxonomy_{c}.json") for c in codes],
            "datasets": [str(DATA / f"domain_{c}.jsonl") for c in codes],
            "seed": seed,
        }))
        cmd_build(RunConfig.from_file(cfg), out)
        data = (out / "sft_multi.jsonl").read_bytes()
        shutil.rmtree(out)
        return data

    runs = [build(7, tmp_path / f"o{i}") for i in range(5)]
    other = build(8, tmp_path / "other")
    identical = len(set(runs)) == 1
    reordered = other != runs[0] and Counter(other.splitlines()) == Counter(runs[0].splitlines())
    report(8, "deterministic multi-domain build", identical and reordered,
           f"5 runs identical {identical}, seed 8 reorders same lines {reordered}")


def test_criterion_09_stats():
    manifest = json.loads((DATA / "stats50_manifest.json").read_text())
    got = compute_stats(load_dataset(DATA / "stats50.jsonl")).to_dict()
    got["avg_quads_per_sample"] = round(got["avg_quads_per_sample"], 2)
    diff = sorted(k for k in manifest if manifest[k] != got.get(k))
    report(9, "stats reproduction", got["n_samples"] == 50 and not diff, f"mismatched fields: {diff or 'none'}")


def test_criterion_10_gateway(tmp_path, monkeypatch):
    monkeypatch.setenv("QK_ACCEPT_KEY", "secret")
    tax = load_taxonomy(package_resource("taxonomies", "ps_example.json"))
    prompts = [(f"id{i}", "sys", f"p{i}") for i in range(10)]
    sink = tmp_path / "preds.jsonl"
    with MockEndpoint(script={"p4": [429, 429]}, delay=0.005) as server:
        cfg = EndpointConfig(server.base_url, "m", api_key_env="QK_ACCEPT_KEY", max_concurrency=4,
                             backoff_base_s=0.0, structured_output=True)
        results = run_batch(prompts[:6], cfg, schema=emit_json_schema(tax), sink=sink)
        todo = pending(prompts, read_predictions(sink))
        rest = run_batch(todo, cfg, schema=emit_json_schema(tax), sink=sink)
    done = read_predictions(sink)
    bijection = set(done) == {p[0] for p in prompts} and len(results) == 6 and len(rest) == 4
    in_order = [r.sample_id for r in results + rest] == [p[0] for p in prompts]
    retried = results[4].attempt_count == 3 and results[4].error is None
    resumed = [p[0] for p in todo] == [f"id{i}" for i in range(6, 10)] and server.calls["p0"] == 1
    enum = server.requests[0]["response_format"]["json_schema"]["schema"]["properties"][
        "aspect_based_sentiment_analysis"]["items"]["properties"]["aspect_category"]["enum"]
    schema_ok = len(enum) == 14
    ok = bijection and in_order and retried and resumed and schema_ok
    report(10, "gateway contract", ok, f"bijection {bijection}, order {in_order}, retry {retried}, "
                                       f"resume {resumed}, enum size {len(enum)}")


def test_criterion_11_performance():
    rng = random.Random(1111)
    vocab = ["service", "price", "network", "slow", "great", "the", "and", "support", "is", "very"]
    text = " ".join(rng.choice(vocab) for _ in range(1000))
    pred = "the netwrok supprot is very slow and the prise is!"
    assert len(pred) == 50 and pred not in text
    t0 = time.perf_counter()
    align(pred, text, AlignConfig(max_span_words=30))
    align_s = time.perf_counter() - t0

    tax = load_taxonomy(package_resource("taxonomies", "ps_example.json"))
    labels = tax.labels
    samples, raw = [], {}
    for i in range(10_000):
        words = [rng.choice(vocab) for _ in range(rng.randint(8, 40))]
        s_text = " ".join(words)
        j = rng.randrange(len(words))
        gold = (Quad(words[j], rng.choice(labels), "negative", " ".join(words[j : j + 3])),)
        samples.append(Sample(f"s{i}", s_text, "en", "PS", gold))
        q = gold[0].to_dict()
        kind = i % 4
        if kind == 1:
            q["target"] = q["target"][:-1] + "x"
        elif kind == 2:
            q["opinion_expression"] += " indeed"
        answer = json.dumps({"aspect_based_sentiment_analysis": [q]})
        raw[f"s{i}"] = answer if kind != 3 else "```json\n" + answer.replace('"', "'")[:-2]
    config = RunConfig()
    t0 = time.perf_counter()
    ev = run_evaluation(config, DatasetSplit("perf", samples), raw, {"PS": tax})
    eval_s = time.perf_counter() - t0
    ok = align_s < 1 and eval_s < 60 and ev.strict.pred_total == 10_000
    report(11, "performance", ok, f"align on 1000 words {align_s:.3f} s, 10000 predictions end-to-end {eval_s:.1f} s")


if __name__ == "__main__":
    import pytest

    sys.exit(pytest.main([__file__, "-q"]))
