"""Generate the synthetic test fixtures and their construction manifests.

Every manifest is tallied from the construction plan itself, never by
running quadkit over the generated files.

    python tools/make_fixtures.py
"""

import json
import random
from collections import Counter
from pathlib import Path

OUT = Path(__file__).resolve().parent.parent / "tests" / "data"

LANGS = ["fr", "en", "ro", "es", "ar", "pl", "nl"]
CATEGORIES = ["price", "reliability", "usability", "evolution"]
SENTIMENTS = ["positive", "negative", "neutral", "mixed"]
NOUNS = ["screen", "battery", "app", "price", "network", "support", "invoice", "camera", "store", "update"]
ADJS = ["great", "slow", "awful", "fine", "too expensive", "broken", "lovely", "confusing"]


def dump_jsonl(path, rows):
    with open(path, "w", encoding="utf-8") as f:
        for row in rows:
            f.write(json.dumps(row, ensure_ascii=False) + "\n")


def sample_from_plan(sid, lang, domain, n_quads, n_implicit, rng):
    """One sample whose text contains n_quads clauses; the first n_implicit use NULL targets."""
    nouns = rng.sample(NOUNS, n_quads) if n_quads <= len(NOUNS) else [f"{rng.choice(NOUNS)}{i}" for i in range(n_quads)]
    clauses, quads = [], []
    for i, noun in enumerate(nouns):
        clause = f"the {noun} is {rng.choice(ADJS)}"
        clauses.append(clause)
        quads.append({
            "target": "NULL" if i < n_implicit else noun,
            "aspect_category": rng.choice(CATEGORIES),
            "sentiment": rng.choice(SENTIMENTS),
            "opinion_expression": clause,
        })
    text = ", and ".join(clauses).capitalize() + "." if clauses else "Nothing to say."
    if clauses:
        # capitalize() lowercases the rest; rebuild the expressions against the final text
        for q, clause in zip(quads, clauses):
            q["opinion_expression"] = clause if clause in text else clause.capitalize()
    return {"id": sid, "text": text, "language": lang, "domain": domain, "quads": quads}


def stats_fixture(n, seed, name):
    rng = random.Random(seed)
    plan = []
    for i in range(n):
        n_quads = rng.choice([0, 1, 1, 2, 2, 3, 4, 5, 6])
        plan.append((f"{name}-{i:03d}", rng.choice(LANGS), n_quads, rng.randint(0, n_quads)))
    rows = [sample_from_plan(sid, lang, "PS", nq, ni, rng) for sid, lang, nq, ni in plan]
    total = sum(p[2] for p in plan)
    manifest = {
        "per_language_counts": dict(sorted(Counter(p[1] for p in plan).items())),
        "implicit_targets": sum(p[3] for p in plan),
        "explicit_targets": total - sum(p[3] for p in plan),
        "n_samples": n,
        "avg_quads_per_sample": round(total / n, 2),
        "quad_histogram": {
            b: sum(1 for p in plan if (str(p[2]) if p[2] < 5 else "5+") == b)
            for b in ["0", "1", "2", "3", "4", "5+"]
        },
    }
    dump_jsonl(OUT / f"{name}.jsonl", rows)
    (OUT / f"{name}_manifest.json").write_text(json.dumps(manifest, indent=2) + "\n")


def domain_fixtures():
    rng = random.Random(11)
    for domain, langs, size in (("PS", ["en", "fr", "ro"], 6), ("HR", ["en", "fr"], 5), ("CR", ["fr"], 4)):
        rows = [
            sample_from_plan(f"{domain.lower()}-{i}", rng.choice(langs), domain, rng.randint(0, 3), 0, rng)
            for i in range(size)
        ]
        dump_jsonl(OUT / f"domain_{domain.lower()}.jsonl", rows)
        taxonomy = {
            "domain_id": domain,
            "system_prompt": f"You analyse {domain} feedback.",
            "categories": [{"label": c, "description": f"opinions about {c}"} for c in CATEGORIES],
            "one_shot": {
                "text": "The app is slow but the price is fine.",
                "quads": [
                    {"target": "app", "aspect_category": "usability", "sentiment": "negative",
                     "opinion_expression": "The app is slow"},
                    {"target": "price", "aspect_category": "price", "sentiment": "positive",
                     "opinion_expression": "the price is fine"},
                ],
            },
            "task_arity": "quad",
        }
        (OUT / f"taxonomy_{domain.lower()}.json").write_text(json.dumps(taxonomy, indent=2) + "\n")


def scoring_fixture():
    """25 samples; per sample the plan says how many preds are exact, overlapping or wrong."""
    rng = random.Random(5)
    rows, manifest_rows = [], []
    totals = Counter()
    for i in range(25):
        n_gold = rng.randint(0, 4)
        sample = sample_from_plan(f"ev-{i:02d}", rng.choice(["en", "fr"]), rng.choice(["PS", "HR"]), n_gold, 0, rng)
        preds = []
        n_exact = n_overlap = 0
        for q in sample["quads"]:
            kind = rng.choice(["exact", "overlap", "wrong", "missing"])
            if kind == "exact":
                preds.append(dict(q))
                n_exact += 1
            elif kind == "overlap":
                # drop the leading article: still a located, intersecting interval
                preds.append(dict(q, opinion_expression=q["opinion_expression"].split(" ", 1)[1]))
                n_overlap += 1
            elif kind == "wrong":
                flipped = SENTIMENTS[(SENTIMENTS.index(q["sentiment"]) + 1) % 4]
                preds.append(dict(q, sentiment=flipped))
        n_spurious = rng.randint(0, 1)
        for _ in range(n_spurious):
            preds.append({"target": "ghost", "aspect_category": "price", "sentiment": "positive",
                          "opinion_expression": "ghost"})
        rng.shuffle(preds)
        rows.append({"sample": sample, "preds": preds})
        manifest_rows.append({"id": sample["id"], "gold": n_gold, "pred": len(preds),
                              "strict_tp": n_exact, "relaxed_tp": n_exact + n_overlap})
        totals.update(gold=n_gold, pred=len(preds), strict_tp=n_exact, relaxed_tp=n_exact + n_overlap,
                      **{f"{sample['language']}_gold": n_gold})
    dump_jsonl(OUT / "scoring25.jsonl", rows)
    (OUT / "scoring25_manifest.json").write_text(
        json.dumps({"samples": manifest_rows, "totals": dict(totals)}, indent=2) + "\n"
    )


if __name__ == "__main__":
    OUT.mkdir(parents=True, exist_ok=True)
    stats_fixture(50, 3, "stats50")
    domain_fixtures()
    scoring_fixture()
    print("fixtures written to", OUT)
