"""Record the JSON-repair conformance corpus.

Runs the third-party ``json_repair`` library over a fixed set of malformed
model outputs and freezes its results as ``expected.json`` files (or an
``INVALID`` marker) under ``tests/data/mend_corpus``. Run once, before
touching ``quadkit.mend``; the corpus is then the contract.

    pip install json_repair
    python tools/record_mend_oracle.py
"""

import json
from pathlib import Path

import json_repair

OUT = Path(__file__).resolve().parent.parent / "tests" / "data" / "mend_corpus"

# Cases where quadkit deliberately differs from the library: the first
# balanced region wins and trailing values are discarded.
OVERRIDES = {
    "trailing_garbage_two_objects": {"a": 1},
}

CASES = {
 "valid_object": '{"a": 1}',
 "valid_wrapper": '{"aspect_based_sentiment_analysis": [{"target": "TV", "aspect_category": "reliability", "sentiment": "positive", "opinion_expression": "My new TV never breaks down"}]}',
 "valid_array": '[1, 2, 3]',
 "valid_unicode": '{"target": "café", "opinion_expression": "très bien"}',
 "fence_single_quotes": "```json\n{'aspect_based_sentiment_analysis': []}\n```",
 "fence_plain": '```\n{"a": [1, 2]}\n```',
 "fence_with_prose": 'Here is the analysis:\n```json\n{"aspect_based_sentiment_analysis": [{"target": "NULL", "aspect_category": "price", "sentiment": "negative", "opinion_expression": "too expensive"}]}\n```\nLet me know if you need more.',
 "truncated_array": '{"a": [1, 2',
 "truncated_string": '{"aspect_based_sentiment_analysis": [{"target": "app", "aspect_category": "usability", "sentiment": "positive", "opinion_expression": "easy to us',
 "truncated_after_colon_value": '{"a": {"b": "c"',
 "truncated_nested": '{"aspect_based_sentiment_analysis": [{"target": "TV", "sentiment": "positive"}',
 "trailing_comma_object": '{"a": 1, "b": 2,}',
 "trailing_comma_array": '{"a": [1, 2, 3,]}',
 "trailing_comma_nested": '{"aspect_based_sentiment_analysis": [{"target": "TV", "sentiment": "positive",},]}',
 "single_quotes_all": "{'target': 'TV', 'sentiment': 'positive'}",
 "single_quotes_with_apostrophe_in_double": "{'target': \"the app's store\", 'sentiment': 'negative'}",
 "bare_keys": '{target: "TV", sentiment: "positive"}',
 "bare_keys_nested": '{aspect_based_sentiment_analysis: [{target: "NULL", aspect_category: "price", sentiment: "mixed", opinion_expression: "ok price"}]}',
 "python_literals": '{"a": True, "b": False, "c": None}',
 "python_dict_repr": "{'a': True, 'b': None, 'c': [1, 2]}",
 "prose_before": 'Sure! Here is the JSON you asked for: {"a": 1}',
 "prose_after": '{"a": 1} I hope this helps.',
 "prose_both": 'Answer:\n{"aspect_based_sentiment_analysis": []}\nThanks!',
 "missing_comma_objects": '[{"a": 1} {"b": 2}]',
 "missing_comma_pairs": '{"a": 1 "b": 2}',
 "missing_comma_strings": '["x" "y"]',
 "smart_quotes": '{“target”: “TV”}',
 "raw_newline_in_string": '{"opinion_expression": "line one\nline two"}',
 "raw_tab_in_string": '{"opinion_expression": "a\tb"}',
 "unclosed_brace_only": '{"a": 1',
 "unclosed_two_levels": '{"a": {"b": [true, false',
 "empty_fence_array": "```json\n[]\n```",
 "nested_arrays": '{"a": [[1, 2], [3, 4]]}',
 "numbers": '{"a": -1.5e3, "b": 0, "c": 12}',
 "trailing_garbage_two_objects": '{"a": 1}\n{"b": 2}',
 "no_json_at_all": 'I cannot answer that.',
 "empty_string": '',
 "only_whitespace": '   \n  ',
 "single_quote_wrapper_truncated": "{'aspect_based_sentiment_analysis': [{'target': 'TV', 'sentiment': 'positive'}",
 "mixed_issues": "```json\n{aspect_based_sentiment_analysis: [{'target': 'NULL', 'aspect_category': 'price', 'sentiment': 'negative', 'opinion_expression': 'too expensive',},]}\n```",
}


def main():
    OUT.mkdir(parents=True, exist_ok=True)
    for i, (name, raw) in enumerate(CASES.items()):
        case_dir = OUT / f"{i:03d}_{name}"
        case_dir.mkdir(exist_ok=True)
        for stale in ("expected.json", "INVALID"):
            (case_dir / stale).unlink(missing_ok=True)
        (case_dir / "raw.txt").write_text(raw, encoding="utf-8")
        value = OVERRIDES.get(name, json_repair.loads(raw))
        if value == "":
            (case_dir / "INVALID").write_text("", encoding="utf-8")
        else:
            (case_dir / "expected.json").write_text(
                json.dumps(value, ensure_ascii=False, indent=2) + "\n", encoding="utf-8"
            )
    print(f"wrote {len(CASES)} cases to {OUT}")


if __name__ == "__main__":
    main()
