"""
Corpus statistics
=================

``compute_stats`` gives per-language counts, the share of implicit
targets and a histogram of quads per sample. Stats of disjoint splits add.
"""

from pathlib import Path

from quadkit.dataset import compute_stats, load_dataset
from quadkit.report import stats_table

path = Path(__file__).resolve().parent.parent / "tests" / "data" / "stats50.jsonl"
split = load_dataset(path)
stats = compute_stats(split)
print(stats_table(path.stem, stats))

###############################################################################
# Splitting and re-adding gives back the same numbers.

half = len(split.samples) // 2
first = compute_stats(split.samples[:half])
second = compute_stats(split.samples[half:])
print((first + second).to_dict() == stats.to_dict())
