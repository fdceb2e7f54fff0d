"""
Building an instruction set
===========================

Each sample is rendered into a one-shot prompt using its domain taxonomy.
The gold answer is serialised as single-line JSON with quads in text order.
"""

from quadkit.dataset import DatasetSplit
from quadkit.model import Quad, Sample, load_taxonomy, package_resource
from quadkit.prompts import build_instruction_set, default_template, render_prompt

taxonomy = load_taxonomy(package_resource("taxonomies", "ps_example.json"))
print(len(taxonomy.labels), "categories:", ", ".join(taxonomy.labels))

print(render_prompt(taxonomy, default_template(), "The roaming fees are outrageous."))

###############################################################################
# Pairs are shuffled with a seed, so the same seed gives the same file.

text = "Support was quick, the invoice was wrong."
samples = [
    Sample(f"s{i}", text, "en", taxonomy.domain_id,
           (Quad("Support", "customer_support", "positive", "Support was quick"),
            Quad("invoice", "billing", "negative", "the invoice was wrong")))
    for i in range(5)
]
pairs = build_instruction_set([(taxonomy, DatasetSplit("demo", samples))], "english_only", seed=7)
print([p.sample_id for p in pairs])
print(pairs[0].assistant)
