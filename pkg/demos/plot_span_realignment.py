"""
Realigning a misquoted span
===========================

Models often copy a phrase from the input almost but not exactly.
``align`` looks for the word-aligned span of the text that is closest to
the prediction by normalised edit distance.
"""

from quadkit.align import AlignConfig, align, enumerate_spans, similarity

text = "I love New Yrok Citee --- it is the best!"

# every contiguous run of up to 30 words is a candidate
spans = enumerate_spans(text)
print(len(spans), "candidate spans")

outcome = align("New York City", text)
print(outcome.replacement.text, round(outcome.similarity, 4))

###############################################################################
# A verbatim prediction is returned as is, without scoring any candidate.

print(align("it is the best", text))

###############################################################################
# The similarity floor rejects predictions that match nothing.

print(align("quantum chromodynamics", text).replacement)
print(align("quantum chromodynamics", text, AlignConfig(min_similarity=0.0)).replacement)

###############################################################################
# Similarity is one minus edit distance over the longer length.

for a, b in [("costs", "cost"), ("costs", "cost?"), ("kitten", "sitting")]:
    print(f"{a!r:>10} {b!r:>10} {similarity(a, b):.3f}")
