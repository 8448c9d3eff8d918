"""Force words and phrases into a decoder's output.

Trains a small n-gram model on a toy corpus and decodes the same input
unconstrained, with a word constraint, and with a phrasal constraint. The
constrained outputs must contain the required tokens; the model score can
only get worse, typically a little.
"""

from lexbeam import (
    DecodeConfig,
    Vocabulary,
    build_constraint_set,
    decode,
    tokenize,
    train_ngram,
)

vocab = Vocabulary(
    ["<s>", "</s>", "<unk>", "the", "cat", "dog", "sat", "on", "mat", "rug", "big"]
)
corpus = [
    "the cat sat on the mat",
    "the dog sat on the rug",
    "the big cat sat on the rug",
    "the big dog sat on the mat",
]
model = train_ngram(corpus, order=3, alpha=0.1, vocab=vocab)
config = DecodeConfig(beam_size=10, max_length=12, prune_threshold=20.0, algorithm="dba")

for constraints in [[], ["dog"], ["big dog"], ["rug", "big"]]:
    cset = build_constraint_set([tokenize(c, vocab) for c in constraints])
    result = decode(model, vocab, cset, config)
    print(
        f"constraints={constraints!r:24s} -> {result.output_text!r:38s} "
        f"(normalized {result.normalized_score:+.3f}, met={result.constraints_met})"
    )
