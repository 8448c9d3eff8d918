"""Drive the decoder from a host-provided scoring callback.

The lexbeam-bindings package (in bindings/) exposes the engine to external
models: the host hands over one function that maps a batch of histories to a
matrix of next-token log-probabilities, and gets back a plain result record.
Here the "external model" is just a replayed built-in scorer, which must give
results identical to calling the engine natively.
"""

from lexbeam import DecodeConfig, UniformScorer, Vocabulary, build_constraint_set
from lexbeam import decode as native_decode
from lexbeam_bindings import decode as callback_decode

vocab = Vocabulary(["<s>", "</s>", "<unk>", "a", "b"])
scorer = UniformScorer(vocab)
config = DecodeConfig(beam_size=4, max_length=5, prune_threshold=0.0)


def host_model(histories, source):
    # a real host would run its neural model here; shape (len(histories), |V|)
    return scorer.step(histories, source)


constraints = [[vocab.lookup("b")]]
bound = callback_decode(host_model, vocab, constraints, config)
native = native_decode(scorer, vocab, build_constraint_set(constraints), config)

print("via callback:", bound["output_text"], bound["raw_score"])
print("native      :", native.output_text, native.raw_score)
assert tuple(bound["output_tokens"]) == native.output_tokens
assert bound["raw_score"] == native.raw_score
print("identical output and scores.")
