"""Watch a phrasal constraint get started, aborted, and re-emitted.

The scripted scorer strongly prefers continuing "a" with "c", so the natural
output begins with the prefix of the required phrase [a b] without completing
it. The decoder starts the phrase, unwinds it when the hypothesis diverges,
and places the full phrase later.
"""

from lexbeam import DecodeConfig, TableScorer, Vocabulary, build_constraint_set, decode
from lexbeam.constraints import advance, fresh_state

vocab = Vocabulary(["<s>", "</s>", "<unk>", "a", "b", "c"])
scorer = TableScorer(
    {
        "<s>": {"a": 0.8, "c": 0.1, "<unk>": 0.06, "</s>": 0.04},
        "<s> a": {"c": 0.8, "a": 0.1, "<unk>": 0.06, "</s>": 0.04},
        "<s> a c": {"a": 0.8, "c": 0.1, "<unk>": 0.06, "</s>": 0.04},
        "<s> a c a": {"b": 0.8, "a": 0.1, "<unk>": 0.06, "</s>": 0.04},
        "<s> a c a b": {"</s>": 0.9, "a": 0.04, "c": 0.03, "<unk>": 0.03},
    },
    vocab,
)

cset = build_constraint_set([[3, 4]])  # phrase "a b"
config = DecodeConfig(beam_size=3, max_length=6, prune_threshold=0.0, algorithm="dba")
result = decode(scorer, vocab, cset, config)

print(f"output: {result.output_text!r}   (phrase 'a b' required)")
print()
print("progress through the constraint, token by token:")
state = fresh_state(cset)
for tok in result.output_tokens:
    state = advance(state, cset, tok)
    note = ""
    if state.in_progress is not None:
        note = "phrase in progress"
    print(f"  after {vocab.surface(tok):6s} met tokens = {state.num_met}  {note}")
print()
print("the dip back to 0 is the unwind: the begun phrase was abandoned when")
print("the higher-probability continuation 'c' was chosen, then re-emitted.")
