"""Shared builders for tests: small vocabularies, random scorers, constraint draws."""

from __future__ import annotations

import numpy as np

from lexbeam import NGramScorer, Vocabulary, train_ngram
from lexbeam.vocab import NUM_RESERVED


def make_vocab(*extra: str) -> Vocabulary:
    return Vocabulary(["<s>", "</s>", "<unk>", *extra])


def random_corpus(rng: np.random.Generator, vocab: Vocabulary, lines: int = 8) -> list[str]:
    words = list(vocab.tokens[NUM_RESERVED:])
    out = []
    for _ in range(lines):
        n = int(rng.integers(2, 9))
        out.append(" ".join(rng.choice(words) for _ in range(n)))
    return out


def random_ngram(rng: np.random.Generator, vocab: Vocabulary, order: int = 3) -> NGramScorer:
    return train_ngram(random_corpus(rng, vocab), order, 0.1, vocab)


def disjoint_phrases(
    rng: np.random.Generator, vocab: Vocabulary, total_tokens: int
) -> list[list[int]]:
    """Random constraint phrases with distinct tokens and pairwise-disjoint
    supports, so greedy state-machine satisfaction coincides with a plain
    substring scan (see test_oracle for the argument)."""
    pool = list(range(NUM_RESERVED, len(vocab)))
    rng.shuffle(pool)
    assert total_tokens <= len(pool)
    phrases = []
    taken = 0
    while taken < total_tokens:
        length = int(rng.integers(1, min(3, total_tokens - taken) + 1))
        phrases.append(pool[taken : taken + length])
        taken += length
    return phrases
