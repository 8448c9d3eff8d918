"""Token/id mapping, request/result records, and whitespace (de)tokenization.

A vocabulary file is UTF-8 text with one token per line; the line number is
the token id and the first three lines must be the BOS, EOS, and UNK surface
forms. The BOS symbol is a pure history marker: scorers never assign it
probability mass, so the effective target vocabulary has ``len(vocab) - 1``
entries.
"""

from __future__ import annotations

from dataclasses import dataclass, field

BOS_ID = 0
EOS_ID = 1
UNK_ID = 2
NUM_RESERVED = 3


class Vocabulary:
    """Immutable bijection between surface tokens and integer ids.

    Safe for concurrent reads once constructed.
    """

    __slots__ = ("tokens", "bos_id", "eos_id", "unk_id", "_ids")

    def __init__(self, tokens: list[str] | tuple[str, ...]):
        if len(tokens) < NUM_RESERVED:
            raise ValueError(
                f"vocabulary needs at least {NUM_RESERVED} tokens (BOS, EOS, UNK), got {len(tokens)}"
            )
        ids: dict[str, int] = {}
        for i, tok in enumerate(tokens):
            if not tok or tok.split() != [tok]:
                raise ValueError(f"token {i} is empty or contains whitespace: {tok!r}")
            if tok in ids:
                raise ValueError(f"duplicate surface form {tok!r} (ids {ids[tok]} and {i})")
            ids[tok] = i
        self.tokens = tuple(tokens)
        self.bos_id = BOS_ID
        self.eos_id = EOS_ID
        self.unk_id = UNK_ID
        self._ids = ids

    def __len__(self) -> int:
        return len(self.tokens)

    @property
    def target_size(self) -> int:
        """Number of predictable tokens (everything except BOS)."""
        return len(self.tokens) - 1

    def lookup(self, token: str) -> int:
        """Id for a surface form; unknown forms map to the UNK id."""
        return self._ids.get(token, self.unk_id)

    def surface(self, token_id: int) -> str:
        if not 0 <= token_id < len(self.tokens):
            raise ValueError(f"token id {token_id} out of range (corrupted hypothesis?)")
        return self.tokens[token_id]


def load_vocabulary(path: str) -> Vocabulary:
    with open(path, encoding="utf-8") as fh:
        tokens = [line.rstrip("\n") for line in fh]
    while tokens and tokens[-1] == "":
        tokens.pop()
    return Vocabulary(tokens)


def save_vocabulary(vocab: Vocabulary, path: str) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for tok in vocab.tokens:
            fh.write(tok + "\n")


def tokenize(text: str, vocab: Vocabulary) -> list[int]:
    """Split on whitespace runs and map each surface form to its id."""
    return [vocab.lookup(tok) for tok in text.split()]


def detokenize(ids: list[int] | tuple[int, ...], vocab: Vocabulary) -> str:
    """Join surfaces with single spaces, omitting BOS and EOS."""
    skip = (vocab.bos_id, vocab.eos_id)
    return " ".join(vocab.surface(i) for i in ids if i not in skip)


@dataclass
class DecodeRequest:
    """One sentence to decode: optional source text plus raw constraint strings."""

    id: str
    text: str | None = None
    constraints: list[str] = field(default_factory=list)

    def __post_init__(self) -> None:
        for raw in self.constraints:
            if not raw.strip():
                raise ValueError(f"request {self.id!r}: constraint string is empty")


@dataclass
class DecodeResult:
    id: str
    output_tokens: tuple[int, ...]
    output_text: str
    raw_score: float
    normalized_score: float
    constraints_met: bool
    steps_used: int
