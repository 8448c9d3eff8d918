"""Thin bindings that let a host-provided scoring function drive the decoder.

The host supplies one callback ``fn(histories, source) -> log-probabilities``
(any nested-sequence or array form with one row per history). The engine calls
it once per time step with the full active-history batch, so callback overhead
is linear in output length, not beam size. Every reply is validated: the shape
must be ``(len(histories), vocab_size)`` and each row must be a normalized
log-distribution within 1e-4. Callback exceptions propagate wrapped with
decoding context.
"""

from __future__ import annotations

from typing import Callable, Sequence

import numpy as np

from lexbeam import DecodeConfig, Vocabulary, build_constraint_set, load_vocabulary
from lexbeam import decode as _native_decode

__all__ = ["CallbackError", "CallbackScorer", "DecodeConfig", "decode", "load_vocab"]


class CallbackError(RuntimeError):
    """The host callback failed or returned something unusable."""


def load_vocab(path: str) -> Vocabulary:
    return load_vocabulary(path)


class CallbackScorer:
    """Adapts a host scoring function to the engine's scorer interface."""

    def __init__(self, fn: Callable, vocab: Vocabulary):
        self.fn = fn
        self.vocab = vocab
        self.vocab_size = len(vocab)

    def step(self, histories: list, source: str | None = None) -> np.ndarray:
        try:
            raw = self.fn(histories, source)
        except Exception as exc:
            raise CallbackError(
                f"scoring callback raised at step for {len(histories)} histories "
                f"(first history length {len(histories[0]) if histories else 0}): {exc}"
            ) from exc
        matrix = np.asarray(raw, dtype=np.float64)
        expected = (len(histories), self.vocab_size)
        if matrix.ndim != 2 or matrix.shape != expected:
            raise CallbackError(
                f"scoring callback returned shape {matrix.shape}; expected "
                f"{expected} for a target vocabulary of {self.vocab_size} tokens"
            )
        with np.errstate(invalid="ignore"):
            m = np.max(matrix, axis=1)
            lse = m + np.log(np.sum(np.exp(matrix - m[:, None]), axis=1))
        if np.any(~np.isfinite(lse) | (np.abs(lse) > 1e-4)):
            raise CallbackError(
                "scoring callback rows are not log-normalized "
                "(log-sum-exp must be 0 within 1e-4)"
            )
        return matrix


def decode(
    callback: Callable,
    vocab: Vocabulary,
    constraints: Sequence[Sequence[int]],
    config: DecodeConfig | None = None,
    *,
    source: str | None = None,
    request_id: str = "",
) -> dict:
    """Decode one sentence with the host callback as the scorer.

    ``constraints`` is a list of token-id phrases. Returns a plain record so
    hosts never need the engine's internal types.
    """
    scorer = CallbackScorer(callback, vocab)
    result = _native_decode(
        scorer,
        vocab,
        build_constraint_set([list(p) for p in constraints]),
        config if config is not None else DecodeConfig(),
        source=source,
        request_id=request_id,
    )
    return {
        "id": result.id,
        "output_tokens": list(result.output_tokens),
        "output_text": result.output_text,
        "raw_score": result.raw_score,
        "normalized_score": result.normalized_score,
        "constraints_met": result.constraints_met,
        "steps_used": result.steps_used,
    }
