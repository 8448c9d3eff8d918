"""Next-token scorers.

Every scorer implements one operation: ``step(histories, source=None)``
returns a ``len(histories) x len(vocab)`` float64 matrix of log-probabilities,
one row per history. Rows are valid log-distributions (log-sum-exp 0 within
1e-6) over the predictable vocabulary; the BOS column is fixed at -inf because
BOS is never generated. Scorers are immutable after construction and `step`
is reentrant: row i depends only on ``histories[i]`` (and the source), so
concurrent callers are safe.

Four scorers are provided: uniform (baseline/ties), table-driven (scripted
fixtures), an add-alpha n-gram language model (deterministic stand-in for a
neural model), and a seeded hash-based synthetic scorer for benchmarking.
"""

from __future__ import annotations

import json
import math

import numpy as np

from .vocab import Vocabulary


class ScorerContractError(ValueError):
    """A scorer was driven outside its contract (bad history, bad table)."""


def check_histories(histories: list, vocab: Vocabulary) -> None:
    """Histories must be non-empty, begin with BOS, and contain no EOS."""
    if not histories:
        raise ScorerContractError("step() requires at least one history")
    for i, hist in enumerate(histories):
        if not hist or hist[0] != vocab.bos_id:
            raise ScorerContractError(f"history {i} does not begin with BOS: {list(hist)!r}")
        if vocab.eos_id in hist:
            raise ScorerContractError(f"history {i} contains EOS; finished hypotheses are not scored")


def validate_score_matrix(matrix: np.ndarray, num_rows: int, vocab_size: int, tol: float = 1e-6) -> None:
    """Check the matrix shape and the per-row log-normalization invariant."""
    if matrix.shape != (num_rows, vocab_size):
        raise ScorerContractError(
            f"score matrix shape {matrix.shape} != ({num_rows}, {vocab_size})"
        )
    if np.any(matrix > 0.0):
        raise ScorerContractError("score matrix contains positive log-probabilities")
    lse = _log_sum_exp_rows(matrix)
    if np.any(np.abs(lse) > tol):
        raise ScorerContractError(f"rows are not normalized: log-sum-exp up to {np.abs(lse).max():.3g}")


def _log_sum_exp_rows(matrix: np.ndarray) -> np.ndarray:
    m = np.max(matrix, axis=1)
    # rows of all -inf would yield nan; no scorer produces them
    return m + np.log(np.sum(np.exp(matrix - m[:, None]), axis=1))


class UniformScorer:
    """log(1/|V_T|) for every predictable token, every context."""

    def __init__(self, vocab: Vocabulary):
        self.vocab = vocab
        self.vocab_size = len(vocab)
        row = np.full(self.vocab_size, -math.log(vocab.target_size))
        row[vocab.bos_id] = -np.inf
        self._row = row

    def step(self, histories: list, source: str | None = None) -> np.ndarray:
        check_histories(histories, self.vocab)
        return np.tile(self._row, (len(histories), 1))


class TableScorer:
    """Scripted distributions keyed by the full history's surface forms.

    The table maps a context key (the space-joined surfaces of the history,
    BOS included) to ``{token surface: probability}``. A context may also be
    keyed per source as ``"<source> ||| <context>"``; plain context keys are
    consulted next, and missing contexts fall back to the uniform
    distribution. Listed probabilities must sum to 1 within 1e-6; unlisted
    tokens get probability zero.
    """

    def __init__(self, table: dict[str, dict[str, float]], vocab: Vocabulary):
        self.vocab = vocab
        self.vocab_size = len(vocab)
        self._rows: dict[str, np.ndarray] = {}
        for context, dist in table.items():
            total = sum(dist.values())
            if abs(total - 1.0) > 1e-6:
                raise ScorerContractError(
                    f"table context {context!r}: probabilities sum to {total}, not 1"
                )
            row = np.full(self.vocab_size, -np.inf)
            for surf, prob in dist.items():
                tid = vocab.lookup(surf)
                if tid == vocab.bos_id:
                    raise ScorerContractError(f"table context {context!r} assigns mass to BOS")
                if prob > 0.0:
                    row[tid] = math.log(prob)
            self._rows[context] = row
        uniform = np.full(self.vocab_size, -math.log(vocab.target_size))
        uniform[vocab.bos_id] = -np.inf
        self._uniform = uniform

    @classmethod
    def from_file(cls, path: str, vocab: Vocabulary) -> "TableScorer":
        with open(path, encoding="utf-8") as fh:
            return cls(json.load(fh), vocab)

    def step(self, histories: list, source: str | None = None) -> np.ndarray:
        check_histories(histories, self.vocab)
        out = np.empty((len(histories), self.vocab_size))
        for i, hist in enumerate(histories):
            context = " ".join(self.vocab.surface(t) for t in hist)
            row = None
            if source is not None:
                row = self._rows.get(f"{source} ||| {context}")
            if row is None:
                row = self._rows.get(context, self._uniform)
            out[i] = row
        return out


class NGramScorer:
    """Add-alpha smoothed n-gram language model.

    ``P(token | context) = (count(context, token) + alpha) /
    (count(context) + alpha * |V_T|)`` where |V_T| excludes BOS. Contexts are
    the last ``order - 1`` tokens of the history, left-padded with BOS.
    """

    def __init__(
        self,
        vocab: Vocabulary,
        order: int,
        alpha: float,
        ngram_counts: dict[tuple[int, ...], dict[int, int]],
        context_counts: dict[tuple[int, ...], int],
    ):
        if order < 1:
            raise ValueError(f"order must be >= 1, got {order}")
        if alpha <= 0:
            raise ValueError(f"alpha must be > 0, got {alpha}")
        self.vocab = vocab
        self.vocab_size = len(vocab)
        self.order = order
        self.alpha = alpha
        self.ngram_counts = ngram_counts
        self.context_counts = context_counts

    def context_of(self, history) -> tuple[int, ...]:
        """The last order-1 tokens of a history, BOS-padded on the left."""
        if self.order == 1:
            return ()
        ctx = tuple(history[-(self.order - 1):])
        if len(ctx) < self.order - 1:
            ctx = (self.vocab.bos_id,) * (self.order - 1 - len(ctx)) + ctx
        return ctx

    def probability(self, context: tuple[int, ...], token: int) -> float:
        if token == self.vocab.bos_id:
            return 0.0
        denom = self.context_counts.get(context, 0) + self.alpha * self.vocab.target_size
        return (self.ngram_counts.get(context, {}).get(token, 0) + self.alpha) / denom

    def step(self, histories: list, source: str | None = None) -> np.ndarray:
        check_histories(histories, self.vocab)
        out = np.empty((len(histories), self.vocab_size))
        alpha = self.alpha
        cache: dict[tuple[int, ...], np.ndarray] = {}
        for i, hist in enumerate(histories):
            ctx = self.context_of(hist)
            row = cache.get(ctx)
            if row is None:
                denom = self.context_counts.get(ctx, 0) + alpha * self.vocab.target_size
                probs = np.full(self.vocab_size, alpha / denom)
                for tok, count in self.ngram_counts.get(ctx, {}).items():
                    probs[tok] = (count + alpha) / denom
                probs[self.vocab.bos_id] = 0.0
                with np.errstate(divide="ignore"):
                    row = np.log(probs)
                cache[ctx] = row
            out[i] = row
        return out

    def save(self, path: str) -> None:
        payload = {
            "order": self.order,
            "alpha": self.alpha,
            "vocab": list(self.vocab.tokens),
            "ngram_counts": {
                " ".join(map(str, ctx)): {str(t): c for t, c in dist.items()}
                for ctx, dist in self.ngram_counts.items()
            },
            "context_counts": {
                " ".join(map(str, ctx)): c for ctx, c in self.context_counts.items()
            },
        }
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(payload, fh)

    @classmethod
    def load(cls, path: str) -> "NGramScorer":
        with open(path, encoding="utf-8") as fh:
            payload = json.load(fh)

        def parse_ctx(key: str) -> tuple[int, ...]:
            return tuple(int(t) for t in key.split()) if key else ()

        return cls(
            vocab=Vocabulary(payload["vocab"]),
            order=payload["order"],
            alpha=payload["alpha"],
            ngram_counts={
                parse_ctx(k): {int(t): c for t, c in dist.items()}
                for k, dist in payload["ngram_counts"].items()
            },
            context_counts={parse_ctx(k): c for k, c in payload["context_counts"].items()},
        )


def train_ngram(corpus_lines: list[str], order: int, alpha: float, vocab: Vocabulary) -> NGramScorer:
    """Collect n-gram counts with (order-1) BOS pads and one EOS per line."""
    from .vocab import tokenize

    if order < 1:
        raise ValueError(f"order must be >= 1, got {order}")
    if alpha <= 0:
        raise ValueError(f"alpha must be > 0, got {alpha}")
    if not corpus_lines:
        raise ValueError("training corpus is empty")
    ngram_counts: dict[tuple[int, ...], dict[int, int]] = {}
    context_counts: dict[tuple[int, ...], int] = {}
    pad = (vocab.bos_id,) * (order - 1)
    for line in corpus_lines:
        seq = pad + tuple(tokenize(line, vocab)) + (vocab.eos_id,)
        for i in range(order - 1, len(seq)):
            ctx = seq[i - order + 1 : i]
            tok = seq[i]
            dist = ngram_counts.setdefault(ctx, {})
            dist[tok] = dist.get(tok, 0) + 1
            context_counts[ctx] = context_counts.get(ctx, 0) + 1
    return NGramScorer(vocab, order, alpha, ngram_counts, context_counts)


# 64-bit mixing constants (splitmix64 finalizer)
_GAMMA = np.uint64(0x9E3779B97F4A7C15)
_MIX1 = np.uint64(0xBF58476D1CE4E5B9)
_MIX2 = np.uint64(0x94D049BB133111EB)
_U30 = np.uint64(30)
_U27 = np.uint64(27)
_U31 = np.uint64(31)
_U11 = np.uint64(11)
_TO_UNIT = float(2.0**-53)


def _splitmix64(z: np.ndarray) -> np.ndarray:
    with np.errstate(over="ignore"):  # modular 64-bit arithmetic is the point
        z = (z + _GAMMA).astype(np.uint64)
        z = (z ^ (z >> _U30)) * _MIX1
        z = (z ^ (z >> _U27)) * _MIX2
        return z ^ (z >> _U31)


class SyntheticScorer:
    """Deterministic pseudo-random scorer for benchmarking.

    Entry (i, j) is derived from a splitmix64 hash of (seed, histories[i], j),
    mapped to [0, 1) and row-normalized with log-softmax. Pure integer mixing
    keeps results identical across runs and platforms. Requires a vocabulary
    of at least 4 tokens.
    """

    def __init__(self, vocab: Vocabulary, seed: int = 0):
        if len(vocab) < 4:
            raise ValueError(f"synthetic scorer needs vocab size >= 4, got {len(vocab)}")
        self.vocab = vocab
        self.vocab_size = len(vocab)
        self.seed = seed
        self._h0 = _splitmix64(np.uint64(seed & 0xFFFFFFFFFFFFFFFF))
        # column hashes are history-independent; mix them once
        cols = np.arange(self.vocab_size, dtype=np.uint64)
        self._col_mix = _splitmix64(cols ^ _splitmix64(self._h0 + np.uint64(1)))

    def _row_states(self, histories: list) -> np.ndarray:
        h = np.full(len(histories), self._h0, dtype=np.uint64)
        lengths = np.fromiter((len(x) for x in histories), dtype=np.int64, count=len(histories))
        if lengths.min() == lengths.max():
            arr = np.asarray([list(x) for x in histories], dtype=np.uint64)
            for pos in range(arr.shape[1]):
                h = _splitmix64(h ^ (arr[:, pos] + np.uint64(1)))
        else:
            for i, hist in enumerate(histories):
                hi = h[i]
                for tok in hist:
                    hi = _splitmix64(hi ^ (np.uint64(tok) + np.uint64(1)))
                h[i] = hi
        return h

    def step(self, histories: list, source: str | None = None) -> np.ndarray:
        check_histories(histories, self.vocab)
        h = self._row_states(histories)
        # splitmix64 finalizer of (row state ^ column hash), written with
        # in-place ops; this matrix is the per-step hot path
        with np.errstate(over="ignore"):
            z = h[:, None] ^ self._col_mix[None, :]
            z += _GAMMA
            t = z >> _U30
            z ^= t
            z *= _MIX1
            np.right_shift(z, _U27, out=t)
            z ^= t
            z *= _MIX2
            np.right_shift(z, _U31, out=t)
            z ^= t
            np.right_shift(z, _U11, out=z)
        logits = z * _TO_UNIT
        logits[:, self.vocab.bos_id] = -np.inf
        # logits lie in [0, 1), so the log-sum-exp needs no max shift
        lse = np.log(np.sum(np.exp(logits), axis=1, keepdims=True))
        logits -= lse
        return logits


def rescore(scorer, tokens, source: str | None = None) -> float:
    """Cumulative log-probability of a token sequence (starting with BOS)."""
    total = 0.0
    for t in range(1, len(tokens)):
        row = scorer.step([list(tokens[:t])], source)[0]
        total += float(row[tokens[t]])
    return total
