"""Exhaustive constrained search over tiny instances.

Enumerates every EOS-terminated sequence up to a length bound, scores each one
exactly, filters by a direct substring scan (independent of the constraint
state machine), and returns the best by length-normalized score. Ground truth
for the decoder's optimality, equivalence, and monotonicity tests; refuses
instances beyond a hard size guard and never prunes.
"""

from __future__ import annotations

from dataclasses import dataclass

from .constraints import ConstraintSet
from .vocab import BOS_ID, EOS_ID, Vocabulary

SIZE_GUARD = 10_000_000


class SearchSpaceError(ValueError):
    """The instance is too large to enumerate exhaustively."""


@dataclass
class OracleResult:
    best_tokens: tuple[int, ...] | None  # [BOS, ..., EOS], or None if unsatisfiable
    best_normalized_score: float | None
    num_sequences_scanned: int


def contains_phrase(tokens, phrase) -> bool:
    """True if `phrase` occurs contiguously in `tokens`."""
    n, m = len(tokens), len(phrase)
    first = phrase[0]
    for i in range(n - m + 1):
        if tokens[i] == first and tuple(tokens[i : i + m]) == tuple(phrase):
            return True
    return False


def satisfies(tokens, constraint_set: ConstraintSet) -> bool:
    """Direct scan: every phrase occurs contiguously and in internal order."""
    return all(contains_phrase(tokens, p) for p in constraint_set.phrases)


def exhaustive_best(
    scorer,
    vocab: Vocabulary,
    constraint_set: ConstraintSet,
    max_length: int,
    *,
    source: str | None = None,
) -> OracleResult:
    """Best satisfying sequence of generated length <= max_length.

    Sequences are compared by normalized score (raw / generated length); exact
    ties go to the shorter sequence, then the lexicographically smaller one.
    """
    target = vocab.target_size
    if target**max_length > SIZE_GUARD:
        raise SearchSpaceError(
            f"|V_T|^N = {target}^{max_length} exceeds the enumeration guard ({SIZE_GUARD})"
        )
    extendable = [t for t in range(len(vocab)) if t not in (BOS_ID, EOS_ID)]
    scanned = 0
    best_key: tuple | None = None
    best: tuple[tuple[int, ...], float] | None = None
    # frontier of unfinished prefixes, expanded one depth level per batch step
    frontier: list[tuple[tuple[int, ...], float]] = [((BOS_ID,), 0.0)]
    for depth in range(1, max_length + 1):
        rows = scorer.step([list(toks) for toks, _ in frontier], source)
        next_frontier: list[tuple[tuple[int, ...], float]] = []
        for (toks, raw), row in zip(frontier, rows):
            eos_raw = raw + float(row[EOS_ID])
            scanned += 1
            seq = toks + (EOS_ID,)
            if eos_raw != -float("inf") and satisfies(seq, constraint_set):
                norm = eos_raw / depth
                key = (-norm, depth, seq)
                if best_key is None or key < best_key:
                    best_key = key
                    best = (seq, norm)
            if depth < max_length:
                for tok in extendable:
                    score = float(row[tok])
                    if score != -float("inf"):
                        next_frontier.append((toks + (tok,), raw + score))
        frontier = next_frontier
        if not frontier:
            break
    if best is None:
        return OracleResult(None, None, scanned)
    return OracleResult(best[0], best[1], scanned)
