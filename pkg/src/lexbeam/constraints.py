"""Constraint bookkeeping: per-sentence constraint sets and per-hypothesis progress.

A constraint is a non-empty token-id sequence that must appear contiguously in
the output. Progress is counted in tokens: a hypothesis that has produced the
first two tokens of a three-token phrase has met two constraint tokens. Only
one phrase can be partially complete ("in progress") at a time; producing a
token that does not continue the in-progress phrase resets (unwinds) its
partial progress, after which the same token may start another phrase, or
restart the same one.
"""

from __future__ import annotations


class ConstraintError(ValueError):
    """Raised for malformed constraint input (e.g. an empty phrase)."""


class ConstraintSet:
    """Immutable list of constraint phrases for one sentence.

    ``total_tokens`` is the token count summed over all phrases; single-token
    and multi-token phrases are not distinguished when counting. Duplicate
    phrases are kept as separate entries and must each be satisfied.
    """

    __slots__ = ("phrases", "total_tokens", "_starts")

    def __init__(self, phrases: list[tuple[int, ...]] | tuple[tuple[int, ...], ...]):
        for p in phrases:
            if len(p) == 0:
                raise ConstraintError("constraint phrase must contain at least one token")
        self.phrases = tuple(tuple(p) for p in phrases)
        self.total_tokens = sum(len(p) for p in self.phrases)
        # first token -> phrase indices that start with it, in input order
        starts: dict[int, list[int]] = {}
        for i, p in enumerate(self.phrases):
            starts.setdefault(p[0], []).append(i)
        self._starts = {tok: tuple(idx) for tok, idx in starts.items()}

    def __len__(self) -> int:
        return len(self.phrases)

    def __repr__(self) -> str:
        return f"ConstraintSet({list(self.phrases)!r})"


EMPTY_SET = ConstraintSet([])


def build_constraint_set(raw: list[list[int]] | list[tuple[int, ...]]) -> ConstraintSet:
    """Build a ConstraintSet from token-id sequences, preserving input order."""
    return ConstraintSet([tuple(seq) for seq in raw])


class ConstraintState:
    """Progress of one hypothesis through a ConstraintSet.

    ``met`` holds, per phrase, how many of its leading tokens are currently
    met; ``in_progress`` is the index of the unique phrase with partial
    progress (strictly between 0 and its length), or None. Instances are
    immutable values; `advance` returns a new state (or the same object when
    nothing changes).
    """

    __slots__ = ("met", "in_progress", "num_met")

    def __init__(self, met: tuple[int, ...], in_progress: int | None, num_met: int):
        self.met = met
        self.in_progress = in_progress
        self.num_met = num_met

    def __eq__(self, other: object) -> bool:
        return (
            isinstance(other, ConstraintState)
            and self.met == other.met
            and self.in_progress == other.in_progress
        )

    def __hash__(self) -> int:
        return hash((self.met, self.in_progress))

    def __repr__(self) -> str:
        return f"ConstraintState(met={self.met}, in_progress={self.in_progress})"


def fresh_state(cset: ConstraintSet) -> ConstraintState:
    return ConstraintState((0,) * len(cset.phrases), None, 0)


def _start_phrase(state: ConstraintState, cset: ConstraintSet, token: int) -> ConstraintState | None:
    """Start (or complete, if single-token) the lowest-index unstarted phrase
    whose first token matches, or None if no phrase starts with `token`."""
    for idx in cset._starts.get(token, ()):
        if state.met[idx] == 0:
            met = list(state.met)
            met[idx] = 1
            in_prog = idx if len(cset.phrases[idx]) > 1 else None
            return ConstraintState(tuple(met), in_prog, state.num_met + 1)
    return None


def advance(state: ConstraintState, cset: ConstraintSet, token: int) -> ConstraintState:
    """Deterministic transition for one generated token.

    In order: extend the in-progress phrase if the token matches its next
    needed token; otherwise unwind the in-progress phrase to zero; then let
    the token start the lowest-index unstarted phrase it begins (possibly the
    one just unwound). A token advances at most one phrase.
    """
    prog = state.in_progress
    if prog is not None:
        phrase = cset.phrases[prog]
        pos = state.met[prog]
        if phrase[pos] == token:
            met = list(state.met)
            met[prog] = pos + 1
            in_prog = prog if pos + 1 < len(phrase) else None
            return ConstraintState(tuple(met), in_prog, state.num_met + 1)
        # unwind, then fall through to the restart scan
        met = list(state.met)
        met[prog] = 0
        unwound = ConstraintState(tuple(met), None, state.num_met - pos)
        return _start_phrase(unwound, cset, token) or unwound
    started = _start_phrase(state, cset, token)
    return started if started is not None else state


def next_needed_tokens(state: ConstraintState, cset: ConstraintSet) -> set[int]:
    """Tokens that would advance constraint progress from this state.

    The union of the in-progress phrase's next token and the first token of
    every unstarted phrase; empty exactly when all constraints are met.
    """
    needed: set[int] = set()
    if state.in_progress is not None:
        prog = state.in_progress
        needed.add(cset.phrases[prog][state.met[prog]])
    for i, phrase in enumerate(cset.phrases):
        if state.met[i] == 0:
            needed.add(phrase[0])
    return needed


def eos_allowed(state: ConstraintState, cset: ConstraintSet) -> bool:
    """A hypothesis may finish only once every constraint token is met."""
    return state.num_met == cset.total_tokens


def replay(cset: ConstraintSet, tokens: list[int] | tuple[int, ...]) -> ConstraintState:
    """Fold `advance` over a token history from a fresh state."""
    state = fresh_state(cset)
    for tok in tokens:
        state = advance(state, cset, tok)
    return state
