"""Beam-search engine: standard, dynamically bank-allocated (DBA), and grid (GBS) k-best.

The step loop is shared: score the active beam, pick the next beam with the
configured k-best rule, collect finished hypotheses, prune, stop. The three
k-best rules differ in how the next beam is selected from the score matrix:

* ``kbest_standard`` takes the k best extensions outright (the unconstrained
  baseline);
* ``kbest_dba`` builds a candidate set that guarantees constraint progress and
  divides the single fixed-size beam across constraint banks, re-allocating
  every step;
* ``kbest_gbs`` uses the same candidate set but a rigid bank layout of
  ``base_beam`` slots per bank (effective beam ``base_beam * (C + 1)``), with
  no adjustment.

Hypotheses may not generate EOS until all their constraint tokens are met.
Finished hypotheses move to a finished pool and also keep an inert beam slot
in the topmost bank, so "the whole beam is finished" is a well-defined stop
condition. All tie-breaking is total and documented (score, then lower beam
row, then lower token id, then earlier finish), which makes every decode
reproducible bit-for-bit.

The engine holds no state between calls; scorers and vocabularies are shared
and immutable, so concurrent decode calls are safe.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .constraints import (
    EMPTY_SET,
    ConstraintSet,
    ConstraintState,
    advance,
    eos_allowed,
    fresh_state,
    next_needed_tokens,
    replay,
)
from .scorers import ScorerContractError
from .vocab import BOS_ID, EOS_ID, DecodeResult, Vocabulary, detokenize

ALGORITHMS = ("beam", "dba", "gbs")


@dataclass
class DecodeConfig:
    beam_size: int = 10
    max_length: int = 50
    prune_threshold: float = 20.0  # raw log-prob gap; 0 disables
    early_stopping: bool = False
    algorithm: str = "dba"
    gbs_base_beam: int = 10

    def validate(self) -> None:
        if self.beam_size < 1:
            raise ValueError(f"beam_size must be >= 1, got {self.beam_size}")
        if self.max_length < 1:
            raise ValueError(f"max_length must be >= 1, got {self.max_length}")
        if self.prune_threshold < 0:
            raise ValueError(f"prune_threshold must be >= 0, got {self.prune_threshold}")
        if self.gbs_base_beam < 1:
            raise ValueError(f"gbs_base_beam must be >= 1, got {self.gbs_base_beam}")
        if self.algorithm not in ALGORITHMS:
            raise ValueError(f"algorithm must be one of {ALGORITHMS}, got {self.algorithm!r}")


@dataclass(slots=True)
class Hypothesis:
    """A complete token history (starting at BOS) with its cumulative score."""

    tokens: tuple[int, ...]
    raw_score: float
    cstate: ConstraintState
    finished: bool = False
    finished_at: int | None = None

    @property
    def generated(self) -> int:
        """Generated-token count: everything after BOS, EOS included."""
        return len(self.tokens) - 1

    @property
    def normalized_score(self) -> float:
        return self.raw_score / max(1, self.generated)


@dataclass(slots=True)
class Candidate:
    """One proposed beam entry: a (beam row, token) cell, or a finished carry-over.

    ``token`` is None for the single inert self-candidate each finished
    hypothesis contributes. ``bank`` counts met constraint tokens, including
    partial phrasal progress.
    """

    row: int
    token: int | None
    score: float
    new_cstate: ConstraintState
    bank: int


def initial_hypothesis(cset: ConstraintSet) -> Hypothesis:
    # advancing over BOS lets BOS-anchored (forced-prefix) phrases begin at position 1
    state = advance(fresh_state(cset), cset, BOS_ID)
    return Hypothesis(tokens=(BOS_ID,), raw_score=0.0, cstate=state)


def _top_cells(flat: np.ndarray, k: int) -> np.ndarray:
    """Indices of the k largest entries, ties resolved toward lower flat index.

    A flat index is row * vocab + token, so lower-index means lower beam row
    then lower token id.
    """
    n = flat.size
    if k >= n:
        return np.argsort(-flat, kind="stable")
    kth = np.partition(flat, n - k)[n - k]
    above = np.flatnonzero(flat > kth)
    ties = np.flatnonzero(flat == kth)
    return np.concatenate([above, ties[: k - above.size]])


def _active_rows(beam: list[Hypothesis]) -> list[int]:
    return [i for i, h in enumerate(beam) if not h.finished]


def _extension_scores(beam: list[Hypothesis], scores: np.ndarray, actives: list[int]) -> np.ndarray:
    if scores.shape[0] != len(actives):
        raise ScorerContractError(
            f"score matrix has {scores.shape[0]} rows for {len(actives)} active hypotheses"
        )
    parents = np.array([beam[i].raw_score for i in actives])
    return parents[:, None] + scores


def _cand_sort_key(cand: Candidate):
    # highest score first; ties: lower beam row, lower token id, finished
    # carry-overs (token None) ahead of same-scored new cells (earlier finish)
    return (-cand.score, cand.row, -1 if cand.token is None else cand.token)


def kbest_standard(beam: list[Hypothesis], scores: np.ndarray, k: int) -> list[Hypothesis]:
    """Plain top-k extension of the beam; EOS is always permitted."""
    actives = _active_rows(beam)
    entries: list[tuple[float, int, int]] = []  # (score, beam row, token)
    if actives:
        ext = _extension_scores(beam, scores, actives)
        flat = ext.ravel()
        vocab_size = ext.shape[1]
        for cell in _top_cells(flat, k):
            score = float(flat[cell])
            if score == -np.inf:
                continue
            entries.append((score, actives[int(cell) // vocab_size], int(cell) % vocab_size))
    new_beam: list[Hypothesis] = []
    ranked: list[tuple[tuple, Hypothesis | tuple]] = []
    for i, h in enumerate(beam):
        if h.finished:
            ranked.append(((-h.raw_score, i, -1), h))
    for score, row, token in entries:
        ranked.append(((-score, row, token), (score, row, token)))
    ranked.sort(key=lambda item: item[0])
    for _, payload in ranked[:k]:
        if isinstance(payload, Hypothesis):
            new_beam.append(payload)
        else:
            score, row, token = payload
            parent = beam[row]
            new_beam.append(
                Hypothesis(
                    tokens=parent.tokens + (token,),
                    raw_score=score,
                    cstate=parent.cstate,
                    finished=token == EOS_ID,
                )
            )
    return new_beam


def generate_candidates(
    beam: list[Hypothesis],
    scores: np.ndarray,
    constraint_set: ConstraintSet,
    k: int,
) -> list[Candidate]:
    """Union of the three candidate rules, deduplicated by (row, token).

    1. the k best cells of the whole extension matrix;
    2. for every hypothesis, each token that advances its constraints;
    3. for every hypothesis, its single best cell.

    EOS cells are excluded for hypotheses that have unmet constraints, and
    each finished hypothesis contributes exactly one unchanged carry-over.
    Cells with probability zero are never candidates: a hypothesis that could
    only be extended through an impossible token is a dead end, and keeping it
    would waste a bank slot that a viable hypothesis could use.
    """
    actives = _active_rows(beam)
    out: list[Candidate] = []
    seen: set[tuple[int, int]] = set()

    def add(row_pos: int, token: int, score: float) -> None:
        beam_row = actives[row_pos]
        if (beam_row, token) in seen:
            return
        seen.add((beam_row, token))
        parent = beam[beam_row]
        state = advance(parent.cstate, constraint_set, token)
        out.append(Candidate(beam_row, token, score, state, state.num_met))

    if actives:
        ext = _extension_scores(beam, scores, actives)
        vocab_size = ext.shape[1]
        for pos, beam_row in enumerate(actives):
            if not eos_allowed(beam[beam_row].cstate, constraint_set):
                ext[pos, EOS_ID] = -np.inf
        flat = ext.ravel()
        for cell in _top_cells(flat, k):
            score = float(flat[cell])
            if score == -np.inf:
                break  # -inf cells only appear in the unfillable tail
            add(int(cell) // vocab_size, int(cell) % vocab_size, score)
        for pos, beam_row in enumerate(actives):
            state = beam[beam_row].cstate
            for token in sorted(next_needed_tokens(state, constraint_set)):
                if token == EOS_ID:
                    continue  # gated: EOS inside a phrase can never be generated
                score = float(ext[pos, token])
                if score != -np.inf:
                    add(pos, token, score)
        row_best = np.argmax(ext, axis=1)
        for pos in range(len(actives)):
            token = int(row_best[pos])
            score = float(ext[pos, token])
            if score != -np.inf:
                add(pos, token, score)
    for i, h in enumerate(beam):
        if h.finished:
            out.append(Candidate(i, None, h.raw_score, h.cstate, h.cstate.num_met))
    return out


def allocate_banks(k: int, total_constraint_tokens: int) -> list[int]:
    """Even split of k slots over the C+1 banks; the remainder goes to bank C."""
    banks = total_constraint_tokens + 1
    base = k // banks
    alloc = [base] * banks
    alloc[-1] += k - base * banks
    return alloc


def adjust_allocation(alloc: list[int], bank_candidate_counts: list[int]) -> list[int]:
    """Redistribute slots from overfilled banks to banks with spare candidates.

    Overfilled banks are processed from the topmost down; each donates to the
    nearest demanding bank, the more-constrained neighbor first on distance
    ties. Surplus that no bank can absorb is dropped, so afterwards no bank
    exceeds its candidate count and the total is min(k, total candidates).
    """
    if len(alloc) != len(bank_candidate_counts):
        raise ValueError("allocation and candidate counts differ in length")
    slots = list(alloc)
    counts = bank_candidate_counts
    banks = len(slots)
    for b in range(banks - 1, -1, -1):
        surplus = slots[b] - counts[b]
        if surplus <= 0:
            continue
        slots[b] = counts[b]
        while surplus > 0:
            target = -1
            best_key = None
            for i in range(banks):
                if counts[i] > slots[i]:
                    key = (abs(i - b), -i)
                    if best_key is None or key < best_key:
                        best_key = key
                        target = i
            if target < 0:
                break  # nothing demanding; surplus is dropped
            give = min(surplus, counts[target] - slots[target])
            slots[target] += give
            surplus -= give
    return slots


def _fill_banks(
    beam: list[Hypothesis],
    candidates: list[Candidate],
    alloc: list[int],
) -> list[Hypothesis]:
    """Take the per-bank best candidates and materialize the next beam,
    ordered (bank descending, score descending)."""
    banks: list[list[Candidate]] = [[] for _ in alloc]
    for cand in candidates:
        banks[cand.bank].append(cand)
    new_beam: list[Hypothesis] = []
    for bank in range(len(alloc) - 1, -1, -1):
        members = sorted(banks[bank], key=_cand_sort_key)[: alloc[bank]]
        for cand in members:
            parent = beam[cand.row]
            if cand.token is None:
                new_beam.append(parent)
            else:
                new_beam.append(
                    Hypothesis(
                        tokens=parent.tokens + (cand.token,),
                        raw_score=cand.score,
                        cstate=cand.new_cstate,
                        finished=cand.token == EOS_ID,
                    )
                )
    return new_beam


def kbest_dba(
    beam: list[Hypothesis],
    scores: np.ndarray,
    constraint_set: ConstraintSet,
    k: int,
) -> list[Hypothesis]:
    """Constrained k-best with one fixed-size beam divided across banks."""
    candidates = generate_candidates(beam, scores, constraint_set, k)
    counts = [0] * (constraint_set.total_tokens + 1)
    for cand in candidates:
        counts[cand.bank] += 1
    alloc = adjust_allocation(allocate_banks(k, constraint_set.total_tokens), counts)
    return _fill_banks(beam, candidates, alloc)


def kbest_gbs(
    beam: list[Hypothesis],
    scores: np.ndarray,
    constraint_set: ConstraintSet,
    base_beam: int,
) -> list[Hypothesis]:
    """Grid-style k-best: a rigid ``base_beam`` slots per bank, never adjusted.

    The effective beam is ``base_beam * (C + 1)``; slots of unreachable or
    empty banks stay unused.
    """
    capacity = base_beam * (constraint_set.total_tokens + 1)
    candidates = generate_candidates(beam, scores, constraint_set, capacity)
    alloc = [base_beam] * (constraint_set.total_tokens + 1)
    return _fill_banks(beam, candidates, alloc)


def prune_beam(
    beam: list[Hypothesis],
    finished_pool: list[Hypothesis],
    threshold: float,
) -> list[Hypothesis]:
    """Drop every hypothesis, finished or not, whose raw score trails the best
    completed hypothesis by more than `threshold`. 0 disables pruning."""
    if threshold == 0 or not finished_pool:
        return beam
    cutoff = max(h.raw_score for h in finished_pool) - threshold
    return [h for h in beam if h.raw_score >= cutoff]


def finalize(
    finished_pool: list[Hypothesis],
    beam: list[Hypothesis],
    vocab: Vocabulary,
    *,
    constraint_set: ConstraintSet,
    steps_used: int,
    request_id: str = "",
) -> DecodeResult:
    """Pick the decode winner: the finished hypothesis with the best
    length-normalized score, or the best-effort unfinished one (highest bank,
    then highest raw score) when nothing completed in time."""
    if finished_pool:
        best = min(
            finished_pool,
            key=lambda h: (-h.normalized_score, h.finished_at, h.tokens),
        )
    elif beam:
        best = min(beam, key=lambda h: (-h.cstate.num_met, -h.raw_score, h.tokens))
    else:
        raise RuntimeError("finalize called with no hypotheses at all")
    met_state = replay(constraint_set, best.tokens)
    return DecodeResult(
        id=request_id,
        output_tokens=best.tokens,
        output_text=detokenize(best.tokens, vocab),
        raw_score=best.raw_score,
        normalized_score=best.normalized_score,
        constraints_met=met_state.num_met == constraint_set.total_tokens,
        steps_used=steps_used,
    )


def decode(
    scorer,
    vocab: Vocabulary,
    constraint_set: ConstraintSet | None,
    config: DecodeConfig,
    *,
    source: str | None = None,
    request_id: str = "",
) -> DecodeResult:
    """Run the full decode loop for one sentence.

    Stops when every beam slot holds a finished hypothesis, when
    ``max_length`` steps have run, or (with early stopping) at the first
    completed hypothesis. Never raises just because nothing finished: the
    best-effort output is flagged through ``constraints_met`` and the absence
    of EOS.
    """
    config.validate()
    requested = constraint_set if constraint_set is not None else EMPTY_SET
    search_cset = requested if config.algorithm in ("dba", "gbs") else EMPTY_SET
    beam = [initial_hypothesis(search_cset)]
    pool: list[Hypothesis] = []
    steps_used = 0
    for t in range(1, config.max_length + 1):
        actives = _active_rows(beam)
        if not actives:
            break
        histories = [list(beam[i].tokens) for i in actives]
        scores = scorer.step(histories, source)
        steps_used = t
        previous = beam
        if config.algorithm == "beam":
            beam = kbest_standard(beam, scores, config.beam_size)
        elif config.algorithm == "dba":
            beam = kbest_dba(beam, scores, search_cset, config.beam_size)
        else:
            beam = kbest_gbs(beam, scores, search_cset, config.gbs_base_beam)
        if not beam and not pool:
            # dead end: every extension had probability zero; report best effort
            beam = previous
            break
        for h in beam:
            if h.finished and h.finished_at is None:
                h.finished_at = t
                pool.append(h)
            # EOS gating: a finished hypothesis always has every constraint met
            assert not h.finished or h.cstate.num_met == search_cset.total_tokens
        beam = prune_beam(beam, pool, config.prune_threshold)
        if config.early_stopping and pool:
            break
    return finalize(
        pool,
        beam,
        vocab,
        constraint_set=requested,
        steps_used=steps_used,
        request_id=request_id,
    )
