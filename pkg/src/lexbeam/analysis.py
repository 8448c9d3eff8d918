"""Analysis tools: constraint placement positions, Pearson correlation, and the
runtime-vs-constraints benchmark."""

from __future__ import annotations

import csv
import gc
import statistics
import time
from dataclasses import dataclass

import numpy as np

from .constraints import ConstraintSet, build_constraint_set
from .decoder import DecodeConfig, decode
from .oracle import contains_phrase
from .scorers import SyntheticScorer
from .vocab import NUM_RESERVED, Vocabulary


@dataclass
class PlacementPair:
    """Relative position (fraction of sentence length, in [0, 1]) of one
    constraint's first token in the reference and in the decoder output."""

    ref_pos: float
    out_pos: float


@dataclass
class BenchRecord:
    algorithm: str
    constraint_tokens: int
    beam: int  # beam size, or base beam for gbs
    mean_s: float
    median_s: float
    n_sentences: int


def _first_occurrence(tokens, phrase) -> int | None:
    m = len(phrase)
    for i in range(len(tokens) - m + 1):
        if tuple(tokens[i : i + m]) == tuple(phrase):
            return i
    return None


def placement_pairs(
    constraint_set: ConstraintSet,
    reference_tokens,
    output_tokens,
) -> tuple[list[PlacementPair], int]:
    """Pair up each phrase's first-occurrence position in reference and output.

    Positions are the first-token index divided by the sequence length.
    Phrases absent from either sequence contribute no pair; the second return
    value counts them.
    """
    pairs: list[PlacementPair] = []
    skipped = 0
    for phrase in constraint_set.phrases:
        ref_idx = _first_occurrence(reference_tokens, phrase)
        out_idx = _first_occurrence(output_tokens, phrase)
        if ref_idx is None or out_idx is None:
            skipped += 1
            continue
        pairs.append(PlacementPair(ref_idx / len(reference_tokens), out_idx / len(output_tokens)))
    return pairs, skipped


def pearson_r(pairs: list[PlacementPair] | list[tuple[float, float]]) -> float:
    """Pearson product-moment correlation of the paired positions."""
    if len(pairs) < 2:
        raise ValueError(f"need at least 2 pairs for a correlation, got {len(pairs)}")
    xs = np.array([p.ref_pos if isinstance(p, PlacementPair) else p[0] for p in pairs])
    ys = np.array([p.out_pos if isinstance(p, PlacementPair) else p[1] for p in pairs])
    dx = xs - xs.mean()
    dy = ys - ys.mean()
    var_x = float(dx @ dx)
    var_y = float(dy @ dy)
    if var_x == 0.0 or var_y == 0.0:
        raise ValueError("correlation undefined: zero variance on one axis")
    return float((dx @ dy) / np.sqrt(var_x * var_y))


def bench_constraints(vocab: Vocabulary, num_tokens: int, sentence_index: int) -> list[list[int]]:
    """Deterministic per-sentence draw of single-token constraints."""
    rng = np.random.default_rng(977 + sentence_index)
    ids = rng.choice(
        np.arange(NUM_RESERVED, len(vocab)), size=num_tokens, replace=False
    )
    return [[int(t)] for t in ids]


def bench_run(
    scorer: SyntheticScorer,
    constraint_counts: list[int],
    algorithms: list[str],
    config: DecodeConfig,
    repetitions: int,
    *,
    n_sentences: int = 50,
) -> list[BenchRecord]:
    """Wall-clock scaling of decode time with the number of constraints.

    For each (algorithm, C) the same deterministic sentence set is decoded
    with C single-token constraints per sentence; one untimed warm-up pass
    precedes `repetitions` timed passes. Decoding runs sequentially on one
    thread so timings are comparable; decoded outputs are deterministic, only
    the timings vary.
    """
    if repetitions < 1:
        raise ValueError(f"repetitions must be >= 1, got {repetitions}")
    vocab = scorer.vocab
    records: list[BenchRecord] = []
    for algorithm in algorithms:
        for count in constraint_counts:
            csets = [
                build_constraint_set(bench_constraints(vocab, count, i))
                for i in range(n_sentences)
            ]
            run_config = DecodeConfig(
                beam_size=config.beam_size,
                max_length=config.max_length,
                prune_threshold=config.prune_threshold,
                early_stopping=config.early_stopping,
                algorithm=algorithm,
                gbs_base_beam=config.gbs_base_beam,
            )

            def one_pass() -> float:
                gc.collect()
                gc_was_on = gc.isenabled()
                gc.disable()
                try:
                    start = time.perf_counter()
                    for i, cset in enumerate(csets):
                        decode(scorer, vocab, cset, run_config, request_id=str(i))
                    return (time.perf_counter() - start) / len(csets)
                finally:
                    if gc_was_on:
                        gc.enable()

            one_pass()  # warm-up, excluded
            times = [one_pass() for _ in range(repetitions)]
            records.append(
                BenchRecord(
                    algorithm=algorithm,
                    constraint_tokens=count,
                    beam=config.gbs_base_beam if algorithm == "gbs" else config.beam_size,
                    mean_s=statistics.fmean(times),
                    median_s=statistics.median(times),
                    n_sentences=len(csets),
                )
            )
    return records


def write_bench_csv(records: list[BenchRecord], path: str) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["algorithm", "C", "beam", "mean_s", "median_s", "n_sentences"])
        for rec in records:
            writer.writerow(
                [
                    rec.algorithm,
                    rec.constraint_tokens,
                    rec.beam,
                    f"{rec.mean_s:.6f}",
                    f"{rec.median_s:.6f}",
                    rec.n_sentences,
                ]
            )


__all__ = [
    "PlacementPair",
    "BenchRecord",
    "placement_pairs",
    "pearson_r",
    "bench_run",
    "bench_constraints",
    "write_bench_csv",
    "contains_phrase",
]
