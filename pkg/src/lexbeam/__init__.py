"""Lexically constrained beam search with dynamic beam allocation.

A decoding engine that forces given words and phrases to appear in the output
of any next-token scorer, at a per-step cost that does not grow with the
number of constraints, plus the grid-search baseline, an exhaustive oracle,
and benchmark/analysis tooling.
"""

from .analysis import BenchRecord, PlacementPair, bench_run, pearson_r, placement_pairs
from .constraints import (
    ConstraintError,
    ConstraintSet,
    ConstraintState,
    advance,
    build_constraint_set,
    eos_allowed,
    next_needed_tokens,
)
from .decoder import (
    Candidate,
    DecodeConfig,
    Hypothesis,
    adjust_allocation,
    allocate_banks,
    decode,
    finalize,
    generate_candidates,
    kbest_dba,
    kbest_gbs,
    kbest_standard,
    prune_beam,
)
from .oracle import OracleResult, SearchSpaceError, exhaustive_best
from .scorers import (
    NGramScorer,
    ScorerContractError,
    SyntheticScorer,
    TableScorer,
    UniformScorer,
    rescore,
    train_ngram,
)
from .vocab import (
    DecodeRequest,
    DecodeResult,
    Vocabulary,
    detokenize,
    load_vocabulary,
    save_vocabulary,
    tokenize,
)

__version__ = "0.1.0"

__all__ = [
    "BenchRecord",
    "Candidate",
    "ConstraintError",
    "ConstraintSet",
    "ConstraintState",
    "DecodeConfig",
    "DecodeRequest",
    "DecodeResult",
    "Hypothesis",
    "NGramScorer",
    "OracleResult",
    "PlacementPair",
    "ScorerContractError",
    "SearchSpaceError",
    "SyntheticScorer",
    "TableScorer",
    "UniformScorer",
    "Vocabulary",
    "adjust_allocation",
    "advance",
    "allocate_banks",
    "bench_run",
    "build_constraint_set",
    "decode",
    "detokenize",
    "eos_allowed",
    "exhaustive_best",
    "finalize",
    "generate_candidates",
    "kbest_dba",
    "kbest_gbs",
    "kbest_standard",
    "load_vocabulary",
    "next_needed_tokens",
    "pearson_r",
    "placement_pairs",
    "prune_beam",
    "rescore",
    "save_vocabulary",
    "tokenize",
    "train_ngram",
]
