"""Command-line entry points: decode, train-lm, bench, analyze-placement.

Decode streams JSONL requests (``{"id": ..., "text": ..., "constraints":
[...]}``) and writes one JSONL result per input line, in input order. The
zero-flag defaults (DBA, beam 10, pruning 20, max length 50) are the standard
configuration; grid search is selected with ``--algorithm gbs`` and its base
beam. A constraint whose first token is the BOS surface form acts as a forced
prefix anchored at the sentence start.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from concurrent.futures import ThreadPoolExecutor

from .analysis import bench_run, pearson_r, placement_pairs, write_bench_csv
from .constraints import build_constraint_set
from .decoder import ALGORITHMS, DecodeConfig, decode
from .scorers import NGramScorer, SyntheticScorer, TableScorer, UniformScorer, train_ngram
from .vocab import DecodeRequest, Vocabulary, load_vocabulary, tokenize

logger = logging.getLogger("lexbeam")


def _build_scorer(args, vocab: Vocabulary):
    if args.scorer == "uniform":
        return UniformScorer(vocab)
    if args.scorer == "table":
        if not args.model:
            raise SystemExit("--scorer table requires --model TABLE.json")
        return TableScorer.from_file(args.model, vocab)
    if args.scorer == "ngram":
        if not args.model:
            raise SystemExit("--scorer ngram requires --model LM.json")
        return NGramScorer.load(args.model)
    if args.scorer == "synthetic":
        return SyntheticScorer(vocab, seed=args.seed)
    raise SystemExit(f"unknown scorer {args.scorer!r}")


def _parse_request(line: str, line_no: int) -> DecodeRequest:
    try:
        payload = json.loads(line)
    except json.JSONDecodeError as exc:
        raise SystemExit(f"input line {line_no}: malformed JSON ({exc})") from exc
    if not isinstance(payload, dict):
        raise SystemExit(f"input line {line_no}: expected a JSON object")
    return DecodeRequest(
        id=str(payload.get("id", line_no)),
        text=payload.get("text"),
        constraints=list(payload.get("constraints", [])),
    )


def run_decode(args) -> int:
    vocab = load_vocabulary(args.vocab)
    scorer = _build_scorer(args, vocab)
    if args.gbs_base_beam is not None and args.algorithm != "gbs":
        raise SystemExit("--gbs-base-beam only applies to --algorithm gbs")
    config = DecodeConfig(
        beam_size=args.beam_size,
        max_length=args.max_length,
        prune_threshold=args.prune,
        early_stopping=args.early_stopping,
        algorithm=args.algorithm,
        gbs_base_beam=args.gbs_base_beam if args.gbs_base_beam is not None else 10,
    )
    config.validate()

    def handle(item) -> str:
        line_no, line = item
        request = _parse_request(line, line_no)
        phrases = []
        for raw in request.constraints:
            oov = [
                tok
                for tok in raw.split()
                if vocab.lookup(tok) == vocab.unk_id and tok != vocab.tokens[vocab.unk_id]
            ]
            if oov:
                logger.warning(
                    "request %s: constraint %r has out-of-vocabulary tokens %s (mapped to UNK)",
                    request.id,
                    raw,
                    oov,
                )
            phrases.append(tokenize(raw, vocab))
        cset = build_constraint_set(phrases)
        result = decode(
            scorer, vocab, cset, config, source=request.text, request_id=request.id
        )
        return json.dumps(
            {
                "id": result.id,
                "translation": result.output_text,
                "raw_score": result.raw_score,
                "normalized_score": result.normalized_score,
                "constraints_met": result.constraints_met,
                "steps": result.steps_used,
            }
        )

    with open(args.input, encoding="utf-8") as fh:
        lines = [(i, line) for i, line in enumerate(fh, start=1) if line.strip()]
    out = open(args.output, "w", encoding="utf-8") if args.output else sys.stdout
    try:
        if args.jobs > 1:
            with ThreadPoolExecutor(max_workers=args.jobs) as pool:
                for encoded in pool.map(handle, lines):
                    out.write(encoded + "\n")
        else:
            for item in lines:
                out.write(handle(item) + "\n")
    finally:
        if out is not sys.stdout:
            out.close()
    return 0


def run_train_lm(args) -> int:
    vocab = load_vocabulary(args.vocab)
    with open(args.corpus, encoding="utf-8") as fh:
        lines = [line.rstrip("\n") for line in fh if line.strip()]
    model = train_ngram(lines, args.order, args.alpha, vocab)
    model.save(args.output)
    print(f"trained order-{args.order} model on {len(lines)} lines -> {args.output}")
    if args.query_context is not None and args.query_token is not None:
        ctx = tuple(tokenize(args.query_context, vocab))
        ctx = model.context_of((vocab.bos_id,) + ctx)
        prob = model.probability(ctx, vocab.lookup(args.query_token))
        print(f"P({args.query_token} | {args.query_context}) = {prob:.6f}")
    return 0


def run_bench(args) -> int:
    tokens = ["<s>", "</s>", "<unk>"] + [f"w{i}" for i in range(args.vocab_size - 2)]
    vocab = Vocabulary(tokens)
    scorer = SyntheticScorer(vocab, seed=args.seed)
    config = DecodeConfig(
        beam_size=args.beam_size,
        max_length=args.max_length,
        prune_threshold=0.0,
        algorithm="dba",
        gbs_base_beam=args.gbs_base_beam,
    )
    counts = [int(c) for c in args.constraints.split(",")]
    algorithms = args.algorithms.split(",")
    for alg in algorithms:
        if alg not in ALGORITHMS:
            raise SystemExit(f"unknown algorithm {alg!r}")
    records = bench_run(
        scorer, counts, algorithms, config, args.repetitions, n_sentences=args.sentences
    )
    write_bench_csv(records, args.output)
    for rec in records:
        print(
            f"{rec.algorithm:5s} C={rec.constraint_tokens:<3d} beam={rec.beam:<4d} "
            f"mean={rec.mean_s:.4f}s median={rec.median_s:.4f}s n={rec.n_sentences}"
        )
    return 0


def run_analyze_placement(args) -> int:
    all_pairs = []
    skipped = 0
    with open(args.input, encoding="utf-8") as fh:
        for line_no, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                payload = json.loads(line)
            except json.JSONDecodeError as exc:
                raise SystemExit(f"input line {line_no}: malformed JSON ({exc})") from exc
            phrases = [tuple(c.split()) for c in payload["constraints"]]
            cset = build_constraint_set(phrases)
            pairs, miss = placement_pairs(
                cset, payload["reference"].split(), payload["output"].split()
            )
            all_pairs.extend(pairs)
            skipped += miss
    try:
        r = pearson_r(all_pairs)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    print(f"pairs={len(all_pairs)} skipped={skipped} pearson_r={r:.4f}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="lexbeam", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("decode", help="decode a JSONL request stream")
    p.add_argument("--input", required=True)
    p.add_argument("--output", default=None, help="default: stdout")
    p.add_argument("--vocab", required=True)
    p.add_argument("--scorer", choices=["uniform", "table", "ngram", "synthetic"], default="uniform")
    p.add_argument("--model", default=None, help="table/ngram model file")
    p.add_argument("--seed", type=int, default=0, help="synthetic scorer seed")
    p.add_argument("--algorithm", choices=list(ALGORITHMS), default="dba")
    p.add_argument("--beam-size", type=int, default=10)
    p.add_argument("--prune", type=float, default=20.0, help="0 disables pruning")
    p.add_argument("--max-length", type=int, default=50)
    p.add_argument("--early-stopping", action="store_true")
    p.add_argument("--gbs-base-beam", type=int, default=None)
    p.add_argument("--jobs", type=int, default=1)
    p.set_defaults(func=run_decode)

    p = sub.add_parser("train-lm", help="train an add-alpha n-gram model")
    p.add_argument("--corpus", required=True)
    p.add_argument("--vocab", required=True)
    p.add_argument("--order", type=int, default=3)
    p.add_argument("--alpha", type=float, default=0.1)
    p.add_argument("--output", required=True)
    p.add_argument("--query-context", default=None, help="debug: context to query")
    p.add_argument("--query-token", default=None, help="debug: token to query")
    p.set_defaults(func=run_train_lm)

    p = sub.add_parser("bench", help="runtime scaling benchmark (synthetic scorer)")
    p.add_argument("--vocab-size", type=int, default=10000, help="predictable vocabulary size")
    p.add_argument("--beam-size", type=int, default=10)
    p.add_argument("--max-length", type=int, default=30)
    p.add_argument("--sentences", type=int, default=50)
    p.add_argument("--constraints", default="1,2,4,8,12", help="comma-separated C values")
    p.add_argument("--algorithms", default="dba,gbs")
    p.add_argument("--gbs-base-beam", type=int, default=10)
    p.add_argument("--repetitions", type=int, default=3)
    p.add_argument("--seed", type=int, default=1)
    p.add_argument("--output", required=True, help="CSV path")
    p.set_defaults(func=run_bench)

    p = sub.add_parser("analyze-placement", help="constraint placement correlation")
    p.add_argument("--input", required=True, help="JSONL of constraints/reference/output triples")
    p.set_defaults(func=run_analyze_placement)
    return parser


def main(argv: list[str] | None = None) -> int:
    logging.basicConfig(level=logging.INFO, format="%(levelname)s %(message)s")
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
