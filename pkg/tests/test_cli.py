import json

import pytest

from helpers import make_vocab

from lexbeam import save_vocabulary
from lexbeam.cli import main


@pytest.fixture
def vocab_file(tmp_path):
    path = tmp_path / "vocab.txt"
    save_vocabulary(make_vocab("a", "b"), str(path))
    return str(path)


def write_jsonl(path, rows):
    with open(path, "w") as fh:
        for row in rows:
            fh.write(json.dumps(row) + "\n")


def read_jsonl(path):
    with open(path) as fh:
        return [json.loads(line) for line in fh]


def decode_args(tmp_path, vocab_file, rows, *extra):
    inp = tmp_path / "in.jsonl"
    out = tmp_path / "out.jsonl"
    write_jsonl(inp, rows)
    argv = [
        "decode",
        "--input", str(inp),
        "--output", str(out),
        "--vocab", vocab_file,
        *extra,
    ]
    return argv, out


class TestDecodeCommand:
    def test_constraint_satisfied_end_to_end(self, tmp_path, vocab_file):
        argv, out = decode_args(
            tmp_path,
            vocab_file,
            [{"id": "1", "text": "x", "constraints": ["b"]}],
            "--beam-size", "4", "--max-length", "5", "--prune", "0",
        )
        assert main(argv) == 0
        rows = read_jsonl(out)
        assert rows[0]["constraints_met"] is True
        assert rows[0]["translation"] == "b"
        assert rows[0]["id"] == "1"

    def test_empty_constraints_match_plain_beam(self, tmp_path, vocab_file):
        request = [{"id": "1", "constraints": []}]
        argv1, out1 = decode_args(tmp_path, vocab_file, request, "--algorithm", "dba")
        assert main(argv1) == 0
        first = read_jsonl(out1)
        argv2, out2 = decode_args(tmp_path, vocab_file, request, "--algorithm", "beam")
        assert main(argv2) == 0
        second = read_jsonl(out2)
        assert first == second

    def test_order_preserved_with_jobs(self, tmp_path, vocab_file):
        rows = [{"id": str(i), "constraints": ["a" if i % 2 else "b"]} for i in range(12)]
        argv, out = decode_args(tmp_path, vocab_file, rows, "--jobs", "4")
        assert main(argv) == 0
        results = read_jsonl(out)
        assert [r["id"] for r in results] == [str(i) for i in range(12)]

    def test_malformed_json_reports_line(self, tmp_path, vocab_file):
        inp = tmp_path / "in.jsonl"
        inp.write_text('{"id": "1", "constraints": []}\n{not json}\n')
        argv = ["decode", "--input", str(inp), "--output", str(tmp_path / "o"), "--vocab", vocab_file]
        with pytest.raises(SystemExit) as err:
            main(argv)
        assert "line 2" in str(err.value)

    def test_unknown_constraint_token_warns_and_continues(self, tmp_path, vocab_file, caplog):
        argv, out = decode_args(
            tmp_path, vocab_file, [{"id": "1", "constraints": ["zzz"]}], "--prune", "0"
        )
        with caplog.at_level("WARNING"):
            assert main(argv) == 0
        assert any("out-of-vocabulary" in rec.message for rec in caplog.records)
        rows = read_jsonl(out)
        assert rows[0]["constraints_met"] is True  # UNK is a legal constraint

    def test_gbs_flag_requires_gbs(self, tmp_path, vocab_file):
        argv, _ = decode_args(
            tmp_path, vocab_file, [{"id": "1"}], "--gbs-base-beam", "2"
        )
        with pytest.raises(SystemExit, match="gbs"):
            main(argv)

    def test_gbs_small_base_beam(self, tmp_path, vocab_file):
        argv, out = decode_args(
            tmp_path,
            vocab_file,
            [{"id": "1", "constraints": ["a", "b"]}],
            "--algorithm", "gbs", "--gbs-base-beam", "1", "--prune", "0",
        )
        assert main(argv) == 0
        assert read_jsonl(out)[0]["constraints_met"] is True

    def test_missing_file_nonzero_exit(self, tmp_path, vocab_file):
        argv = ["decode", "--input", str(tmp_path / "nope"), "--vocab", vocab_file]
        assert main(argv) == 1


class TestTrainLmCommand:
    def test_query_reproduces_hand_probability(self, tmp_path, vocab_file, capsys):
        corpus = tmp_path / "corpus.txt"
        corpus.write_text("a b a b\n")
        out = tmp_path / "lm.json"
        rc = main(
            [
                "train-lm",
                "--corpus", str(corpus),
                "--vocab", vocab_file,
                "--order", "2",
                "--alpha", "0.1",
                "--output", str(out),
                "--query-context", "a",
                "--query-token", "b",
            ]
        )
        assert rc == 0
        captured = capsys.readouterr().out
        assert "P(b | a) = 0.875000" in captured
        assert out.exists()


class TestBenchCommand:
    def test_row_cardinality(self, tmp_path, capsys):
        out = tmp_path / "bench.csv"
        rc = main(
            [
                "bench",
                "--vocab-size", "30",
                "--beam-size", "2",
                "--max-length", "3",
                "--sentences", "2",
                "--constraints", "1,4,8,12",
                "--algorithms", "dba,gbs",
                "--repetitions", "1",
                "--output", str(out),
            ]
        )
        assert rc == 0
        lines = out.read_text().strip().splitlines()
        assert len(lines) == 9  # header + 2 algorithms x 4 constraint counts


class TestAnalyzePlacementCommand:
    def test_perfect_correlation_fixture(self, tmp_path, capsys):
        inp = tmp_path / "triples.jsonl"
        write_jsonl(
            inp,
            [
                {"constraints": ["a"], "reference": "a x", "output": "a y"},
                {"constraints": ["b"], "reference": "x b", "output": "y b"},
                {"constraints": ["c"], "reference": "x c x x", "output": "p c q r"},
            ],
        )
        rc = main(["analyze-placement", "--input", str(inp)])
        assert rc == 0
        out = capsys.readouterr().out
        assert "pairs=3" in out and "skipped=0" in out and "pearson_r=1.0000" in out

    def test_zero_variance_nonzero_exit(self, tmp_path, capsys):
        inp = tmp_path / "triples.jsonl"
        write_jsonl(
            inp,
            [
                {"constraints": ["a"], "reference": "a x", "output": "a y"},
                {"constraints": ["b"], "reference": "b x", "output": "b y"},
            ],
        )
        rc = main(["analyze-placement", "--input", str(inp)])
        assert rc == 1
        assert "zero variance" in capsys.readouterr().err
