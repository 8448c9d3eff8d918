"""Runtime scaling with the number of constraints, at demo scale.

Dynamic allocation keeps one beam of size k no matter how many constraints
are attached, so per-sentence time stays flat as C grows. The grid baseline
multiplies its beam by C+1 and slows down linearly. Full-scale numbers
(vocabulary 10k, 50 sentences) come from `lexbeam bench` or the acceptance
suite; this demo uses a small vocabulary so it finishes in seconds.
"""

from lexbeam import DecodeConfig, SyntheticScorer, Vocabulary
from lexbeam.analysis import bench_run

vocab = Vocabulary(["<s>", "</s>", "<unk>"] + [f"w{i}" for i in range(998)])
scorer = SyntheticScorer(vocab, seed=3)
config = DecodeConfig(beam_size=5, max_length=12, prune_threshold=0.0, gbs_base_beam=5)

records = bench_run(scorer, [1, 2, 4, 8], ["dba", "gbs"], config, repetitions=2, n_sentences=8)

print(f"{'algorithm':10s} {'C':>3s} {'beam':>5s} {'mean ms/sent':>13s}")
for rec in records:
    print(
        f"{rec.algorithm:10s} {rec.constraint_tokens:3d} {rec.beam:5d} "
        f"{rec.mean_s * 1000:13.2f}"
    )

dba = {r.constraint_tokens: r.mean_s for r in records if r.algorithm == "dba"}
gbs = {r.constraint_tokens: r.mean_s for r in records if r.algorithm == "gbs"}
print()
print(f"dba spread across C: max/min = {max(dba.values()) / min(dba.values()):.2f} (flat)")
print(f"gbs growth C=8 vs C=1: {gbs[8] / gbs[1]:.2f}x (linear in C)")
