#!/usr/bin/env python3
"""Builds tests/fixtures/separable_trajectories.tsv: 60 synthetic perplexity
trajectories over 12 checkpoints and 3 seeds. Each of 30 languages has its
attested baseline and one impossible variant.

Every attested row's mean perplexity stays below every impossible row's,
so the classes are linearly separable.

Usage: python3 scripts/make_separable_fixture.py [OUT]
"""

import math
import random
import sys

LANGS = [f"l{k:02}" for k in range(30)]
IMPOSSIBLE = [
    "reverse_full",
    "shuffle_even_odd",
    "shuffle_local:w=3",
    "shuffle_local:w=10",
    "shuffle_deterministic:s=21",
]
CHECKPOINTS = [1000 * (k + 1) for k in range(12)]
SEEDS = [0, 1, 2]


def main():
    out = sys.argv[1] if len(sys.argv) > 1 else "crates/cli/tests/fixtures/separable_trajectories.tsv"
    rng = random.Random(20)
    header = ["language", "variant", "label"] + [f"ppl@{c}_s{s}" for c in CHECKPOINTS for s in SEEDS]
    lines = ["\t".join(header)]
    for k, lang in enumerate(LANGS):
        for variant in ["shuffle_control", IMPOSSIBLE[k % len(IMPOSSIBLE)]]:
            impossible = variant != "shuffle_control"
            final = rng.uniform(140, 220) if impossible else rng.uniform(60, 110)
            start = final * rng.uniform(2.0, 3.0)
            cells = []
            for c in CHECKPOINTS:
                for _ in SEEDS:
                    ppl = final + (start - final) * math.exp(-c / 3000)
                    cells.append(f"{ppl * rng.uniform(0.98, 1.02):.3f}")
            label = "impossible" if impossible else "attested"
            lines.append("\t".join([lang, variant, label] + cells))
    with open(out, "w", encoding="utf-8") as f:
        f.write("\n".join(lines) + "\n")


if __name__ == "__main__":
    main()
