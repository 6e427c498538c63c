#!/usr/bin/env python3
"""End-to-end pipeline: files in, reports out, via the ``lqm`` CLI.

Generates a synthetic 120-segment corpus over three systems and two
directions, writes segments.jsonl and annotations.jsonl, then shells
out to the CLI exactly as a user would:

    lqm validate ...
    lqm score ... --out score.json
    lqm bleu ... --out bleu.json
    lqm analyze --report corr|dist|buckets ...

Outputs land in demos/out/.
"""

import json
import random
import subprocess
import sys
from pathlib import Path

OUT = Path(__file__).parent / "out"

PATHS = [
    ("semantics", "lexical-semantics", "named-entity"),
    ("semantics", "propositional-semantics", "omission"),
    ("sociolinguistics", "code-register-selection",
     "standardization-interference"),
    ("pragmatics", "use-context-cultural-appropriateness", "mwes-proverbs"),
    ("morphosyntax", "grammar", "verbal-features"),
]

WORDS = ("the quick brown fox jumps over a lazy dog near riverbank "
         "while tired children watch morning trains pass slowly by").split()


def build_fixture(rng):
    segments, annotations = [], []
    quality = {"alpha": 0.4, "beta": 1.0, "gamma": 2.2}
    for direction in (("EGY", "ENG"), ("ENG", "UAE")):
        for model, error_rate in quality.items():
            for i in range(20):
                sid = f"{direction[0].lower()}-{model}-{i}"
                n = rng.randint(5, 28)
                tokens = [rng.choice(WORDS) for _ in range(n)]
                reference = list(tokens)
                for j in range(len(reference)):
                    if rng.random() < 0.12 * error_rate:
                        reference[j] = rng.choice(WORDS)
                segments.append({
                    "segment_id": sid,
                    "source_lang": direction[0],
                    "target_lang": direction[1],
                    "dialect": "Egyptian" if "EGY" in direction else "Emirati",
                    "model_id": model,
                    "source_text": f"source {i}",
                    "target_text": " ".join(tokens),
                    "reference_text": " ".join(reference),
                })
                text_len = len(" ".join(tokens))
                for k in range(rng.randint(0, round(error_rate * 2))):
                    start = rng.randint(0, text_len - 2)
                    end = rng.randint(start + 1, min(text_len, start + 9))
                    category, error_type, sub = rng.choice(PATHS)
                    annotations.append({
                        "span_id": f"{sid}-k{k}", "segment_id": sid,
                        "annotator_id": "ann1", "start": start, "end": end,
                        "category": category, "error_type": error_type,
                        "subcategory": sub,
                        "severity": rng.choice(
                            ["minor", "minor", "major", "critical"]),
                    })
    return segments, annotations


def run(argv):
    print("$", " ".join(argv))
    subprocess.run(argv, check=True)


def main():
    OUT.mkdir(exist_ok=True)
    rng = random.Random(7)
    segments, annotations = build_fixture(rng)
    seg_path = OUT / "segments.jsonl"
    ann_path = OUT / "annotations.jsonl"
    seg_path.write_text("".join(json.dumps(r) + "\n" for r in segments))
    ann_path.write_text("".join(json.dumps(a) + "\n" for a in annotations))
    print(f"wrote {len(segments)} segments, {len(annotations)} spans")

    lqm = [sys.executable, "-m", "lqm_eval.cli"]
    run(lqm + ["validate", "--segments", str(seg_path),
               "--annotations", str(ann_path)])
    run(lqm + ["score", "--segments", str(seg_path), "--annotations",
               str(ann_path), "--out", str(OUT / "score.json"),
               "--format", "table"])
    run(lqm + ["bleu", "--segments", str(seg_path),
               "--out", str(OUT / "bleu.json")])
    run(lqm + ["analyze", "--segments", str(seg_path), "--annotations",
               str(ann_path), "--report", "corr", "--bleu",
               str(OUT / "bleu.json"), "--out", str(OUT / "corr.json")])
    run(lqm + ["analyze", "--segments", str(seg_path), "--annotations",
               str(ann_path), "--report", "dist", "--out",
               str(OUT / "dist.json"), "--format", "table"])
    run(lqm + ["analyze", "--segments", str(seg_path), "--annotations",
               str(ann_path), "--report", "buckets", "--out",
               str(OUT / "buckets.json")])

    corr = json.loads((OUT / "corr.json").read_text())
    print()
    print(f"human-vs-BLEU correlation over {corr['n']} segments: "
          f"r={corr['pearson_r']:.3f}, rho={corr['spearman_rho']:.3f}")
    buckets = json.loads((OUT / "buckets.json").read_text())
    print(f"length buckets: cutoffs {buckets['cutoffs']}, "
          f"sizes {buckets['bucket_sizes']}")
    print(f"rank stability means: {buckets['rank_stability']['means']}")


if __name__ == "__main__":
    main()
