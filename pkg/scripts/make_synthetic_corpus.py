#!/usr/bin/env python3
"""Generate a synthetic annotated issue corpus on disk.

Writes one raw-export JSON file per issue plus a JSONL annotation file, in
exactly the layout the CLI commands (`ingest`, `train`, `split`, `ablate`,
`stats`) consume.  The generated corpus is label-separable by construction,
which makes it useful for smoke-testing the training and ablation paths
without any hand-labelled data.

Usage:
    python scripts/make_synthetic_corpus.py --out data/synthetic --seed 0
"""

from __future__ import annotations

import argparse
import json
from pathlib import Path

from rationale_miner.evaluation import corpus_stats, save_annotations
from rationale_miner.synthetic import make_design_corpus


def issue_to_export(issue) -> dict:
    """Serialise an IssueLog back into the raw export schema."""
    return {
        "key": issue.key,
        "summary": issue.summary,
        "description": issue.description,
        "reporter": issue.reporter,
        "comments": [
            {"author": c.author, "body": c.body, "created": c.created.isoformat()}
            for c in issue.comments
        ],
    }


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--out", type=Path, default=Path("data/synthetic"),
                        help="output directory (default: data/synthetic)")
    parser.add_argument("--seed", type=int, default=0,
                        help="generator seed (default: 0)")
    parser.add_argument("--min-sentences", type=int, default=200,
                        help="keep generating issues until this many sentences exist")
    parser.add_argument("--design-rate", type=float, default=0.4,
                        help="fraction of sentences drawn from design templates")
    args = parser.parse_args()

    issues, annotations = make_design_corpus(
        seed=args.seed,
        min_sentences=args.min_sentences,
        design_rate=args.design_rate,
    )

    corpus_dir = args.out / "corpus"
    corpus_dir.mkdir(parents=True, exist_ok=True)
    for issue in issues:
        path = corpus_dir / f"{issue.key}.json"
        path.write_text(json.dumps(issue_to_export(issue), indent=2) + "\n",
                        encoding="utf-8")
    annotations_path = args.out / "annotations.jsonl"
    save_annotations(annotations, annotations_path)

    print(f"wrote {len(issues)} issues to {corpus_dir}")
    print(f"wrote {len(annotations)} annotations to {annotations_path}")
    print()
    print(f"{'project':<10} {'issues':>8} {'comments':>10} {'sentences':>10} {'design':>8}")
    for row in corpus_stats(issues, annotations):
        print(f"{row['project']:<10} {row['issues']:>8} {row['comments']:>10} "
              f"{row['sentences']:>10} {row['design_sentences']:>8}")


if __name__ == "__main__":
    main()
