"""Command-line entry point.

Exit codes: 0 on success, 1 when any issue failed to process (or a runtime
error stopped a command), 2 on configuration errors.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
from pathlib import Path

import numpy as np

from .backends.baseline import train_baseline, train_pair_baseline
from .backends.heads import save_head, train_head
from .config import SP_FINGERPRINT, RunConfig, build_backend, build_classifier, load_config
from .corpus import clean_issue, enumerate_sentences, parse_issue
from .errors import ConfigError, MiningError
from .evaluation import (
    Annotation,
    PRF,
    collect_extraction_data,
    collect_pair_data,
    corpus_stats,
    eval_binary,
    eval_rationales,
    eval_sentences,
    load_annotations,
    run_ablation,
    split_dataset,
)
from .features import FEATURE_GROUPS, POLARITY_WORDS, compute_feature_matrix
from .miner import (
    Rationale,
    build_relation_graph,
    classify_pairs,
    extract_design_sentences,
    mine_issue,
    render_markdown,
)
from .prompts import build_cloze_prompt
from .sentiment import SentimentAnalyzer

_OVERRIDE_FLAGS = {
    "corpus": "corpus_dir",
    "out": "output_dir",
    "mode": "mode",
    "backend": "backend",
    "backend_url": "backend_url",
    "script": "script_path",
    "head": "head_path",
    "baseline": "baseline_path",
    "pair_baseline": "pair_baseline_path",
    "annotations": "annotations_path",
    "lexicon": "lexicon_path",
    "seed": "seed",
    "workers": "workers",
}


def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("-c", "--config", help="JSON config file")
    parser.add_argument("--corpus", help="directory of issue export JSON files")
    parser.add_argument("--out", help="output directory")
    parser.add_argument("--mode", help="prompt_head or baseline")
    parser.add_argument("--backend", help="remote, scripted, or native")
    parser.add_argument("--backend-url", dest="backend_url", help="remote backend base URL")
    parser.add_argument("--script", help="scripted backend JSON file")
    parser.add_argument("--head", help="cloze-head model path")
    parser.add_argument("--baseline", help="design baseline model path")
    parser.add_argument("--pair-baseline", dest="pair_baseline",
                        help="pair baseline model path")
    parser.add_argument("--annotations", help="gold annotations JSONL path")
    parser.add_argument("--lexicon", help="sentiment lexicon path")
    parser.add_argument("--seed", type=int, help="random seed")
    parser.add_argument("--workers", type=int, help="worker threads for backend calls")


def _overrides(args: argparse.Namespace) -> dict:
    values = {}
    for flag, key in _OVERRIDE_FLAGS.items():
        if getattr(args, flag, None) is not None:
            values[key] = getattr(args, flag)
    return values


def _analyzer(cfg: RunConfig) -> SentimentAnalyzer:
    return SentimentAnalyzer(lexicon_path=cfg.lexicon_path)


def _load_issues(cfg: RunConfig) -> tuple[list, int]:
    root = Path(cfg.corpus_dir)
    if not root.is_dir():
        raise ConfigError(f"corpus_dir is not a directory: {root}")
    issues, failures = [], 0
    for file in sorted(root.glob("*.json")):
        try:
            raw = json.loads(file.read_text(encoding="utf-8"))
            issue = parse_issue(raw)
            issues.append(clean_issue(issue, cfg.encoding, tuple(cfg.bot_authors)))
        except (MiningError, json.JSONDecodeError, OSError) as exc:
            failures += 1
            print(f"skipping {file.name}: {exc}", file=sys.stderr)
    return issues, failures


def _outdir(cfg: RunConfig) -> Path:
    out = Path(cfg.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    return out


def _ensure_parent(path: str | Path) -> None:
    Path(path).parent.mkdir(parents=True, exist_ok=True)


def _require_annotations(cfg: RunConfig) -> list[Annotation]:
    if not cfg.annotations_path:
        raise ConfigError("annotations_path is required for this command")
    return load_annotations(cfg.annotations_path)


def cmd_ingest(cfg: RunConfig, args: argparse.Namespace) -> int:
    issues, failures = _load_issues(cfg)
    out = _outdir(cfg)
    for issue in issues:
        sentences = enumerate_sentences(issue)
        path = out / f"{issue.key}.sentences.jsonl"
        with open(path, "w", encoding="utf-8") as handle:
            for s in sentences:
                handle.write(json.dumps({
                    "id": s.id, "text": s.text, "kind": s.kind,
                    "comment_index": s.comment_index,
                    "block_index": s.block_index,
                    "global_index": s.global_index, "author": s.author,
                }) + "\n")
        print(f"{issue.key}: {len(sentences)} sentences -> {path}")
    return 1 if failures else 0


def cmd_extract(cfg: RunConfig, args: argparse.Namespace) -> int:
    issues, failures = _load_issues(cfg)
    backend = build_backend(cfg)
    classifier = build_classifier(cfg, backend)
    analyzer = _analyzer(cfg)
    out = _outdir(cfg)
    for issue in issues:
        try:
            sentences, matrix = compute_feature_matrix(issue, analyzer)
            design, scores = extract_design_sentences(
                sentences, matrix, issue.summary, classifier)
            index_of = {s.id: i for i, s in enumerate(sentences)}
            payload = {
                "issue": issue.key,
                "design": [
                    {"id": s.id, "text": s.text,
                     "score": float(scores[index_of[s.id]])}
                    for s in design
                ],
            }
            path = out / f"{issue.key}.design.json"
            path.write_text(json.dumps(payload, indent=2) + "\n", encoding="utf-8")
            print(f"{issue.key}: {len(design)}/{len(sentences)} design sentences -> {path}")
        except MiningError as exc:
            failures += 1
            print(f"failed on {issue.key}: {exc}", file=sys.stderr)
    return 1 if failures else 0


def cmd_pair(cfg: RunConfig, args: argparse.Namespace) -> int:
    issues, failures = _load_issues(cfg)
    backend = build_backend(cfg)
    classifier = build_classifier(cfg, backend)
    analyzer = _analyzer(cfg)
    out = _outdir(cfg)
    for issue in issues:
        try:
            sentences, matrix = compute_feature_matrix(issue, analyzer)
            design, _ = extract_design_sentences(
                sentences, matrix, issue.summary, classifier)
            decisions, warnings = ([], [])
            if len(design) >= 2:
                decisions, warnings = classify_pairs(
                    design, backend, cfg.pair_budget(), workers=cfg.workers)
            graph = build_relation_graph(design, decisions)
            payload = {
                "issue": issue.key,
                "design": [s.id for s in sorted(design, key=lambda s: s.global_index)],
                "supporting": [
                    {"argument": e.argument, "solution": e.solution}
                    for e in graph.supporting
                ],
                "complementary": [list(p) for p in graph.complementary],
                "warnings": warnings,
            }
            path = out / f"{issue.key}.relations.json"
            path.write_text(json.dumps(payload, indent=2) + "\n", encoding="utf-8")
            print(f"{issue.key}: {len(graph.supporting)} supporting, "
                  f"{len(graph.complementary)} complementary -> {path}")
        except MiningError as exc:
            failures += 1
            print(f"failed on {issue.key}: {exc}", file=sys.stderr)
    return 1 if failures else 0


def cmd_mine(cfg: RunConfig, args: argparse.Namespace) -> int:
    issues, failures = _load_issues(cfg)
    backend = build_backend(cfg)
    classifier = build_classifier(cfg, backend)
    analyzer = _analyzer(cfg)
    out = _outdir(cfg)
    for issue in issues:
        try:
            result = mine_issue(issue, classifier, backend,
                                cloze_budget=cfg.cloze_budget(),
                                pair_budget=cfg.pair_budget(),
                                analyzer=analyzer, workers=cfg.workers,
                                already_clean=True)
            json_path = out / f"{issue.key}.rationales.json"
            json_path.write_text(json.dumps(result.to_json(), indent=2) + "\n",
                                 encoding="utf-8")
            md_path = out / f"{issue.key}.rationales.md"
            md_path.write_text(result.to_markdown(), encoding="utf-8")
            print(f"{issue.key}: {len(result.rationales)} rationale(s) -> {json_path}")
        except MiningError as exc:
            failures += 1
            print(f"failed on {issue.key}: {exc}", file=sys.stderr)
    return 1 if failures else 0


def cmd_train(cfg: RunConfig, args: argparse.Namespace) -> int:
    issues, failures = _load_issues(cfg)
    annotations = _require_annotations(cfg)
    analyzer = _analyzer(cfg)
    if cfg.mode == "baseline":
        if not cfg.baseline_path:
            raise ConfigError("baseline_path is required to train in baseline mode")
        texts, features, labels, _ = collect_extraction_data(issues, annotations, analyzer)
        model = train_baseline(texts, features, labels)
        _ensure_parent(cfg.baseline_path)
        model.save(cfg.baseline_path)
        print(f"design baseline trained on {len(texts)} sentences -> {cfg.baseline_path}")
        if cfg.pair_baseline_path:
            matrix, pair_labels = collect_pair_data(issues, annotations)
            if len(np.unique(pair_labels)) >= 2:
                pair_model = train_pair_baseline(matrix, pair_labels)
                _ensure_parent(cfg.pair_baseline_path)
                pair_model.save(cfg.pair_baseline_path)
                print(f"pair baseline trained on {len(pair_labels)} pairs "
                      f"-> {cfg.pair_baseline_path}")
            else:
                print("pair baseline skipped: annotations yield a single relation class")
    else:
        if not cfg.head_path:
            raise ConfigError("head_path is required to train in prompt_head mode")
        backend = build_backend(cfg)
        by_issue = {a.issue: a for a in annotations}
        rows, labels = [], []
        for issue in issues:
            annotation = by_issue.get(issue.key)
            if annotation is None:
                continue
            sentences, matrix = compute_feature_matrix(issue, analyzer)
            for sentence, vector in zip(sentences, matrix):
                prompt = build_cloze_prompt(sentence, issue.summary, cfg.cloze_budget())
                probs = backend.mask_probs(prompt.text, POLARITY_WORDS)
                rows.append(list(probs) + list(vector))
                label = annotation.labels.get(sentence.id, "none")
                labels.append(0 if label == "none" else 1)
        head = train_head(np.asarray(rows), np.asarray(labels),
                          num_classes=2, fingerprint=SP_FINGERPRINT)
        _ensure_parent(cfg.head_path)
        save_head(head, cfg.head_path)
        print(f"cloze head trained on {len(rows)} sentences -> {cfg.head_path}")
    return 1 if failures else 0


def cmd_eval(cfg: RunConfig, args: argparse.Namespace) -> int:
    issues, failures = _load_issues(cfg)
    annotations = _require_annotations(cfg)
    out = _outdir(cfg)
    order_by_issue = {
        issue.key: {s.id: s.global_index for s in enumerate_sentences(issue)}
        for issue in issues
    }
    rows: dict[str, list[PRF]] = {
        "rationale": [], "sentence_solution": [], "sentence_argument": [],
        "extraction": [],
    }
    for annotation in annotations:
        mined_path = out / f"{annotation.issue}.rationales.json"
        if not mined_path.exists():
            failures += 1
            print(f"no mined output for {annotation.issue} at {mined_path}",
                  file=sys.stderr)
            continue
        payload = json.loads(mined_path.read_text(encoding="utf-8"))
        predicted = [
            Rationale(solution=list(r["solution"]),
                      arguments=[list(g) for g in r["arguments"]])
            for r in payload.get("rationales", [])
        ]
        order = order_by_issue.get(annotation.issue, {})
        gold = annotation.rationales
        rows["rationale"].append(eval_rationales(predicted, gold))
        sentence_scores = eval_sentences(predicted, gold, order)
        rows["sentence_solution"].append(sentence_scores["solution"])
        rows["sentence_argument"].append(sentence_scores["argument"])
        predicted_ids = [d["id"] for d in payload.get("design_sentences", [])]
        rows["extraction"].append(eval_binary(predicted_ids, annotation.design_ids()))

    csv_path = out / "metrics.csv"
    with open(csv_path, "w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(["metric", "precision", "recall", "f1"])
        for metric, values in rows.items():
            if values:
                mean = PRF(*(sum(v[i] for v in values) / len(values) for i in range(3)))
            else:
                mean = PRF(0.0, 0.0, 0.0)
            writer.writerow([metric, f"{mean.precision:.4f}", f"{mean.recall:.4f}",
                             f"{mean.f1:.4f}"])
            print(f"{metric:20s} P={mean.precision:.4f} R={mean.recall:.4f} "
                  f"F1={mean.f1:.4f}")
    print(f"metrics -> {csv_path}")
    return 1 if failures else 0


def cmd_split(cfg: RunConfig, args: argparse.Namespace) -> int:
    issues, failures = _load_issues(cfg)
    train, test = split_dataset(issues, cfg.seed)
    out = _outdir(cfg)
    payload = {
        "seed": cfg.seed,
        "train": [i.key for i in train],
        "test": [i.key for i in test],
    }
    path = out / "split.json"
    path.write_text(json.dumps(payload, indent=2) + "\n", encoding="utf-8")
    print(f"train ({len(train)}): {', '.join(payload['train'])}")
    print(f"test ({len(test)}): {', '.join(payload['test'])}")
    return 1 if failures else 0


def cmd_ablate(cfg: RunConfig, args: argparse.Namespace) -> int:
    issues, failures = _load_issues(cfg)
    annotations = _require_annotations(cfg)
    analyzer = _analyzer(cfg)
    train, test = split_dataset(issues, cfg.seed)
    train_texts, train_features, train_labels, _ = collect_extraction_data(
        train, annotations, analyzer)
    test_texts, test_features, test_labels, _ = collect_extraction_data(
        test, annotations, analyzer)
    dimensions: list[str | None] = [None]
    dimensions.extend(args.dimension or sorted(FEATURE_GROUPS))
    results = []
    for dimension in dimensions:
        result = run_ablation(train_texts, train_features, train_labels,
                              test_texts, test_features, test_labels, dimension)
        results.append(result)
        print(f"{result.dimension:10s} masked={len(result.masked_slots):2d} "
              f"P={result.precision:.4f} R={result.recall:.4f} F1={result.f1:.4f}")
    out = _outdir(cfg)
    path = out / "ablation.json"
    path.write_text(json.dumps([result.__dict__ for result in results], indent=2) + "\n",
                    encoding="utf-8")
    print(f"ablation -> {path}")
    return 1 if failures else 0


def cmd_stats(cfg: RunConfig, args: argparse.Namespace) -> int:
    issues, failures = _load_issues(cfg)
    annotations = load_annotations(cfg.annotations_path) if cfg.annotations_path else None
    table = corpus_stats(issues, annotations)
    header = f"{'project':12s} {'issues':>6s} {'comments':>8s} {'sentences':>9s} {'design':>6s}"
    print(header)
    for row in table:
        print(f"{row['project']:12s} {row['issues']:6d} {row['comments']:8d} "
              f"{row['sentences']:9d} {row['design_sentences']:6d}")
    return 1 if failures else 0


def cmd_export(cfg: RunConfig, args: argparse.Namespace) -> int:
    out = _outdir(cfg)
    failures = 0
    mined = sorted(out.glob("*.rationales.json"))
    if not mined:
        print(f"no mined outputs under {out}", file=sys.stderr)
        return 1
    for path in mined:
        try:
            payload = json.loads(path.read_text(encoding="utf-8"))
            text_of = {d["id"]: d["text"] for d in payload.get("design_sentences", [])}
            markdown = render_markdown(payload["issue"], payload.get("rationales", []),
                                       text_of)
            target = path.with_name(path.name[: -len(".json")] + ".md")
            target.write_text(markdown, encoding="utf-8")
            print(f"{path.name} -> {target.name}")
        except (KeyError, ValueError) as exc:
            failures += 1
            print(f"failed to export {path.name}: {exc}", file=sys.stderr)
    return 1 if failures else 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="rationale-miner",
        description="Mine design rationales from issue-tracker discussion logs.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    commands = {
        "ingest": (cmd_ingest, "parse, clean, and segment the corpus"),
        "extract": (cmd_extract, "classify design sentences"),
        "pair": (cmd_pair, "classify relations between design sentences"),
        "mine": (cmd_mine, "run the full pipeline and write rationales"),
        "train": (cmd_train, "train classifier heads from annotations"),
        "eval": (cmd_eval, "score mined output against gold annotations"),
        "split": (cmd_split, "hold out one issue per project"),
        "ablate": (cmd_ablate, "retrain with feature blocks removed"),
        "stats": (cmd_stats, "print corpus statistics"),
        "export": (cmd_export, "render mined rationales to markdown"),
    }
    for name, (func, help_text) in commands.items():
        command = sub.add_parser(name, help=help_text)
        _add_common(command)
        if name == "ablate":
            command.add_argument("--dimension", action="append",
                                 help="feature block to ablate (repeatable); "
                                      "default: all blocks")
        command.set_defaults(func=func)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = load_config(args.config, _overrides(args))
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    try:
        return args.func(cfg, args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except MiningError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
