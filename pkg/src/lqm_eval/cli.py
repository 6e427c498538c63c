"""``lqm`` command line: validate, score, iaa, bleu, analyze, export, serve.

Exit codes: 0 success, 1 validation error, 2 usage error.  Diagnostics
go to stderr; data goes to --out files (written atomically, nothing on
failure) or stdout.  All inputs are loaded and validated before any
computation starts, and identical inputs always produce byte-identical
outputs.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import tempfile
from pathlib import Path

from . import agreement as agreement_mod
from . import analysis as analysis_mod
from . import autometric as autometric_mod
from . import scoring as scoring_mod
from .corpus import Corpus, read_annotations, read_segments
from .errors import ValidationError
from .taxonomy import BUILTIN_NAMES, load_builtin, load_taxonomy


def _read_text(path: str, what: str) -> str:
    p = Path(path)
    if not p.is_file():
        raise ValidationError(f"{what} file not found: {path}")
    return p.read_text("utf-8")


def _load_schema(spec: str | None):
    if spec is None or spec in BUILTIN_NAMES:
        return load_builtin(spec or "lqm")
    return load_taxonomy(_read_text(spec, "taxonomy"))


def _load_corpus(path: str) -> Corpus:
    return Corpus(read_segments(_read_text(path, "segments")))


def _load_weights(path: str | None) -> scoring_mod.WeightScheme:
    if path is None:
        return scoring_mod.WeightScheme()
    return scoring_mod.WeightScheme.from_json(_read_text(path, "weights"))


def _emit(data: dict, out: str | None) -> None:
    payload = json.dumps(data, ensure_ascii=False, indent=2) + "\n"
    if out is None or out == "-":
        sys.stdout.write(payload)
        return
    directory = os.path.dirname(os.path.abspath(out)) or "."
    fd, tmp = tempfile.mkstemp(dir=directory, suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as f:
            f.write(payload)
        os.replace(tmp, out)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _render_table(headers: list[str], rows: list[list[str]]) -> str:
    widths = [len(h) for h in headers]
    for row in rows:
        for i, cell in enumerate(row):
            widths[i] = max(widths[i], len(cell))
    def fmt(cells):
        return "  ".join(c.ljust(w) for c, w in zip(cells, widths)).rstrip()
    lines = [fmt(headers), fmt(["-" * w for w in widths])]
    lines.extend(fmt(row) for row in rows)
    return "\n".join(lines) + "\n"


def _maybe_print_table(args, render) -> None:
    if getattr(args, "format", "json") == "table":
        sys.stdout.write(render())


# -- subcommands -------------------------------------------------------------

def cmd_validate(args) -> int:
    schema = _load_schema(args.taxonomy)
    corpus = _load_corpus(args.segments)
    n_spans = 0
    if args.annotations:
        sets = read_annotations(_read_text(args.annotations, "annotations"),
                                corpus, schema)
        n_spans = sum(len(s.spans) for s in sets.values())
    print(f"ok: {len(corpus)} segments, {n_spans} spans, "
          f"taxonomy {schema.name} ({len(schema)} nodes)", file=sys.stderr)
    return 0


def cmd_score(args) -> int:
    schema = _load_schema(args.taxonomy)
    corpus = _load_corpus(args.segments)
    sets = read_annotations(_read_text(args.annotations, "annotations"),
                            corpus, schema)
    scheme = _load_weights(args.weights)
    annotators = args.annotators.split(",") if args.annotators else None
    report = scoring_mod.score_report(corpus, sets, scheme, annotators)
    _emit(report.to_dict(), args.out)
    _maybe_print_table(args, lambda: _render_table(
        ["direction", "model", "n", "macro", "micro"],
        [[f"{g.source_lang}->{g.target_lang}", g.model_id, str(g.n_segments),
          f"{g.macro_mean:.2f}", f"{g.micro_score:.2f}"]
         for g in report.per_group]))
    return 0


def cmd_iaa(args) -> int:
    schema = _load_schema(args.taxonomy)
    corpus = _load_corpus(args.segments)
    sets = read_annotations(_read_text(args.annotations, "annotations"),
                            corpus, schema)
    names = [a.strip() for a in args.annotators.split(",") if a.strip()]
    if len(names) != 2:
        raise ValidationError("--annotators needs exactly two ids, A,B")
    missing = [n for n in names if n not in sets]
    if missing:
        raise ValidationError(
            f"annotator(s) not present in annotations: {', '.join(missing)}")
    scope = None
    if args.scope == "all":
        scope = [s.segment_id for s in corpus]
    report = agreement_mod.agreement_report(
        sets[names[0]], sets[names[1]], corpus,
        min_overlap=args.min_overlap, scope=scope)
    _emit(report.to_dict(), args.out)
    return 0


def cmd_bleu(args) -> int:
    corpus = _load_corpus(args.segments)
    tok = _parse_tokenizer(args.tok, args.lowercase)
    if tok.mode == "pretokenized" and args.hyp_field != "target_text":
        raise ValidationError("pretokenized mode only supports "
                              "--hyp-field target_text")
    if args.hyp_field not in ("target_text", "source_text", "reference_text"):
        raise ValidationError(f"unknown --hyp-field {args.hyp_field!r}")
    table = autometric_mod.corpus_bleu_table(corpus, tok, args.hyp_field)
    _emit(table.to_dict(), args.out)
    _maybe_print_table(args, lambda: _render_table(
        ["direction", "model", "n", "mean"],
        [[f"{g['source_lang']}->{g['target_lang']}", g["model_id"],
          str(g["n_segments"]), f"{g['mean_score']:.2f}"]
         for g in table.per_group]))
    return 0


def _parse_tokenizer(spec: str, lowercase: bool) -> autometric_mod.TokenizerSpec:
    if spec == "whitespace":
        return autometric_mod.TokenizerSpec("whitespace", lowercase)
    if spec == "pretok":
        return autometric_mod.TokenizerSpec("pretokenized", lowercase)
    if spec.startswith("subword:"):
        vocab_path = spec.split(":", 1)[1]
        vocab = autometric_mod.load_vocabulary(
            _read_text(vocab_path, "vocabulary"))
        return autometric_mod.TokenizerSpec("subword", lowercase, vocab)
    raise ValidationError(
        f"unknown tokenizer {spec!r}; expected whitespace, pretok, or subword:V")


def cmd_analyze(args) -> int:
    schema = _load_schema(args.taxonomy)
    corpus = _load_corpus(args.segments)
    sets = read_annotations(_read_text(args.annotations, "annotations"),
                            corpus, schema)
    scheme = _load_weights(args.weights)
    scope = analysis_mod.Scope(
        source_lang=args.direction.split(":")[0] if args.direction else None,
        target_lang=args.direction.split(":")[1] if args.direction else None,
        dialect=args.dialect,
        model_id=args.model,
    ) if (args.direction or args.dialect or args.model) else None
    if args.direction and ":" not in args.direction:
        raise ValidationError("--direction must look like SRC:TGT")

    if args.report == "dist":
        table = analysis_mod.error_distribution(
            sets, schema, args.level, corpus, scope, scheme)
        _emit(table.to_dict(), args.out)
        _maybe_print_table(args, lambda: _render_table(
            ["path", "count", "rate"],
            [["/".join(r.key), str(r.count), f"{r.rate:.1f}"]
             for r in table.rows]))
    elif args.report == "attrib":
        if scope is not None and scope.source_lang is not None:
            tables = [analysis_mod.model_attribution(sets, corpus, scope, scheme)]
        else:
            tables = [
                analysis_mod.model_attribution(
                    sets, corpus,
                    analysis_mod.Scope(source_lang=src, target_lang=tgt),
                    scheme)
                for src, tgt in analysis_mod.directions_in(corpus)
            ]
        _emit({"tables": [t.to_dict() for t in tables]}, args.out)
    elif args.report == "corr":
        if not args.bleu:
            raise ValidationError("--report corr needs --bleu bleu.json")
        bleu_data = json.loads(_read_text(args.bleu, "bleu report"))
        bleu_scores = {sid: rec["score"]
                       for sid, rec in bleu_data.get("per_segment", {}).items()}
        lqm = scoring_mod.score_report(corpus, sets, scheme)
        paired = [(bleu_scores[sid], lqm.per_segment[sid]["score"])
                  for sid in lqm.per_segment if sid in bleu_scores]
        if len(paired) < 3:
            raise ValidationError(
                "fewer than 3 segments share a BLEU and an LQM score")
        report = analysis_mod.correlate([p[0] for p in paired],
                                        [p[1] for p in paired],
                                        permutation=args.permutation)
        _emit(report.to_dict(), args.out)
    elif args.report == "buckets":
        report = analysis_mod.length_buckets(corpus, sets, scheme)
        _emit(report.to_dict(), args.out)
        _maybe_print_table(args, lambda: _render_table(
            ["direction", "model", "short", "medium", "long"],
            [[f"{g['source_lang']}->{g['target_lang']}", g["model_id"]]
             + [("-" if g[b] is None else f"{g[b]:.2f}")
                for b in ("short", "medium", "long")]
             for g in report.micro_by_group]))
    else:
        raise ValidationError(f"unknown report {args.report!r}")
    return 0


def cmd_export(args) -> int:
    from .server.store import ProjectStore
    store = ProjectStore(args.store)
    try:
        segments_jsonl, annotations_jsonl = store.export_project(args.project)
    finally:
        store.close()
    for path, content in ((args.segments_out, segments_jsonl),
                          (args.annotations_out, annotations_jsonl)):
        directory = os.path.dirname(os.path.abspath(path)) or "."
        fd, tmp = tempfile.mkstemp(dir=directory, suffix=".tmp")
        with os.fdopen(fd, "w", encoding="utf-8") as f:
            f.write(content)
        os.replace(tmp, path)
    print(f"exported project {args.project}", file=sys.stderr)
    return 0


def cmd_serve(args) -> int:
    import uvicorn

    from .server import ProjectStore, create_app
    store = ProjectStore(args.store, taxonomy_dir=args.taxonomy_dir)
    app = create_app(store)
    uvicorn.run(app, host=args.host, port=args.port, log_level="warning")
    return 0


# -- parser ------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="lqm",
        description="Span-level MT quality evaluation toolkit")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, annotations_required=True):
        p.add_argument("--segments", required=True, help="segments.jsonl")
        p.add_argument("--annotations", required=annotations_required,
                       help="annotations.jsonl")
        p.add_argument("--taxonomy", default=None,
                       help="taxonomy file or built-in name (default: lqm)")

    p = sub.add_parser("validate", help="validate inputs, write nothing")
    common(p, annotations_required=False)
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("score", help="severity-weighted quality scores")
    common(p)
    p.add_argument("--weights", default=None, help="weight scheme JSON")
    p.add_argument("--annotators", default=None,
                   help="comma-separated annotators to pool (default: all)")
    p.add_argument("--out", default=None, help="report JSON path (default stdout)")
    p.add_argument("--format", choices=("json", "table"), default="json")
    p.set_defaults(func=cmd_score)

    p = sub.add_parser("iaa", help="inter-annotator agreement")
    common(p)
    p.add_argument("--annotators", required=True, help="two ids: A,B")
    p.add_argument("--scope", choices=("both", "all"), default="both",
                   help="doubly annotated subset (both) or every segment (all)")
    p.add_argument("--min-overlap", type=int, default=1)
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_iaa)

    p = sub.add_parser("bleu", help="sentence BLEU vs reference_text")
    p.add_argument("--segments", required=True)
    p.add_argument("--hyp-field", default="target_text")
    p.add_argument("--tok", default="whitespace",
                   help="whitespace | pretok | subword:VOCAB_FILE")
    p.add_argument("--lowercase", action="store_true")
    p.add_argument("--out", default=None)
    p.add_argument("--format", choices=("json", "table"), default="json")
    p.set_defaults(func=cmd_bleu)

    p = sub.add_parser("analyze", help="distributions, correlation, buckets")
    common(p)
    p.add_argument("--report", required=True,
                   choices=("dist", "attrib", "corr", "buckets"))
    p.add_argument("--level", default="subcategory",
                   choices=("category", "error_type", "subcategory"))
    p.add_argument("--direction", default=None, help="filter, SRC:TGT")
    p.add_argument("--dialect", default=None)
    p.add_argument("--model", default=None)
    p.add_argument("--weights", default=None)
    p.add_argument("--bleu", default=None, help="bleu.json for --report corr")
    p.add_argument("--permutation", action="store_true",
                   help="exact permutation p-values (n <= 10)")
    p.add_argument("--out", default=None)
    p.add_argument("--format", choices=("json", "table"), default="json")
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("export", help="export a stored annotation project")
    p.add_argument("--store", required=True, help="project store directory")
    p.add_argument("--project", required=True, help="project id")
    p.add_argument("--segments-out", required=True)
    p.add_argument("--annotations-out", required=True)
    p.set_defaults(func=cmd_export)

    p = sub.add_parser("serve", help="run the annotation HTTP server")
    p.add_argument("--store", required=True)
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8710)
    p.add_argument("--taxonomy-dir", default=None,
                   help="directory of extra .taxonomy files")
    p.set_defaults(func=cmd_serve)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ValidationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
