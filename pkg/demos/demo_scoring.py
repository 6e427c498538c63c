#!/usr/bin/env python3
"""Walk through severity-weighted scoring on a toy bilingual corpus.

Builds six segments across two systems, attaches a handful of error
spans, and prints per-segment scores plus the macro/micro aggregates,
including the case where they disagree because of clamping.
"""

import json

from lqm_eval import (Corpus, WeightScheme, load_builtin, micro_score,
                      read_annotations, read_segments, score_report,
                      segment_score)

SEGMENTS = [
    {"segment_id": "egy-1", "source_lang": "EGY", "target_lang": "ENG",
     "dialect": "Egyptian", "model_id": "system-a",
     "source_text": "يا إلهي أنت طرت لفوق",
     "target_text": "Oh my God you have gone so high up there"},
    {"segment_id": "egy-2", "source_lang": "EGY", "target_lang": "ENG",
     "dialect": "Egyptian", "model_id": "system-a",
     "source_text": "مش كل مرة",
     "target_text": "the jar does not stay safe every time"},
    {"segment_id": "egy-3", "source_lang": "EGY", "target_lang": "ENG",
     "dialect": "Egyptian", "model_id": "system-b",
     "source_text": "صباح الخير",
     "target_text": "good morning my dear friend"},
    {"segment_id": "egy-4", "source_lang": "EGY", "target_lang": "ENG",
     "dialect": "Egyptian", "model_id": "system-b",
     "source_text": "كلام فاضي",
     "target_text": "empty talk"},
]

SPANS = [
    # a literal proverb rendering: the whole clause, major severity
    {"span_id": "p1", "segment_id": "egy-2", "annotator_id": "lin1",
     "start": 0, "end": 37, "category": "pragmatics",
     "error_type": "use-context-cultural-appropriateness",
     "subcategory": "mwes-proverbs", "severity": "major"},
    # an added intensifier, minor
    {"span_id": "p2", "segment_id": "egy-1", "annotator_id": "lin1",
     "start": 32, "end": 40, "category": "semantics",
     "error_type": "propositional-semantics", "subcategory": "addition",
     "severity": "minor"},
    # short segment with a critical hallucination: clamping territory
    {"span_id": "p3", "segment_id": "egy-4", "annotator_id": "lin1",
     "start": 0, "end": 10, "category": "semantics",
     "error_type": "propositional-semantics", "subcategory": "hallucination",
     "severity": "critical"},
]


def main():
    schema = load_builtin("lqm")
    corpus = Corpus(read_segments(
        "".join(json.dumps(r, ensure_ascii=False) + "\n" for r in SEGMENTS)))
    sets = read_annotations(
        "".join(json.dumps(s, ensure_ascii=False) + "\n" for s in SPANS),
        corpus, schema)

    scheme = WeightScheme()
    print("severity weights:", scheme.severity_weights)
    print()

    spans_by_segment = {}
    for aset in sets.values():
        for span in aset.spans:
            spans_by_segment.setdefault(span.segment_id, []).append(span)

    for seg in corpus:
        spans = spans_by_segment.get(seg.segment_id, [])
        score = segment_score(seg, spans, scheme)
        marked = [seg.target_text[s.start:s.end] for s in spans]
        print(f"{seg.segment_id}: score={score:6.2f}  "
              f"L={len(seg.target_text.split()):2d}  spans={marked}")

    print()
    report = score_report(corpus, sets, scheme)
    for group in report.per_group:
        print(f"{group.source_lang}->{group.target_lang} {group.model_id}: "
              f"macro={group.macro_mean:.2f}  micro={group.micro_score:.2f}")

    print()
    print("macro vs micro when clamping fires:")
    seg4 = corpus.by_id["egy-4"]
    seg3 = corpus.by_id["egy-3"]
    spans4 = spans_by_segment["egy-4"]
    macro = (segment_score(seg3, [], scheme)
             + segment_score(seg4, spans4, scheme)) / 2
    micro = micro_score([(seg3, []), (seg4, spans4)], scheme)
    print(f"  per-segment mean = {macro:.2f}, pooled micro = {micro:.2f}")
    print("  the critical span exceeds the short segment's length, so the")
    print("  per-segment clamp hides error mass that micro pooling keeps")


if __name__ == "__main__":
    main()
