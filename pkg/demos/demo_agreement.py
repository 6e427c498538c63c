#!/usr/bin/env python3
"""Inter-annotator agreement on a doubly annotated toy set.

Two annotators mark overlapping but not identical spans; the demo
prints the greedy span matching, the three detection F1 flavors, and
per-criterion label agreement with Cohen's kappa.
"""

from lqm_eval import agreement_report
from lqm_eval.agreement import match_annotation_sets
from lqm_eval.corpus import AnnotationSet, ErrorSpan
from lqm_eval.taxonomy import TaxonomyPath


def span(annotator, span_id, segment_id, start, end, path, severity):
    return ErrorSpan(span_id=span_id, segment_id=segment_id,
                     annotator_id=annotator, start=start, end=end,
                     path=TaxonomyPath(*path), severity=severity)


NE = ("semantics", "lexical-semantics", "named-entity")
STD = ("sociolinguistics", "code-register-selection",
       "standardization-interference")
OMIT = ("semantics", "propositional-semantics", "omission")

ANNOTATOR_A = [
    span("A", "a1", "s1", 0, 12, NE, "major"),
    span("A", "a2", "s1", 20, 30, STD, "minor"),
    span("A", "a3", "s2", 5, 15, OMIT, "major"),
]
ANNOTATOR_B = [
    span("B", "b1", "s1", 2, 12, NE, "major"),      # same region, shifted
    span("B", "b2", "s1", 21, 29, STD, "major"),    # severity disagrees
    span("B", "b3", "s2", 5, 15, NE, "major"),      # category disagrees
    span("B", "b4", "s2", 30, 34, OMIT, "minor"),   # only B saw this
]


def main():
    a = AnnotationSet("A", "LQM", spans=ANNOTATOR_A,
                      segments_covered={"s1", "s2"})
    b = AnnotationSet("B", "LQM", spans=ANNOTATOR_B,
                      segments_covered={"s1", "s2"})

    matching = match_annotation_sets(a, b)
    print("matched pairs:")
    for pair in matching.pairs:
        print(f"  {pair.span_a.span_id} <-> {pair.span_b.span_id}  "
              f"overlap={pair.overlap_chars}  exact={pair.exact}")
    print("unmatched A:", [s.span_id for s in matching.unmatched_a])
    print("unmatched B:", [s.span_id for s in matching.unmatched_b])
    print()

    report = agreement_report(a, b)
    print(f"doubly annotated items: {report.n_items}")
    print(f"char F1          = {report.char_f1:.3f}")
    print(f"overlap span F1  = {report.overlap_span_f1:.3f}")
    print(f"exact span F1    = {report.exact_span_f1:.3f}")
    print()
    print(f"{'criterion':22} {'F1':>6} {'rate':>6} {'kappa':>7}")
    for criterion in report.label_f1:
        f1 = report.label_f1[criterion]
        rate = report.label_agreement_rate[criterion]
        kappa = report.kappa[criterion]
        print(f"{criterion:22} "
              f"{f1 if f1 is None else round(f1, 3)!s:>6} "
              f"{rate if rate is None else round(rate, 3)!s:>6} "
              f"{kappa if kappa is None else round(kappa, 3)!s:>7}")
    if report.undefined:
        print()
        print("absent values:")
        for key, reason in report.undefined.items():
            print(f"  {key}: {reason}")


if __name__ == "__main__":
    main()
