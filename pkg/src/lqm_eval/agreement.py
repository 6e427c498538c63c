"""Inter-annotator agreement over doubly annotated segments.

Span detection is measured three ways: character-level F1 over the
union of annotated positions, overlap span F1 (spans match if a greedy
one-to-one matching pairs them with >= 1 shared character), and exact
span F1 (identical boundaries).  Matching is greedy maximal-overlap:
candidate pairs sorted by (overlap desc, A.start, B.start) with further
deterministic tie-breakers, accepted while both spans are free.

On matched pairs, label agreement is reported per criterion both as a
detection-folded F1 (2 * agreeing / (|A| + |B|)) and as the plain rate
(agreeing / matched), together with Cohen's kappa computed from the
per-annotator marginal label distributions over matched pairs.
Undefined values (no matches, degenerate marginals) are explicit
absences with a reason, never NaN.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field

from .corpus import AnnotationSet, ErrorSpan
from .errors import AgreementError

CRITERIA = ("category", "severity", "category+severity",
            "fine_type", "span+type+severity")


@dataclass(frozen=True)
class MatchedPair:
    span_a: ErrorSpan
    span_b: ErrorSpan
    overlap_chars: int

    @property
    def exact(self) -> bool:
        return (self.span_a.start == self.span_b.start
                and self.span_a.end == self.span_b.end)


@dataclass
class SpanMatching:
    pairs: list[MatchedPair] = field(default_factory=list)
    unmatched_a: list[ErrorSpan] = field(default_factory=list)
    unmatched_b: list[ErrorSpan] = field(default_factory=list)

    @property
    def n_a(self) -> int:
        return len(self.pairs) + len(self.unmatched_a)

    @property
    def n_b(self) -> int:
        return len(self.pairs) + len(self.unmatched_b)

    def extend(self, other: "SpanMatching") -> None:
        self.pairs.extend(other.pairs)
        self.unmatched_a.extend(other.unmatched_a)
        self.unmatched_b.extend(other.unmatched_b)


def span_overlap(a: ErrorSpan, b: ErrorSpan) -> int:
    if a.segment_id != b.segment_id:
        return 0
    return min(a.end, b.end) - max(a.start, b.start)


def match_spans(a_spans, b_spans, min_overlap: int = 1) -> SpanMatching:
    """Greedy one-to-one matching maximizing character overlap.

    Only spans on the same segment are candidates.  Pairs are taken in
    (overlap desc, A.start, B.start, A.end, B.end, span ids) order; a
    pair is accepted iff neither span is already matched and its overlap
    is at least ``min_overlap``.
    """
    if min_overlap < 1:
        raise AgreementError("minimum overlap must be >= 1 character")
    a_spans = list(a_spans)
    b_spans = list(b_spans)
    candidates = []
    for a in a_spans:
        for b in b_spans:
            ov = span_overlap(a, b)
            if ov >= min_overlap:
                candidates.append((ov, a, b))
    candidates.sort(key=lambda t: (-t[0], t[1].start, t[2].start,
                                   t[1].end, t[2].end,
                                   t[1].span_id, t[2].span_id))
    taken_a: set[int] = set()
    taken_b: set[int] = set()
    matching = SpanMatching()
    for ov, a, b in candidates:
        if id(a) in taken_a or id(b) in taken_b:
            continue
        taken_a.add(id(a))
        taken_b.add(id(b))
        matching.pairs.append(MatchedPair(a, b, ov))
    matching.unmatched_a = [a for a in a_spans if id(a) not in taken_a]
    matching.unmatched_b = [b for b in b_spans if id(b) not in taken_b]
    return matching


def _check_coverage(a_set: AnnotationSet, b_set: AnnotationSet) -> list[str]:
    only = sorted(a_set.segments_covered ^ b_set.segments_covered)
    if only:
        raise AgreementError(
            "annotators cover different segments; covered by one side "
            f"only: {', '.join(only[:20])}"
            + (" ..." if len(only) > 20 else ""))
    return sorted(a_set.segments_covered)


def _spans_by_segment(aset: AnnotationSet) -> dict[str, list[ErrorSpan]]:
    out: dict[str, list[ErrorSpan]] = {}
    for span in aset.spans:
        out.setdefault(span.segment_id, []).append(span)
    return out


def char_f1(a_set: AnnotationSet, b_set: AnnotationSet) -> float:
    """Micro-pooled F1 of annotated character-position sets."""
    covered = _check_coverage(a_set, b_set)
    by_a = _spans_by_segment(a_set)
    by_b = _spans_by_segment(b_set)
    tp = fp = fn = 0
    for sid in covered:
        pos_a: set[int] = set()
        for span in by_a.get(sid, []):
            pos_a.update(range(span.start, span.end))
        pos_b: set[int] = set()
        for span in by_b.get(sid, []):
            pos_b.update(range(span.start, span.end))
        tp += len(pos_a & pos_b)
        fp += len(pos_a - pos_b)
        fn += len(pos_b - pos_a)
    if tp + fp + fn == 0:
        return 1.0
    return 2 * tp / (2 * tp + fp + fn)


def match_annotation_sets(a_set: AnnotationSet, b_set: AnnotationSet,
                          min_overlap: int = 1) -> SpanMatching:
    """Per-segment greedy matching, aggregated over the shared coverage."""
    covered = _check_coverage(a_set, b_set)
    by_a = _spans_by_segment(a_set)
    by_b = _spans_by_segment(b_set)
    total = SpanMatching()
    for sid in covered:
        total.extend(match_spans(by_a.get(sid, []), by_b.get(sid, []),
                                 min_overlap))
    return total


def span_f1(matching: SpanMatching, mode: str = "overlap") -> float:
    """Detection F1 from a matching; 'overlap' or 'exact' boundaries.

    Matched pairs count as true positives; in exact mode a pair with
    differing boundaries counts against both sides, so the denominator
    is |A| + |B| in both modes and exact <= overlap always holds.
    """
    if mode not in ("overlap", "exact"):
        raise AgreementError(f"unknown span matching mode {mode!r}")
    tp = len(matching.pairs)
    if mode == "exact":
        tp = sum(1 for p in matching.pairs if p.exact)
    denom = matching.n_a + matching.n_b
    if denom == 0:
        return 1.0
    return 2 * tp / denom


def _criterion_label(span: ErrorSpan, criterion: str):
    if criterion == "category":
        return span.path.category
    if criterion == "severity":
        return span.severity
    if criterion == "category+severity":
        return (span.path.category, span.severity)
    if criterion == "fine_type":
        return span.path.ids()
    if criterion == "span+type+severity":
        return (span.start, span.end, span.path.ids(), span.severity)
    raise AgreementError(f"unknown agreement criterion {criterion!r}")


def cohen_kappa(labels_a, labels_b) -> tuple[float | None, str | None]:
    """(kappa, None) or (None, reason) when undefined."""
    labels_a = list(labels_a)
    labels_b = list(labels_b)
    n = len(labels_a)
    if n != len(labels_b):
        raise AgreementError("label sequences differ in length")
    if n == 0:
        return None, "zero matched pairs"
    p_o = sum(1 for x, y in zip(labels_a, labels_b) if x == y) / n
    marg_a = Counter(labels_a)
    marg_b = Counter(labels_b)
    p_e = sum((marg_a[label] / n) * (marg_b[label] / n)
              for label in set(marg_a) | set(marg_b))
    if p_e >= 1.0:
        return None, "degenerate marginals (expected agreement is 1)"
    return (p_o - p_e) / (1.0 - p_e), None


@dataclass
class LabelAgreement:
    f1: float | None
    rate: float | None
    kappa: float | None
    reasons: dict[str, str] = field(default_factory=dict)


def label_agreement(matching: SpanMatching, criterion: str) -> LabelAgreement:
    """Agreement on matched pairs under one criterion."""
    k = len(matching.pairs)
    if k == 0:
        reason = "zero matched pairs"
        return LabelAgreement(None, None, None,
                              {"f1": reason, "rate": reason, "kappa": reason})
    labels_a = [_criterion_label(p.span_a, criterion) for p in matching.pairs]
    labels_b = [_criterion_label(p.span_b, criterion) for p in matching.pairs]
    agree = sum(1 for x, y in zip(labels_a, labels_b) if x == y)
    rate = agree / k
    folded = 2 * agree / (matching.n_a + matching.n_b)
    kappa, reason = cohen_kappa(labels_a, labels_b)
    reasons = {} if reason is None else {"kappa": reason}
    return LabelAgreement(folded, rate, kappa, reasons)


@dataclass
class AgreementReport:
    annotators: tuple[str, str]
    n_items: int
    char_f1: float
    overlap_span_f1: float
    exact_span_f1: float
    n_spans_a: int
    n_spans_b: int
    matched_pairs: int
    label_f1: dict[str, float | None]
    label_agreement_rate: dict[str, float | None]
    kappa: dict[str, float | None]
    undefined: dict[str, str]

    def to_dict(self) -> dict:
        return {
            "annotators": list(self.annotators),
            "n_items": self.n_items,
            "char_f1": self.char_f1,
            "overlap_span_f1": self.overlap_span_f1,
            "exact_span_f1": self.exact_span_f1,
            "n_spans_a": self.n_spans_a,
            "n_spans_b": self.n_spans_b,
            "matched_pairs": self.matched_pairs,
            "label_f1": self.label_f1,
            "label_agreement_rate": self.label_agreement_rate,
            "kappa": self.kappa,
            "undefined": self.undefined,
        }


def agreement_report(a_set: AnnotationSet, b_set: AnnotationSet,
                     corpus=None, min_overlap: int = 1,
                     scope=None) -> AgreementReport:
    """Full agreement suite over the doubly annotated subset.

    The subset defaults to the intersection of the two annotators'
    coverage; pass ``scope`` (segment ids) to override, e.g. with every
    assigned segment when explicit coverage is known.
    """
    if scope is None:
        shared = a_set.segments_covered & b_set.segments_covered
    else:
        shared = set(scope)
    if corpus is not None:
        unknown = sorted(sid for sid in shared if sid not in corpus)
        if unknown:
            raise AgreementError(
                f"scope references unknown segments: {', '.join(unknown[:20])}")
    if not shared:
        raise AgreementError("no doubly annotated segments in scope")
    a_r = a_set.restricted_to(shared)
    b_r = b_set.restricted_to(shared)
    # After restriction both cover exactly the scope; make that explicit
    # so coverage checks inside the metrics cannot fire.
    a_r.segments_covered = set(shared)
    b_r.segments_covered = set(shared)

    matching = match_annotation_sets(a_r, b_r, min_overlap)
    label_f1: dict[str, float | None] = {}
    rates: dict[str, float | None] = {}
    kappas: dict[str, float | None] = {}
    undefined: dict[str, str] = {}
    for criterion in CRITERIA:
        la = label_agreement(matching, criterion)
        label_f1[criterion] = la.f1
        rates[criterion] = la.rate
        kappas[criterion] = la.kappa
        for metric, reason in la.reasons.items():
            undefined[f"{metric}.{criterion}"] = reason
    return AgreementReport(
        annotators=(a_set.annotator_id, b_set.annotator_id),
        n_items=len(shared),
        char_f1=char_f1(a_r, b_r),
        overlap_span_f1=span_f1(matching, "overlap"),
        exact_span_f1=span_f1(matching, "exact"),
        n_spans_a=matching.n_a,
        n_spans_b=matching.n_b,
        matched_pairs=len(matching.pairs),
        label_f1=label_f1,
        label_agreement_rate=rates,
        kappa=kappas,
        undefined=undefined,
    )
