"""Severity-weighted quality scores.

Per-segment score for a translation of length L tokens carrying error
spans with severity weights s_i:

    score = max(0, 100 * (1 - sum_i(s_i * type_weight) / L))

with default weights minor=1, major=5, critical=25 and a uniform type
weight of 1.  The micro-averaged group score pools error mass and
length first and divides once:

    micro = max(0, 100 - 100 * sum(E_s) / sum(L_s))

Per-segment clamping happens before macro averaging; micro clamping
happens once at the end.  Span weights are summed in (start, end,
span_id) order so results are reproducible bit for bit.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

from .corpus import Corpus, Segment, SEVERITIES, pooled_spans
from .errors import ScoringError

DEFAULT_SEVERITY_WEIGHTS = {"minor": 1.0, "major": 5.0, "critical": 25.0}


@dataclass(frozen=True)
class WeightScheme:
    severity_weights: dict[str, float] = field(
        default_factory=lambda: dict(DEFAULT_SEVERITY_WEIGHTS))
    type_weight: float = 1.0

    def __post_init__(self):
        missing = [s for s in SEVERITIES if s not in self.severity_weights]
        if missing:
            raise ScoringError(f"weight scheme missing severities: {missing}")
        bad = {k: v for k, v in self.severity_weights.items() if v < 0}
        if bad or self.type_weight < 0:
            raise ScoringError(f"weights must be >= 0, got {bad or self.type_weight}")

    def weight(self, severity: str) -> float:
        return self.severity_weights[severity] * self.type_weight

    def to_dict(self) -> dict:
        return {"severity_weights": {s: self.severity_weights[s] for s in SEVERITIES},
                "type_weight": self.type_weight}

    @classmethod
    def from_json(cls, source: str) -> "WeightScheme":
        try:
            data = json.loads(source)
        except json.JSONDecodeError as exc:
            raise ScoringError(f"weight scheme file is not valid JSON: {exc}") from None
        weights = {str(k): float(v)
                   for k, v in data.get("severity_weights", {}).items()}
        merged = dict(DEFAULT_SEVERITY_WEIGHTS)
        merged.update(weights)
        return cls(severity_weights=merged,
                   type_weight=float(data.get("type_weight", 1.0)))


@dataclass
class GroupScore:
    source_lang: str
    target_lang: str
    model_id: str
    n_segments: int
    macro_mean: float
    micro_score: float


@dataclass
class ScoreReport:
    scheme: WeightScheme
    per_segment: dict[str, dict]
    per_group: list[GroupScore]

    def to_dict(self) -> dict:
        return {
            "scheme": self.scheme.to_dict(),
            "per_segment": self.per_segment,
            "per_group": [
                {
                    "source_lang": g.source_lang,
                    "target_lang": g.target_lang,
                    "model_id": g.model_id,
                    "n_segments": g.n_segments,
                    "macro_mean": g.macro_mean,
                    "micro_score": g.micro_score,
                }
                for g in self.per_group
            ],
        }


def token_length(text: str) -> int:
    """Number of maximal non-whitespace runs after trimming."""
    return len(text.split())


def error_mass(spans, scheme: WeightScheme) -> float:
    """Summed severity weights, in (start, end, span_id) order."""
    total = 0.0
    for span in sorted(spans, key=lambda s: (s.start, s.end, s.span_id)):
        total += scheme.weight(span.severity)
    return total


def segment_score(segment: Segment, spans, scheme: WeightScheme | None = None,
                  ) -> float:
    """Severity-weighted score in [0, 100] for one segment."""
    scheme = scheme or WeightScheme()
    for span in spans:
        if span.segment_id != segment.segment_id:
            raise ScoringError(
                f"span {span.span_id!r} belongs to segment "
                f"{span.segment_id!r}, not {segment.segment_id!r}")
    length = token_length(segment.target_text)
    if length < 1:
        raise ScoringError(
            f"segment {segment.segment_id!r} has no tokens; unscorable")
    return max(0.0, 100.0 * (1.0 - error_mass(spans, scheme) / length))


def micro_score(segments_with_spans, scheme: WeightScheme | None = None) -> float:
    """Pooled score over (segment, spans) pairs: sum first, divide once."""
    scheme = scheme or WeightScheme()
    pairs = list(segments_with_spans)
    if not pairs:
        raise ScoringError("micro score of an empty group is undefined")
    total_mass = 0.0
    total_length = 0
    for segment, spans in pairs:
        length = token_length(segment.target_text)
        if length < 1:
            raise ScoringError(
                f"segment {segment.segment_id!r} has no tokens; unscorable")
        total_mass += error_mass(spans, scheme)
        total_length += length
    return max(0.0, 100.0 - 100.0 * (total_mass / total_length))


def score_report(corpus: Corpus, annotation_sets, scheme: WeightScheme | None = None,
                 annotators=None) -> ScoreReport:
    """Per-segment scores plus macro and micro scores per model x direction.

    Spans from all annotation sets are pooled per segment unless
    ``annotators`` restricts them.  Unannotated segments score 100 and
    participate in every aggregate.  Groups are ordered by
    (source_lang, target_lang, model_id).
    """
    scheme = scheme or WeightScheme()
    spans_by_segment = pooled_spans(annotation_sets, annotators)

    per_segment: dict[str, dict] = {}
    groups: dict[tuple[str, str, str], list[Segment]] = {}
    for seg in corpus:
        spans = spans_by_segment.get(seg.segment_id, [])
        length = token_length(seg.target_text)
        per_segment[seg.segment_id] = {
            "score": segment_score(seg, spans, scheme),
            "error_mass": error_mass(spans, scheme),
            "length": length,
        }
        key = (seg.source_lang, seg.target_lang, seg.model_id)
        groups.setdefault(key, []).append(seg)

    per_group = []
    for key in sorted(groups):
        source_lang, target_lang, model_id = key
        members = groups[key]
        scores = [per_segment[s.segment_id]["score"] for s in members]
        micro = micro_score(
            ((s, spans_by_segment.get(s.segment_id, [])) for s in members),
            scheme)
        per_group.append(GroupScore(
            source_lang=source_lang,
            target_lang=target_lang,
            model_id=model_id,
            n_segments=len(members),
            macro_mean=sum(scores) / len(scores),
            micro_score=micro,
        ))
    return ScoreReport(scheme=scheme, per_segment=per_segment,
                       per_group=per_group)
