"""Data model and bit-exact JSONL I/O for segments and span annotations.

Offsets are counted in Unicode scalar values (Python code points), never
bytes or UTF-16 units.  All texts are NFC-normalized at ingestion and
offsets are defined against the normalized text, which keeps spans over
Arabic script with combining marks stable across round-trips.

segments.jsonl record:
    {segment_id, source_lang, target_lang, dialect, model_id,
     source_text, target_text, reference_text?}
annotations.jsonl record:
    {span_id, segment_id, annotator_id, start, end,
     category, error_type?, subcategory?, severity, note?}

An optional ``span_text`` field on annotation records, when present, is
verified against the extracted substring.  Optional ``target_tokens`` /
``reference_tokens`` arrays on segment records feed the pretokenized
BLEU path.
"""

from __future__ import annotations

import json
import unicodedata
from dataclasses import dataclass, field

from .errors import CorpusError
from .taxonomy import TaxonomyPath, TaxonomySchema

SEVERITIES = ("minor", "major", "critical")

DIALECTS = ("Egyptian", "Emirati", "Jordanian", "Mauritanian",
            "Moroccan", "Palestinian", "Yemeni")

_SEGMENT_REQUIRED = ("segment_id", "source_lang", "target_lang",
                     "model_id", "source_text", "target_text")
_SPAN_REQUIRED = ("span_id", "segment_id", "annotator_id", "start", "end",
                  "category", "severity")


def _nfc(text: str) -> str:
    return unicodedata.normalize("NFC", text)


@dataclass(frozen=True)
class Segment:
    segment_id: str
    source_lang: str
    target_lang: str
    model_id: str
    source_text: str
    target_text: str
    dialect: str | None = None
    reference_text: str | None = None
    target_tokens: tuple[str, ...] | None = None
    reference_tokens: tuple[str, ...] | None = None

    @property
    def direction(self) -> tuple[str, str]:
        return (self.source_lang, self.target_lang)


@dataclass(frozen=True)
class ErrorSpan:
    span_id: str
    segment_id: str
    annotator_id: str
    start: int
    end: int
    path: TaxonomyPath
    severity: str
    note: str | None = None

    def __post_init__(self):
        if self.severity not in SEVERITIES:
            raise CorpusError(
                f"span {self.span_id!r}: unknown severity {self.severity!r}; "
                f"expected one of {SEVERITIES}")
        if not (0 <= self.start < self.end):
            raise CorpusError(
                f"span {self.span_id!r}: invalid offsets "
                f"[{self.start}, {self.end})")


@dataclass
class AnnotationSet:
    """All spans by one annotator, plus the segments they covered."""

    annotator_id: str
    taxonomy_name: str
    spans: list[ErrorSpan] = field(default_factory=list)
    segments_covered: set[str] = field(default_factory=set)

    def spans_for(self, segment_id: str) -> list[ErrorSpan]:
        return [s for s in self.spans if s.segment_id == segment_id]

    def restricted_to(self, segment_ids) -> "AnnotationSet":
        keep = set(segment_ids)
        return AnnotationSet(
            annotator_id=self.annotator_id,
            taxonomy_name=self.taxonomy_name,
            spans=[s for s in self.spans if s.segment_id in keep],
            segments_covered=self.segments_covered & keep,
        )


class Corpus:
    """Ordered, id-indexed segment collection."""

    def __init__(self, segments: list[Segment]):
        self.segments = list(segments)
        self.by_id: dict[str, Segment] = {}
        for seg in self.segments:
            if seg.segment_id in self.by_id:
                raise CorpusError(f"duplicate segment_id {seg.segment_id!r}")
            self.by_id[seg.segment_id] = seg

    def __len__(self) -> int:
        return len(self.segments)

    def __iter__(self):
        return iter(self.segments)

    def __contains__(self, segment_id: str) -> bool:
        return segment_id in self.by_id


def _parse_jsonl(source: str, what: str):
    for lineno, raw in enumerate(source.splitlines(), start=1):
        if not raw.strip():
            continue
        try:
            record = json.loads(raw)
        except json.JSONDecodeError as exc:
            raise CorpusError(f"{what} line {lineno}: malformed JSON: {exc}") from None
        if not isinstance(record, dict):
            raise CorpusError(f"{what} line {lineno}: record is not an object")
        yield lineno, record


def _require(record: dict, keys, what: str, lineno: int):
    missing = [k for k in keys if k not in record or record[k] is None]
    if missing:
        raise CorpusError(
            f"{what} line {lineno}: missing field(s) {', '.join(missing)}")


def read_segments(source: str) -> list[Segment]:
    """Parse segments.jsonl content, in file order.

    Rejects duplicate ids and empty (or whitespace-only) targets, naming
    the offending line.
    """
    segments: list[Segment] = []
    seen: set[str] = set()
    for lineno, rec in _parse_jsonl(source, "segments"):
        _require(rec, _SEGMENT_REQUIRED, "segments", lineno)
        sid = str(rec["segment_id"])
        if sid in seen:
            raise CorpusError(f"segments line {lineno}: duplicate segment_id {sid!r}")
        seen.add(sid)
        target = _nfc(str(rec["target_text"]))
        if not target.split():
            raise CorpusError(f"segments line {lineno}: empty target_text")
        dialect = rec.get("dialect")
        if dialect is not None:
            dialect = str(dialect)
        reference = rec.get("reference_text")
        if reference is not None:
            reference = _nfc(str(reference))

        def _tokens(key):
            value = rec.get(key)
            if value is None:
                return None
            if (not isinstance(value, list)
                    or not all(isinstance(t, str) for t in value)):
                raise CorpusError(
                    f"segments line {lineno}: {key} must be an array of strings")
            return tuple(_nfc(t) for t in value)

        segments.append(Segment(
            segment_id=sid,
            source_lang=str(rec["source_lang"]),
            target_lang=str(rec["target_lang"]),
            model_id=str(rec["model_id"]),
            source_text=_nfc(str(rec["source_text"])),
            target_text=target,
            dialect=dialect,
            reference_text=reference,
            target_tokens=_tokens("target_tokens"),
            reference_tokens=_tokens("reference_tokens"),
        ))
    return segments


def segment_to_record(seg: Segment) -> dict:
    record = {
        "segment_id": seg.segment_id,
        "source_lang": seg.source_lang,
        "target_lang": seg.target_lang,
        "dialect": seg.dialect,
        "model_id": seg.model_id,
        "source_text": seg.source_text,
        "target_text": seg.target_text,
    }
    if seg.reference_text is not None:
        record["reference_text"] = seg.reference_text
    if seg.target_tokens is not None:
        record["target_tokens"] = list(seg.target_tokens)
    if seg.reference_tokens is not None:
        record["reference_tokens"] = list(seg.reference_tokens)
    return record


def write_segments(segments) -> str:
    lines = [json.dumps(segment_to_record(s), ensure_ascii=False)
             for s in segments]
    return "".join(line + "\n" for line in lines)


def validate_span_against(span: ErrorSpan, segment: Segment,
                          schema: TaxonomySchema,
                          span_text: str | None = None) -> None:
    """Bounds + taxonomy validation for one span. Raises CorpusError."""
    text = segment.target_text
    if span.end > len(text):
        raise CorpusError(
            f"span {span.span_id!r}: end {span.end} beyond target length "
            f"{len(text)} of segment {span.segment_id!r}")
    result = schema.validate_path(span.path)
    if not result.valid:
        raise CorpusError(
            f"span {span.span_id!r}: invalid taxonomy path "
            f"{'/'.join(span.path.ids())}: {result.problem}")
    if span_text is not None and text[span.start:span.end] != _nfc(span_text):
        raise CorpusError(
            f"span {span.span_id!r}: span_text does not match the "
            f"substring at [{span.start}, {span.end})")


def span_to_record(span: ErrorSpan) -> dict:
    record = {
        "span_id": span.span_id,
        "segment_id": span.segment_id,
        "annotator_id": span.annotator_id,
        "start": span.start,
        "end": span.end,
        "category": span.path.category,
    }
    if span.path.error_type is not None:
        record["error_type"] = span.path.error_type
    if span.path.subcategory is not None:
        record["subcategory"] = span.path.subcategory
    record["severity"] = span.severity
    if span.note is not None:
        record["note"] = span.note
    return record


def span_from_record(rec: dict, *, lineno: int = 0) -> tuple[ErrorSpan, str | None]:
    """Build an ErrorSpan from a record; returns (span, raw span_text?)."""
    where = f"annotations line {lineno}" if lineno else "annotation record"
    _require(rec, _SPAN_REQUIRED, "annotations", lineno)
    try:
        start, end = int(rec["start"]), int(rec["end"])
    except (TypeError, ValueError):
        raise CorpusError(f"{where}: start/end must be integers") from None
    error_type = rec.get("error_type")
    subcategory = rec.get("subcategory")
    if subcategory is not None and error_type is None:
        raise CorpusError(f"{where}: subcategory given without error_type")
    note = rec.get("note")
    span = ErrorSpan(
        span_id=str(rec["span_id"]),
        segment_id=str(rec["segment_id"]),
        annotator_id=str(rec["annotator_id"]),
        start=start,
        end=end,
        path=TaxonomyPath(
            category=str(rec["category"]),
            error_type=None if error_type is None else str(error_type),
            subcategory=None if subcategory is None else str(subcategory),
        ),
        severity=str(rec["severity"]),
        note=None if note is None else _nfc(str(note)),
    )
    span_text = rec.get("span_text")
    return span, (None if span_text is None else str(span_text))


def read_annotations(source: str, segments, schema: TaxonomySchema,
                     ) -> dict[str, AnnotationSet]:
    """Parse annotations.jsonl, validating every span; group per annotator.

    Returns annotator_id -> AnnotationSet, annotators in first-seen order.
    """
    corpus = segments if isinstance(segments, Corpus) else Corpus(list(segments))
    sets: dict[str, AnnotationSet] = {}
    seen_ids: set[str] = set()
    for lineno, rec in _parse_jsonl(source, "annotations"):
        try:
            span, span_text = span_from_record(rec, lineno=lineno)
        except CorpusError:
            raise
        if span.span_id in seen_ids:
            raise CorpusError(
                f"annotations line {lineno}: duplicate span_id {span.span_id!r}")
        seen_ids.add(span.span_id)
        if span.segment_id not in corpus:
            raise CorpusError(
                f"annotations line {lineno}: unknown segment_id "
                f"{span.segment_id!r}")
        try:
            validate_span_against(span, corpus.by_id[span.segment_id],
                                  schema, span_text)
        except CorpusError as exc:
            raise CorpusError(f"annotations line {lineno}: {exc}") from None
        aset = sets.get(span.annotator_id)
        if aset is None:
            aset = AnnotationSet(annotator_id=span.annotator_id,
                                 taxonomy_name=schema.name)
            sets[span.annotator_id] = aset
        aset.spans.append(span)
        aset.segments_covered.add(span.segment_id)
    return sets


def write_annotations(sets) -> str:
    """Serialize annotation sets to JSONL; inverse of read_annotations.

    Sets are written in ascending annotator order, spans in stored order,
    so unchanged inputs always produce identical bytes.
    """
    if isinstance(sets, dict):
        sets = list(sets.values())
    lines = []
    for aset in sorted(sets, key=lambda s: s.annotator_id):
        for span in aset.spans:
            lines.append(json.dumps(span_to_record(span), ensure_ascii=False))
    return "".join(line + "\n" for line in lines)


def pooled_spans(sets, annotators=None) -> dict[str, list[ErrorSpan]]:
    """segment_id -> spans pooled across annotation sets.

    ``annotators`` restricts pooling to the named annotators.
    """
    if isinstance(sets, dict):
        sets = list(sets.values())
    wanted = None if annotators is None else set(annotators)
    out: dict[str, list[ErrorSpan]] = {}
    for aset in sets:
        if wanted is not None and aset.annotator_id not in wanted:
            continue
        for span in aset.spans:
            out.setdefault(span.segment_id, []).append(span)
    return out
