"""Statistical analyses: distributions, attribution, correlation, buckets.

Distribution and attribution tables report raw span counts with
percentage rates, plus a severity-weighted variant alongside.
Correlations are Pearson on raw values and Spearman as Pearson on
average ranks, with two-sided p-values from the t approximation and an
optional exact permutation test for small n.  Length buckets cut on the
nearest-rank 33rd/66th percentiles of target-side token counts, with
boundary values going to the lower bucket; rank stability is the
Spearman correlation of model scores between bucket pairs per
direction.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field

from scipy import stats as _scipy_stats

from .corpus import Corpus, pooled_spans
from .errors import AnalysisError
from .scoring import WeightScheme, micro_score, token_length

LEVELS = ("category", "error_type", "subcategory")
BUCKETS = ("short", "medium", "long")
BUCKET_PAIRS = (("short", "medium"), ("medium", "long"), ("short", "long"))


@dataclass(frozen=True)
class Scope:
    """Optional filters applied via each span's segment."""

    source_lang: str | None = None
    target_lang: str | None = None
    dialect: str | None = None
    model_id: str | None = None

    def admits(self, segment) -> bool:
        return ((self.source_lang is None or segment.source_lang == self.source_lang)
                and (self.target_lang is None or segment.target_lang == self.target_lang)
                and (self.dialect is None or segment.dialect == self.dialect)
                and (self.model_id is None or segment.model_id == self.model_id))

    def to_dict(self) -> dict:
        return {k: v for k, v in (
            ("source_lang", self.source_lang),
            ("target_lang", self.target_lang),
            ("dialect", self.dialect),
            ("model_id", self.model_id)) if v is not None}


@dataclass
class DistributionRow:
    key: tuple[str, ...] | str
    count: int
    rate: float
    weighted_mass: float
    weighted_rate: float | None


@dataclass
class DistributionTable:
    grouping: str
    scope: dict
    total: int
    rows: list[DistributionRow]

    def to_dict(self) -> dict:
        return {
            "grouping": self.grouping,
            "scope": self.scope,
            "total": self.total,
            "rows": [
                {
                    "key": list(r.key) if isinstance(r.key, tuple) else r.key,
                    "count": r.count,
                    "rate": r.rate,
                    "weighted_mass": r.weighted_mass,
                    "weighted_rate": r.weighted_rate,
                }
                for r in self.rows
            ],
        }


def _scoped_spans(annotation_sets, corpus: Corpus, scope: Scope | None,
                  annotators=None):
    scope = scope or Scope()
    for sid, spans in pooled_spans(annotation_sets, annotators).items():
        segment = corpus.by_id.get(sid)
        if segment is None:
            raise AnalysisError(f"spans reference unknown segment {sid!r}")
        if scope.admits(segment):
            for span in spans:
                yield segment, span


def _build_table(grouping: str, scope: Scope | None, counts, masses,
                 key_order) -> DistributionTable:
    total = sum(counts.values())
    total_mass = sum(masses.values())
    rows = []
    for key in sorted(counts, key=lambda k: (-counts[k], key_order(k))):
        rows.append(DistributionRow(
            key=key,
            count=counts[key],
            rate=100.0 * counts[key] / total if total else 0.0,
            weighted_mass=masses[key],
            weighted_rate=(100.0 * masses[key] / total_mass
                           if total_mass else None),
        ))
    return DistributionTable(
        grouping=grouping,
        scope=(scope or Scope()).to_dict(),
        total=total,
        rows=rows,
    )


def error_distribution(annotation_sets, schema, level: str, corpus: Corpus,
                       scope: Scope | None = None,
                       scheme: WeightScheme | None = None,
                       annotators=None) -> DistributionTable:
    """Span counts and rates by taxonomy path truncated at ``level``.

    Rows are sorted by descending count, ties by path id.  Paths that do
    not reach the requested level keep their deepest available node.
    """
    if level not in LEVELS:
        raise AnalysisError(f"unknown level {level!r}; expected one of {LEVELS}")
    depth = LEVELS.index(level) + 1
    scheme = scheme or WeightScheme()
    counts: dict[tuple, int] = {}
    masses: dict[tuple, float] = {}
    for _, span in _scoped_spans(annotation_sets, corpus, scope, annotators):
        key = span.path.ids()[:depth]
        counts[key] = counts.get(key, 0) + 1
        masses[key] = masses.get(key, 0.0) + scheme.weight(span.severity)
    return _build_table(f"taxonomy:{level}", scope, counts, masses,
                        key_order=lambda k: k)


def model_attribution(annotation_sets, corpus: Corpus,
                      scope: Scope | None = None,
                      scheme: WeightScheme | None = None,
                      annotators=None) -> DistributionTable:
    """Share of error spans attributed to each model within a scope."""
    scheme = scheme or WeightScheme()
    counts: dict[str, int] = {}
    masses: dict[str, float] = {}
    for segment, span in _scoped_spans(annotation_sets, corpus, scope,
                                       annotators):
        counts[segment.model_id] = counts.get(segment.model_id, 0) + 1
        masses[segment.model_id] = (masses.get(segment.model_id, 0.0)
                                    + scheme.weight(span.severity))
    return _build_table("model_id", scope, counts, masses,
                        key_order=lambda k: k)


def directions_in(corpus: Corpus) -> list[tuple[str, str]]:
    return sorted({(s.source_lang, s.target_lang) for s in corpus})


def average_ranks(values) -> list[float]:
    """1-based ranks with ties averaged."""
    values = list(values)
    order = sorted(range(len(values)), key=lambda i: values[i])
    ranks = [0.0] * len(values)
    i = 0
    while i < len(order):
        j = i
        while j + 1 < len(order) and values[order[j + 1]] == values[order[i]]:
            j += 1
        avg = (i + j) / 2.0 + 1.0
        for k in range(i, j + 1):
            ranks[order[k]] = avg
        i = j + 1
    return ranks


def _pearson(x, y) -> float | None:
    n = len(x)
    mx = sum(x) / n
    my = sum(y) / n
    dx = [v - mx for v in x]
    dy = [v - my for v in y]
    sxx = sum(v * v for v in dx)
    syy = sum(v * v for v in dy)
    if sxx == 0.0 or syy == 0.0:
        return None
    sxy = sum(a * b for a, b in zip(dx, dy))
    r = sxy / math.sqrt(sxx * syy)
    return max(-1.0, min(1.0, r))


def _t_approx_p(r: float, n: int) -> float:
    if abs(r) >= 1.0:
        return 0.0
    t = r * math.sqrt((n - 2) / (1.0 - r * r))
    return 2.0 * float(_scipy_stats.t.sf(abs(t), n - 2))


def _permutation_p(x, y, statistic) -> float:
    n = len(x)
    observed = abs(statistic(x, y))
    hits = 0
    total = 0
    for perm in itertools.permutations(y):
        value = statistic(x, list(perm))
        if abs(value) >= observed - 1e-12:
            hits += 1
        total += 1
    return hits / total


@dataclass
class CorrelationReport:
    n: int
    pearson_r: float | None
    pearson_p: float | None
    spearman_rho: float | None
    spearman_p: float | None
    undefined: dict[str, str] = field(default_factory=dict)
    permutation: dict[str, float] | None = None

    def to_dict(self) -> dict:
        out = {
            "n": self.n,
            "pearson_r": self.pearson_r,
            "pearson_p": self.pearson_p,
            "spearman_rho": self.spearman_rho,
            "spearman_p": self.spearman_p,
            "undefined": self.undefined,
        }
        if self.permutation is not None:
            out["permutation"] = self.permutation
        return out


def correlate(x, y, permutation: bool = False) -> CorrelationReport:
    """Pearson and Spearman correlation of paired observations.

    Requires >= 3 pairs.  Zero variance on either side makes the
    coefficient an explicit absence.  ``permutation=True`` adds exact
    two-sided permutation p-values (n <= 10 only).
    """
    x = [float(v) for v in x]
    y = [float(v) for v in y]
    if len(x) != len(y):
        raise AnalysisError("correlate needs equal-length value sequences")
    n = len(x)
    if n < 3:
        raise AnalysisError(f"correlate needs >= 3 paired observations, got {n}")

    undefined: dict[str, str] = {}
    r = _pearson(x, y)
    if r is None:
        undefined["pearson_r"] = "zero variance in one variable"
        pearson_p = None
    else:
        pearson_p = _t_approx_p(r, n)

    rx = average_ranks(x)
    ry = average_ranks(y)
    rho = _pearson(rx, ry)
    if rho is None:
        undefined["spearman_rho"] = "zero rank variance in one variable"
        spearman_p = None
    else:
        spearman_p = _t_approx_p(rho, n)

    permutation_out = None
    if permutation:
        if n > 10:
            raise AnalysisError("exact permutation test is limited to n <= 10")
        permutation_out = {}
        if r is not None:
            permutation_out["pearson_p"] = _permutation_p(
                x, y, lambda a, b: _pearson(a, b) or 0.0)
        if rho is not None:
            permutation_out["spearman_p"] = _permutation_p(
                x, y, lambda a, b: _pearson(average_ranks(a),
                                            average_ranks(b)) or 0.0)
    return CorrelationReport(n=n, pearson_r=r, pearson_p=pearson_p,
                             spearman_rho=rho, spearman_p=spearman_p,
                             undefined=undefined, permutation=permutation_out)


def nearest_rank(sorted_values, percentile: int):
    """P-th percentile by the nearest-rank rule on pre-sorted values."""
    n = len(sorted_values)
    if n == 0:
        raise AnalysisError("percentile of an empty sequence")
    idx = (percentile * n + 99) // 100  # ceil(p*n/100), 1-based
    return sorted_values[max(0, idx - 1)]


def bucket_of(length: int, q33: int, q66: int) -> str:
    if length <= q33:
        return "short"
    if length <= q66:
        return "medium"
    return "long"


@dataclass
class BucketReport:
    q33: int
    q66: int
    bucket_sizes: dict[str, int]
    micro_by_group: list[dict]
    rank_stability: dict

    def to_dict(self) -> dict:
        return {
            "cutoffs": {"q33": self.q33, "q66": self.q66},
            "bucket_sizes": self.bucket_sizes,
            "micro_by_group": self.micro_by_group,
            "rank_stability": self.rank_stability,
        }


def length_buckets(corpus: Corpus, annotation_sets,
                   scheme: WeightScheme | None = None,
                   annotators=None) -> BucketReport:
    """Micro scores per length bucket per model x direction, with
    Spearman rank stability of model orderings between buckets."""
    scheme = scheme or WeightScheme()
    if len(corpus) < 3:
        raise AnalysisError("length buckets need at least 3 segments")
    lengths = sorted(token_length(s.target_text) for s in corpus)
    q33 = nearest_rank(lengths, 33)
    q66 = nearest_rank(lengths, 66)

    spans_by_segment = pooled_spans(annotation_sets, annotators)
    sizes = {b: 0 for b in BUCKETS}
    members: dict[tuple[str, str, str, str], list] = {}
    for seg in corpus:
        bucket = bucket_of(token_length(seg.target_text), q33, q66)
        sizes[bucket] += 1
        key = (seg.source_lang, seg.target_lang, seg.model_id, bucket)
        members.setdefault(key, []).append(
            (seg, spans_by_segment.get(seg.segment_id, [])))

    groups = sorted({k[:3] for k in members})
    micro_by_group = []
    scores: dict[tuple[str, str], dict[str, dict[str, float]]] = {}
    for source_lang, target_lang, model_id in groups:
        row = {"source_lang": source_lang, "target_lang": target_lang,
               "model_id": model_id}
        for bucket in BUCKETS:
            pairs = members.get((source_lang, target_lang, model_id, bucket))
            if pairs:
                value = micro_score(pairs, scheme)
                row[bucket] = value
                scores.setdefault((source_lang, target_lang), {}) \
                    .setdefault(bucket, {})[model_id] = value
            else:
                row[bucket] = None
            row[f"n_{bucket}"] = len(pairs) if pairs else 0
        micro_by_group.append(row)

    return BucketReport(
        q33=q33,
        q66=q66,
        bucket_sizes=sizes,
        micro_by_group=micro_by_group,
        rank_stability=rank_stability(scores),
    )


def rank_stability(bucket_scores: dict) -> dict:
    """Spearman rho of model scores between bucket pairs, per direction.

    ``bucket_scores``: (source_lang, target_lang) -> bucket -> model -> score.
    Cells with fewer than 2 shared models or constant scores are absent
    with a reason; means are unweighted over defined cells.
    """
    per_direction = []
    undefined: dict[str, str] = {}
    sums = {pair: [0.0, 0] for pair in BUCKET_PAIRS}
    for direction in sorted(bucket_scores):
        source_lang, target_lang = direction
        row = {"source_lang": source_lang, "target_lang": target_lang}
        for first, second in BUCKET_PAIRS:
            cell = f"{first}_vs_{second}"
            key = f"{source_lang}->{target_lang}:{cell}"
            s1 = bucket_scores[direction].get(first, {})
            s2 = bucket_scores[direction].get(second, {})
            models = sorted(set(s1) & set(s2))
            if len(models) < 2:
                row[cell] = None
                undefined[key] = "fewer than 2 models shared between buckets"
                continue
            rho = _pearson(average_ranks([s1[m] for m in models]),
                           average_ranks([s2[m] for m in models]))
            if rho is None:
                row[cell] = None
                undefined[key] = "constant scores in one bucket"
                continue
            row[cell] = rho
            sums[(first, second)][0] += rho
            sums[(first, second)][1] += 1
        per_direction.append(row)

    means = {}
    for pair in BUCKET_PAIRS:
        total, count = sums[pair]
        means[f"{pair[0]}_vs_{pair[1]}"] = total / count if count else None
    return {"per_direction": per_direction, "means": means,
            "undefined": undefined}
