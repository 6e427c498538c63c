"""Span-level MT quality evaluation: taxonomies, scores, agreement, analyses."""

from .agreement import (AgreementReport, SpanMatching, agreement_report,
                        char_f1, cohen_kappa, label_agreement, match_spans,
                        span_f1)
from .analysis import (BucketReport, CorrelationReport, DistributionTable,
                       Scope, correlate, error_distribution, length_buckets,
                       model_attribution, rank_stability)
from .autometric import (BleuScore, TokenizerSpec, corpus_bleu_table,
                         sentence_bleu)
from .corpus import (AnnotationSet, Corpus, ErrorSpan, Segment,
                     read_annotations, read_segments, write_annotations,
                     write_segments)
from .errors import ValidationError
from .scoring import (ScoreReport, WeightScheme, micro_score, score_report,
                      segment_score, token_length)
from .taxonomy import (TaxonomyNode, TaxonomyPath, TaxonomySchema,
                       load_builtin, load_taxonomy, serialize_taxonomy)

__version__ = "0.1.0"

__all__ = [
    "AgreementReport", "AnnotationSet", "BleuScore", "BucketReport",
    "CorrelationReport", "Corpus", "DistributionTable", "ErrorSpan",
    "Scope", "ScoreReport", "Segment", "SpanMatching", "TaxonomyNode",
    "TaxonomyPath", "TaxonomySchema", "TokenizerSpec", "ValidationError",
    "WeightScheme", "agreement_report", "char_f1", "cohen_kappa",
    "correlate", "corpus_bleu_table", "error_distribution",
    "label_agreement", "length_buckets", "load_builtin", "load_taxonomy",
    "match_spans", "micro_score", "model_attribution", "rank_stability",
    "read_annotations", "read_segments", "score_report", "segment_score",
    "sentence_bleu", "serialize_taxonomy", "span_f1", "token_length",
    "write_annotations", "write_segments",
]
