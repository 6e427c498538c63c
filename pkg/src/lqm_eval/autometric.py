"""Self-contained sentence-level BLEU over pluggable tokenization.

Standard 4-gram BLEU with uniform 1/4 weights and brevity penalty
exp(1 - ref_len/hyp_len) when the hypothesis is shorter.  Smoothing is
the exponential-halving family: a higher-order precision (n >= 2) with
at least one hypothesis n-gram but zero matches becomes 1/(2^k * total),
k doubling per smoothed order.  Orders the hypothesis is too short to
form contribute precision 1, so identity pairs score exactly 100 at any
length.  Zero unigram overlap is never smoothed and scores 0.

Tokenizers: plain whitespace, pretokenized arrays carried on segment
records, or a greedy longest-match subword segmenter driven by a
user-supplied vocabulary file (one token per line).
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass

from .corpus import Corpus, Segment
from .errors import MetricError

NGRAM_ORDER = 4

TOKENIZER_MODES = ("whitespace", "pretokenized", "subword")


@dataclass(frozen=True)
class TokenizerSpec:
    mode: str = "whitespace"
    lowercase: bool = False
    vocabulary: frozenset[str] | None = None

    def __post_init__(self):
        if self.mode not in TOKENIZER_MODES:
            raise MetricError(
                f"unknown tokenizer mode {self.mode!r}; "
                f"expected one of {TOKENIZER_MODES}")
        if self.mode == "subword" and not self.vocabulary:
            raise MetricError("subword tokenization needs a vocabulary")

    def to_dict(self) -> dict:
        return {
            "mode": self.mode,
            "lowercase": self.lowercase,
            "vocabulary_size": None if self.vocabulary is None else len(self.vocabulary),
        }


def load_vocabulary(source: str) -> frozenset[str]:
    vocab = {line.strip() for line in source.splitlines() if line.strip()}
    if not vocab:
        raise MetricError("vocabulary file is empty")
    return frozenset(vocab)


def _subword_split(chunk: str, vocab: frozenset[str], max_len: int) -> list[str]:
    pieces = []
    i = 0
    while i < len(chunk):
        for width in range(min(max_len, len(chunk) - i), 0, -1):
            piece = chunk[i:i + width]
            if width == 1 or piece in vocab:
                pieces.append(piece)
                i += width
                break
    return pieces


def tokenize(text: str, tok: TokenizerSpec) -> list[str]:
    if tok.lowercase:
        text = text.lower()
    chunks = text.split()
    if tok.mode == "subword":
        max_len = max(len(v) for v in tok.vocabulary)
        tokens = []
        for chunk in chunks:
            tokens.extend(_subword_split(chunk, tok.vocabulary, max_len))
        return tokens
    return chunks


def _tokens_for(segment: Segment, which: str, tok: TokenizerSpec) -> list[str]:
    """Token list for 'hypothesis' text field or the reference."""
    if tok.mode == "pretokenized":
        attr = "target_tokens" if which == "target_text" else "reference_tokens"
        tokens = getattr(segment, attr)
        if tokens is None:
            raise MetricError(
                f"segment {segment.segment_id!r} lacks {attr} required by "
                f"pretokenized mode")
        return [t.lower() for t in tokens] if tok.lowercase else list(tokens)
    text = getattr(segment, which)
    if text is None:
        raise MetricError(f"segment {segment.segment_id!r} lacks {which}")
    return tokenize(text, tok)


@dataclass(frozen=True)
class BleuScore:
    score: float
    ngram_precisions: tuple[float, float, float, float]
    brevity_penalty: float
    hyp_len: int
    ref_len: int

    def to_dict(self) -> dict:
        return {
            "score": self.score,
            "ngram_precisions": list(self.ngram_precisions),
            "brevity_penalty": self.brevity_penalty,
            "hyp_len": self.hyp_len,
            "ref_len": self.ref_len,
        }


def _ngram_counts(tokens: list[str], n: int) -> Counter:
    return Counter(tuple(tokens[i:i + n]) for i in range(len(tokens) - n + 1))


def bleu_from_tokens(hyp: list[str], ref: list[str]) -> BleuScore:
    if not hyp or not ref:
        raise MetricError("sentence BLEU needs at least one token on each side")
    precisions = []
    smooth = 1.0
    for n in range(1, NGRAM_ORDER + 1):
        total = len(hyp) - n + 1
        if total <= 0:
            precisions.append(1.0)
            continue
        hyp_counts = _ngram_counts(hyp, n)
        ref_counts = _ngram_counts(ref, n)
        correct = sum(min(count, ref_counts[gram])
                      for gram, count in hyp_counts.items())
        if correct == 0:
            if n == 1:
                precisions.append(0.0)
            else:
                smooth *= 2.0
                precisions.append(1.0 / (smooth * total))
        else:
            precisions.append(correct / total)

    bp = 1.0
    if len(hyp) < len(ref):
        bp = math.exp(1.0 - len(ref) / len(hyp))
    if precisions[0] == 0.0:
        score = 0.0
    else:
        score = 100.0 * bp * math.exp(
            sum(math.log(p) for p in precisions) / NGRAM_ORDER)
    return BleuScore(
        score=score,
        ngram_precisions=tuple(precisions),
        brevity_penalty=bp,
        hyp_len=len(hyp),
        ref_len=len(ref),
    )


def sentence_bleu(hypothesis: str, reference: str,
                  tok: TokenizerSpec | None = None) -> BleuScore:
    tok = tok or TokenizerSpec()
    if tok.mode == "pretokenized":
        raise MetricError(
            "pretokenized mode needs segment records; use corpus_bleu_table")
    return bleu_from_tokens(tokenize(hypothesis, tok), tokenize(reference, tok))


@dataclass
class BleuTable:
    tokenizer: TokenizerSpec
    per_segment: dict[str, BleuScore]
    per_group: list[dict]

    def to_dict(self) -> dict:
        return {
            "tokenizer": self.tokenizer.to_dict(),
            "smoothing": "exponential-halving, orders 2-4",
            "per_segment": {sid: s.to_dict() for sid, s in self.per_segment.items()},
            "per_group": self.per_group,
        }


def corpus_bleu_table(corpus: Corpus, tok: TokenizerSpec | None = None,
                      hyp_field: str = "target_text") -> BleuTable:
    """Mean sentence BLEU per (model, direction); hypothesis vs reference_text.

    Errors name the first segment that lacks a hypothesis or reference.
    """
    tok = tok or TokenizerSpec()
    per_segment: dict[str, BleuScore] = {}
    groups: dict[tuple[str, str, str], list[float]] = {}
    for seg in corpus:
        if seg.reference_text is None and tok.mode != "pretokenized":
            raise MetricError(
                f"segment {seg.segment_id!r} has no reference_text")
        hyp = _tokens_for(seg, hyp_field, tok)
        ref = _tokens_for(seg, "reference_text", tok)
        if not hyp or not ref:
            raise MetricError(
                f"segment {seg.segment_id!r}: empty tokenization")
        score = bleu_from_tokens(hyp, ref)
        per_segment[seg.segment_id] = score
        key = (seg.source_lang, seg.target_lang, seg.model_id)
        groups.setdefault(key, []).append(score.score)

    per_group = []
    for key in sorted(groups):
        source_lang, target_lang, model_id = key
        scores = groups[key]
        per_group.append({
            "source_lang": source_lang,
            "target_lang": target_lang,
            "model_id": model_id,
            "n_segments": len(scores),
            "mean_score": sum(scores) / len(scores),
        })
    return BleuTable(tokenizer=tok, per_segment=per_segment,
                     per_group=per_group)
