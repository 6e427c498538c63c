import random

import pytest

from conftest import corpus_from_records, make_segment_record
from lqm_eval.autometric import (TokenizerSpec, bleu_from_tokens,
                                 corpus_bleu_table, load_vocabulary,
                                 sentence_bleu, tokenize)
from lqm_eval.errors import MetricError
from oracles import bleu_oracle

WORDS = ["the", "cat", "sat", "on", "mat", "a", "dog", "ran", "fast", "slow",
         "big", "red", "house", "tree", "bird"]


def test_identity_scores_100():
    for text in ("one", "two words", "the cat sat on the mat today ok",
                 "a b c d e f g h"):
        assert sentence_bleu(text, text).score == 100.0


def test_zero_unigram_overlap_scores_0():
    result = sentence_bleu("aa bb cc dd", "ee ff gg hh")
    assert result.score == 0.0
    assert result.ngram_precisions[0] == 0.0


def test_small_pair_matches_oracle():
    hyp = "the cat sat on a mat"
    ref = "the cat sat on the mat"
    got = sentence_bleu(hyp, ref)
    assert abs(got.score - bleu_oracle(hyp.split(), ref.split())) < 1e-9


def test_brevity_penalty_applied_when_short():
    result = sentence_bleu("the cat", "the cat sat")
    assert 0.0 < result.brevity_penalty < 1.0
    equal = sentence_bleu("the cat sat", "the cat")
    assert equal.brevity_penalty == 1.0


def test_brevity_monotone_in_hyp_length():
    ref = " ".join(WORDS[:10])
    previous_bp = 1.0
    for n in range(9, 0, -1):
        hyp = " ".join(WORDS[:n])
        bp = sentence_bleu(hyp, ref).brevity_penalty
        assert bp <= previous_bp
        previous_bp = bp


def test_random_pairs_match_oracle_and_bounds():
    rng = random.Random(314159)
    for _ in range(200):
        hyp = [rng.choice(WORDS) for _ in range(rng.randint(1, 12))]
        ref = [rng.choice(WORDS) for _ in range(rng.randint(1, 12))]
        got = bleu_from_tokens(hyp, ref)
        assert abs(got.score - bleu_oracle(hyp, ref)) < 1e-9
        assert 0.0 <= got.score <= 100.0


def test_empty_tokenization_rejected():
    with pytest.raises(MetricError, match="token"):
        sentence_bleu("", "the cat")
    with pytest.raises(MetricError, match="token"):
        sentence_bleu("the cat", "   ")


def test_lowercase_flag():
    tok = TokenizerSpec("whitespace", lowercase=True)
    assert sentence_bleu("The CAT", "the cat", tok).score == 100.0
    assert sentence_bleu("The CAT", "the cat").score == 0.0


def test_subword_greedy_longest_match():
    vocab = load_vocabulary("foo\nbar\nfoobar\nba\n")
    tok = TokenizerSpec("subword", vocabulary=vocab)
    assert tokenize("foobar", tok) == ["foobar"]
    assert tokenize("barfoo", tok) == ["bar", "foo"]
    # unmatched prefixes fall back to single characters
    assert tokenize("xbar", tok) == ["x", "bar"]
    assert tokenize("bax", tok) == ["ba", "x"]


def test_subword_requires_vocabulary():
    with pytest.raises(MetricError, match="vocabulary"):
        TokenizerSpec("subword")
    with pytest.raises(MetricError, match="empty"):
        load_vocabulary("\n\n")


def _toy_corpus():
    return corpus_from_records([
        make_segment_record("s1", target_text="the cat sat on the mat",
                            reference_text="the cat sat on the mat"),
        make_segment_record("s2", target_text="a dog ran fast today",
                            reference_text="a dog ran slowly today"),
    ])


def test_corpus_table_identity_everywhere():
    records = [make_segment_record(f"s{i}", target_text="same text here now",
                                   reference_text="same text here now",
                                   model_id=f"m{i % 2}")
               for i in range(4)]
    table = corpus_bleu_table(corpus_from_records(records))
    assert all(g["mean_score"] == 100.0 for g in table.per_group)
    assert all(s.score == 100.0 for s in table.per_segment.values())


def test_corpus_table_mean_of_sentence_scores():
    table = corpus_bleu_table(_toy_corpus())
    s1 = bleu_oracle("the cat sat on the mat".split(),
                     "the cat sat on the mat".split())
    s2 = bleu_oracle("a dog ran fast today".split(),
                     "a dog ran slowly today".split())
    assert len(table.per_group) == 1
    assert abs(table.per_group[0]["mean_score"] - (s1 + s2) / 2) < 1e-9


def test_missing_reference_names_segment():
    corpus = corpus_from_records([make_segment_record("lonely")])
    with pytest.raises(MetricError, match="lonely"):
        corpus_bleu_table(corpus)


def test_segment_order_invariance_within_group():
    records = [
        make_segment_record("s1", target_text="the cat sat",
                            reference_text="the cat sat on mats"),
        make_segment_record("s2", target_text="a dog ran fast",
                            reference_text="a dog ran slow"),
    ]
    fwd = corpus_bleu_table(corpus_from_records(records))
    rev = corpus_bleu_table(corpus_from_records(records[::-1]))
    assert fwd.per_group[0]["mean_score"] == rev.per_group[0]["mean_score"]


def test_pretokenized_mode():
    rec1 = make_segment_record("s1", target_text="irrelevant surface",
                               reference_text="irrelevant")
    rec1["target_tokens"] = ["tok", "a", "b"]
    rec1["reference_tokens"] = ["tok", "a", "b"]
    corpus = corpus_from_records([rec1])
    tok = TokenizerSpec("pretokenized")
    table = corpus_bleu_table(corpus, tok)
    assert table.per_segment["s1"].score == 100.0

    bare = corpus_from_records(
        [make_segment_record("s2", reference_text="x")])
    with pytest.raises(MetricError, match="target_tokens"):
        corpus_bleu_table(bare, tok)


def test_short_identity_still_100_and_report_fields():
    got = sentence_bleu("hi there", "hi there")
    assert got.score == 100.0
    assert got.ngram_precisions == (1.0, 1.0, 1.0, 1.0)
    assert got.hyp_len == got.ref_len == 2
    data = got.to_dict()
    assert data["brevity_penalty"] == 1.0
