import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from synstate.ngram import (
    EOS,
    NgramError,
    load_ngram,
    ngram_surprisals,
    save_ngram,
    train_ngram,
)


def test_unigram_is_count_ratio_for_any_discount():
    for d in (0.1, 0.5, 0.9):
        m = train_ngram([["a", "b"]], order=1, discount=d)
        assert m.prob("a", ()) == pytest.approx(1 / 3)
        assert m.prob("b", ()) == pytest.approx(1 / 3)
        assert m.prob(EOS, ()) == pytest.approx(1 / 3)


def test_bigram_small_discount_limit():
    m = train_ngram([["a", "b"], ["a", "c"]], order=2, discount=1e-9)
    assert m.prob("b", ("a",)) == pytest.approx(0.5, abs=1e-6)


def test_bigram_matches_hand_formula():
    d = 0.4
    m = train_ngram([["a", "b"], ["a", "c"]], order=2, discount=d)
    # events: a:2 b:1 c:1 EOS:2 -> N=6; context (a): total 2, types 2
    expected = (1 - d) / 2 + (d * 2 / 2) * (1 / 6)
    assert m.prob("b", ("a",)) == pytest.approx(expected, abs=1e-12)


def test_repetitive_corpus_limit():
    # After "a" the corpus continues with "a" twice per EOS once, so the
    # interior conditional tends to 2/3 as the discount vanishes.
    m = train_ngram([["a", "a", "a"]] * 4, order=2, discount=1e-9)
    surps, _ = ngram_surprisals(m, ["a", "a", "a"])
    assert surps[1] == pytest.approx(math.log2(3 / 2), abs=1e-6)
    # A corpus that is bigram-deterministic gives 0 bits in the limit.
    m2 = train_ngram([["x", "a", "a"]] * 4, order=2, discount=1e-9)
    surps2, _ = ngram_surprisals(m2, ["x", "a", "a"])
    assert surps2[1] == pytest.approx(0.0, abs=1e-6)


def _norm_check(m, context):
    vocab = [w for w in m.vocabulary if w != "<s>"]
    total = sum(m.prob(w, context) for w in vocab)
    assert total == pytest.approx(1.0, abs=1e-9)


def test_normalization_examples():
    m = train_ngram([["a", "b"], ["b", "a", "a"]], order=3, discount=0.7)
    for ctx in [(), ("a",), ("b", "a"), ("<s>", "a"), ("zz", "a"), ("a", "zz")]:
        _norm_check(m, ctx)


@settings(max_examples=40, deadline=None)
@given(
    st.lists(
        st.lists(st.sampled_from("abc"), min_size=1, max_size=5),
        min_size=1,
        max_size=6,
    ),
    st.integers(min_value=1, max_value=3),
    st.floats(min_value=0.05, max_value=0.95),
)
def test_normalization_property(corpus, order, discount):
    m = train_ngram(corpus, order=order, discount=discount)
    rng = np.random.default_rng(0)
    toks = sorted(m.vocabulary - {"<s>", "</s>"})
    for _ in range(3):
        k = rng.integers(0, order)
        ctx = tuple(rng.choice(toks + ["zz"]) for _ in range(k)) if toks else ()
        _norm_check(m, ctx)


def test_chain_rule_identity():
    corpus = [["a", "b", "a"], ["b", "b"], ["a", "c", "c", "a"]]
    m = train_ngram(corpus, order=3, discount=0.6)
    for sent in corpus + [["c", "a", "b"], ["a", "zz", "b"]]:
        surps, eos = ngram_surprisals(m, sent)
        total = sum(surps) + eos
        # independent product of conditionals
        logp = 0.0
        hist = ["<s>", "<s>"]
        mapped = [t if t in m.vocabulary else "<unk>" for t in sent]
        for raw, tok in zip(sent, mapped):
            logp += math.log2(m.prob(raw, tuple(hist)))
            hist.append(tok)
        logp += math.log2(m.prob(EOS, tuple(hist)))
        assert total == pytest.approx(-logp, abs=1e-9)


def test_backoff_consistency_unseen_context():
    m = train_ngram([["a", "b", "c"]], order=3, discount=0.5)
    for w in ("a", "b", "c", EOS):
        assert m.prob(w, ("c", "b")) == m.prob(w, ("b",))


def test_oov_scores_finite():
    m = train_ngram([["a", "b"]], order=2, discount=0.5)
    surps, eos = ngram_surprisals(m, ["zz", "b"])
    assert all(s > 0 and math.isfinite(s) for s in surps)
    assert math.isfinite(eos)


def test_reserved_markers_rejected():
    with pytest.raises(NgramError):
        train_ngram([["a", "<s>"]], order=2, discount=0.5)


def test_parameter_validation():
    with pytest.raises(NgramError):
        train_ngram([], order=2, discount=0.5)
    with pytest.raises(NgramError):
        train_ngram([["a"]], order=0, discount=0.5)
    with pytest.raises(NgramError):
        train_ngram([["a"]], order=2, discount=1.5)


def test_save_load_round_trip():
    m = train_ngram([["a", "b"], ["b", "a", "a"]], order=2, discount=0.75)
    text = save_ngram(m)
    m2 = load_ngram(text)
    assert save_ngram(m2) == text
    for ctx in [(), ("a",), ("b",)]:
        for w in ("a", "b", EOS, "zz"):
            assert m2.prob(w, ctx) == m.prob(w, ctx)
