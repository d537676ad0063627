"""Phrase-pair ranking features and the ridge combiner."""

import random

import numpy as np
import pytest

import paramine.phrasal as P
from paramine import embeddings, metrics
from paramine.phrasal import rank as R
from paramine.phrasal.lm import BOS, EOS, NgramLM


LM_CORPUS = [["the", "cat", "sat"], ["the", "dog", "sat"],
             ["the", "cat", "ran"], ["a", "dog", "barked"],
             ["the", "cat", "sat"], ["the", "bird", "sang"]]


@pytest.fixture
def toy_lm():
    return NgramLM(order=3).fit(LM_CORPUS)


# -------------------------------------------------------------- LM feature

def test_lm_substitution_score_prefers_seen_phrase(toy_lm):
    ctx = R.PhraseContext(left=(BOS, "the"), right=("sat", EOS))
    seen = R.lm_substitution_score(toy_lm, ctx, ("cat",))
    unseen = R.lm_substitution_score(toy_lm, ctx, ("zebra",))
    assert seen > unseen


def test_lm_substitution_score_is_length_normalized(toy_lm):
    ctx = R.PhraseContext()
    one = R.lm_substitution_score(toy_lm, ctx, ("cat",))
    # duplicating the candidate does not double the score magnitude
    two = R.lm_substitution_score(toy_lm, ctx, ("cat", "cat"))
    assert abs(two) < 2 * abs(one) + 1.0


def test_lm_substitution_score_boundary_context_only(toy_lm):
    # BOS symbols are never scored; the default context scores the
    # candidate and the EOS transition only
    ctx = R.PhraseContext(left=(BOS, BOS), right=(EOS, EOS))
    score = R.lm_substitution_score(toy_lm, ctx, ("the", "cat"))
    manual = (toy_lm.logprob("the", (BOS, BOS))
              + toy_lm.logprob("cat", (BOS, "the"))
              + toy_lm.logprob(EOS, ("the", "cat")))
    assert score == pytest.approx(manual / 3)


# ------------------------------------------------------- embedding feature

def test_embedding_phrase_score(embedding_table):
    same = R.embedding_phrase_score(("samsung",), ("samsung",),
                                    embedding_table)
    assert same == pytest.approx(1.0)
    sim = R.embedding_phrase_score(("halts",), ("suspends",), embedding_table)
    assert 0.9 < sim < 1.0
    assert R.embedding_phrase_score(("oov",), ("samsung",),
                                    embedding_table) == 0.0


def test_embedding_phrase_score_averages(embedding_table):
    multi = R.embedding_phrase_score(("samsung", "galaxy"),
                                     ("samsung", "galaxy"), embedding_table)
    assert multi == pytest.approx(1.0)


def test_phrase_pair_features_layout(toy_lm, embedding_table):
    e = P.build_phrase_table(
        [P.PhrasePair(source=("halts",), target=("suspends",))]
    ).entries[(("halts",), ("suspends",))]
    feats = R.phrase_pair_features(("halts",), ("suspends",), e,
                                   lm_model=toy_lm, table=embedding_table)
    assert feats.shape == (6,)
    assert feats[1] == e.phi_src_given_tgt
    assert feats[2] == e.phi_tgt_given_src
    # without optional resources the corresponding features are zero
    bare = R.phrase_pair_features(("halts",), ("suspends",), e)
    assert bare[0] == 0.0 and bare[5] == 0.0


# ------------------------------------------------------------- ridge model

def test_train_rank_recovers_linear_scores():
    rng = np.random.default_rng(0)
    X = rng.normal(size=(40, 6))
    w_true = rng.normal(size=6)
    y = X @ w_true + 1.5
    model = R.train_rank(X, y, ridge=1e-8)
    preds = [R.rank_score(model, x) for x in X]
    np.testing.assert_allclose(preds, y, atol=1e-6)
    assert not model.fallback_used


def test_train_rank_combiner_beats_single_features():
    """At near-zero ridge the 6-feature combiner correlates with the
    target at least as well as any single feature, over 50 random sets."""
    rng = np.random.default_rng(7)
    for trial in range(50):
        n = 30
        X = rng.normal(size=(n, 6))
        w = rng.normal(size=6)
        y = X @ w + 0.5 * rng.normal(size=n)
        model = R.train_rank(X, y, ridge=1e-6)
        combined = metrics.pearson([R.rank_score(model, x) for x in X], y)
        singles = max(abs(metrics.pearson(X[:, j], y)) for j in range(6))
        assert combined >= singles - 1e-9, trial


def test_train_rank_validation():
    with pytest.raises(ValueError):
        R.train_rank(np.ones((3, 6)), [1, 2, 3])  # fewer than 6 rows
    with pytest.raises(ValueError):
        R.train_rank(np.ones((6, 6)), [1, 2, 3])  # length mismatch


def test_train_rank_constant_feature_survives():
    rng = np.random.default_rng(1)
    X = rng.normal(size=(10, 3))
    X[:, 1] = 4.2  # zero-variance column
    y = X[:, 0] * 2 + 1
    model = R.train_rank(X, y, ridge=1e-6)
    assert np.all(np.isfinite(model.weights))
    preds = [R.rank_score(model, x) for x in X]
    assert metrics.pearson(preds, y) > 0.99


# ----------------------------------------------------------- likert report

def test_evaluate_likert_top_fractions():
    ranked = ["p%d" % i for i in range(10)]
    ratings = {p: (5 if i < 3 else 1) for i, p in enumerate(ranked)}
    out = R.evaluate_likert(ranked, ratings, top_fractions=(0.3, 1.0))
    assert out[0.3] == 100.0
    assert out[1.0] == 30.0


def test_evaluate_likert_unrated_subset():
    ranked = ["a", "b", "c", "d"]
    out = R.evaluate_likert(ranked, {"b": 5, "d": 2},
                            top_fractions=(0.5, 1.0))
    assert out[0.5] == 100.0   # only "b" rated in the top half
    assert out[1.0] == 50.0


def test_evaluate_likert_no_rated_raises():
    with pytest.raises(ValueError):
        R.evaluate_likert(["a"], {})
