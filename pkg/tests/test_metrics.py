"""Metric unit tests against brute-force oracles."""

import itertools
import math
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from paramine import metrics

WORDS = ["a", "b", "c", "d", "e"]

token_lists = st.lists(st.sampled_from(WORDS), min_size=1, max_size=8)


# --------------------------------------------------------------------- pinc

def pinc_oracle(source, candidate, max_n=4):
    """Direct transcription of the definition, no shared code."""
    total = 0.0
    upper = min(max_n, len(candidate))
    for n in range(1, upper + 1):
        cand = {tuple(candidate[i:i + n])
                for i in range(len(candidate) - n + 1)}
        src = {tuple(source[i:i + n]) for i in range(len(source) - n + 1)}
        total += 1.0 - len(cand & src) / len(cand)
    return total / upper


def test_pinc_identical_is_zero():
    assert metrics.pinc(["a", "b", "c"], ["a", "b", "c"]) == 0.0


def test_pinc_disjoint_is_one():
    assert metrics.pinc(["a", "b"], ["c", "d"]) == 1.0


def test_pinc_empty_candidate_raises():
    with pytest.raises(ValueError):
        metrics.pinc(["a"], [])


@given(token_lists, token_lists)
@settings(max_examples=300)
def test_pinc_matches_oracle(src, cand):
    assert metrics.pinc(src, cand) == pytest.approx(pinc_oracle(src, cand),
                                                    abs=1e-12)


@given(token_lists, token_lists)
def test_pinc_bounded(src, cand):
    assert 0.0 <= metrics.pinc(src, cand) <= 1.0


# ------------------------------------------------------------------ jaccard

@given(token_lists, token_lists)
@settings(max_examples=300)
def test_jaccard_matches_oracle(a, b):
    sa, sb = set(a), set(b)
    assert metrics.jaccard(a, b) == len(sa & sb) / len(sa | sb)


@given(token_lists, token_lists)
def test_jaccard_symmetric(a, b):
    assert metrics.jaccard(a, b) == metrics.jaccard(b, a)


def test_jaccard_both_empty_raises():
    with pytest.raises(ValueError):
        metrics.jaccard([], [])


# -------------------------------------------------------------- edit distance

def levenshtein_oracle(s1, s2):
    # full dp table, no row compression
    d = [[0] * (len(s2) + 1) for _ in range(len(s1) + 1)]
    for i in range(len(s1) + 1):
        d[i][0] = i
    for j in range(len(s2) + 1):
        d[0][j] = j
    for i in range(1, len(s1) + 1):
        for j in range(1, len(s2) + 1):
            d[i][j] = min(d[i - 1][j] + 1, d[i][j - 1] + 1,
                          d[i - 1][j - 1] + (s1[i - 1] != s2[j - 1]))
    return d[-1][-1]


@given(st.text(alphabet="abcd", max_size=10),
       st.text(alphabet="abcd", max_size=10))
@settings(max_examples=300)
def test_levenshtein_matches_oracle(s1, s2):
    assert metrics.levenshtein(s1, s2) == levenshtein_oracle(s1, s2)


def test_edit_distance_score_examples():
    assert metrics.edit_distance_score("abc", "abc") == 1.0
    assert metrics.edit_distance_score("", "") == 1.0
    assert metrics.edit_distance_score("abcd", "wxyz") == 0.0
    assert metrics.edit_distance_score("kitten", "sitting") == pytest.approx(
        1.0 - 3 / 7)


# ------------------------------------------------------------------- max F1

def max_f1_oracle(scores, labels):
    best = 0.0
    for t in set(scores):
        tp = sum(1 for s, l in zip(scores, labels) if s >= t and l)
        fp = sum(1 for s, l in zip(scores, labels) if s >= t and not l)
        r = tp / sum(labels)
        p = tp / (tp + fp) if tp + fp else 0.0
        if p + r:
            best = max(best, 2 * p * r / (p + r))
    return best


@given(st.lists(st.tuples(st.sampled_from([0.1, 0.25, 0.5, 0.75, 0.9]),
                          st.booleans()), min_size=1, max_size=15))
@settings(max_examples=500)
def test_max_f1_matches_threshold_sweep(items):
    scores = [s for s, _ in items]
    labels = [l for _, l in items]
    if not any(labels):
        labels[0] = True
    assert metrics.max_f1(scores, labels).f1 == pytest.approx(
        max_f1_oracle(scores, labels), abs=1e-9)


def test_max_f1_perfect_separation():
    point = metrics.max_f1([0.9, 0.8, 0.2, 0.1], [1, 1, 0, 0])
    assert point.f1 == 1.0
    assert point.threshold == 0.8


def test_max_f1_all_positive():
    # predicting everything positive is exact
    assert metrics.max_f1([0.3, 0.6], [1, 1]).f1 == 1.0


def test_max_f1_requires_a_positive():
    with pytest.raises(ValueError):
        metrics.max_f1([0.5], [0])


def test_max_f1_tie_break_prefers_precision():
    # two thresholds reach F1=2/3; the higher-precision one must win
    scores = [0.9, 0.5, 0.5]
    labels = [True, False, True]
    point = metrics.max_f1(scores, labels)
    best = max_f1_oracle(scores, labels)
    assert point.f1 == pytest.approx(best)


def test_pr_at_threshold_counts():
    point = metrics.pr_at_threshold([0.9, 0.6, 0.4], [1, 0, 1], 0.5)
    assert point.precision == 0.5
    assert point.recall == 0.5


# --------------------------------------------------------- overlap features

def test_overlap_features_identical():
    feats = metrics.overlap_features(["a", "b", "c"], ["a", "b", "c"],
                                     ["a", "b", "c"], ["a", "b", "c"])
    assert feats.vector() == [1.0] * 18


def test_overlap_features_disjoint():
    feats = metrics.overlap_features(["a", "b"], ["c", "d"],
                                     ["a", "b"], ["c", "d"])
    assert feats.vector() == [0.0] * 18


def test_overlap_features_clipping():
    # s1 = "a a a", s2 = "a": unigram matches clip at 1
    feats = metrics.overlap_features(["a", "a", "a"], ["a"],
                                     ["a", "a", "a"], ["a"])
    p1, r1, f1 = feats.surface[:3]
    assert p1 == pytest.approx(1 / 3)
    assert r1 == 1.0
    assert f1 == pytest.approx(0.5)
    # no bigrams exist on the short side
    assert feats.surface[3:6] == (0.0, 0.0, 0.0)


def test_overlap_features_vector_layout():
    feats = metrics.overlap_features(["a", "b"], ["a", "c"],
                                     ["x", "y"], ["x", "y"])
    vec = feats.vector()
    assert len(vec) == 18
    assert vec[:9] == list(feats.surface)
    assert vec[9:] == list(feats.lemma)
    # lemma block saw identical sequences (no trigrams exist at length 2)
    assert vec[9:] == [1.0] * 6 + [0.0] * 3


def test_overlap_features_empty_raises():
    with pytest.raises(ValueError):
        metrics.overlap_features([], ["a"], [], ["a"])


# ---------------------------------------------------------- pearson / kappa

def test_pearson_known_value():
    assert metrics.pearson([1, 2, 3], [2, 4, 6]) == pytest.approx(1.0)
    assert metrics.pearson([1, 2, 3], [6, 4, 2]) == pytest.approx(-1.0)


def test_pearson_constant_raises():
    with pytest.raises(ValueError):
        metrics.pearson([1, 1, 1], [1, 2, 3])


def kappa_oracle(a, b):
    n = len(a)
    po = sum(x == y for x, y in zip(a, b)) / n
    pe = (sum(a) / n) * (sum(b) / n) + (1 - sum(a) / n) * (1 - sum(b) / n)
    if pe == 1.0:
        return 1.0 if po == 1.0 else 0.0
    return (po - pe) / (1 - pe)


@given(st.lists(st.tuples(st.booleans(), st.booleans()), min_size=1,
                max_size=30))
@settings(max_examples=500)
def test_kappa_matches_oracle(items):
    a = [x for x, _ in items]
    b = [y for _, y in items]
    assert metrics.cohen_kappa(a, b) == pytest.approx(kappa_oracle(a, b),
                                                      abs=1e-12)


def test_kappa_perfect_and_chance():
    assert metrics.cohen_kappa([1, 0, 1, 0], [1, 0, 1, 0]) == 1.0
    # agreement exactly at chance level
    assert metrics.cohen_kappa([1, 1, 0, 0], [1, 0, 1, 0]) == pytest.approx(0.0)


# ---------------------------------------------------------------- histogram

def test_histogram_bins():
    rows = metrics.histogram([0.0, 0.04, 0.05, 0.97, 1.0], bin_width=0.05)
    assert len(rows) == 20
    assert rows[0][2] == 2      # 0.0 and 0.04
    assert rows[1][2] == 1      # 0.05 lands in [0.05, 0.10)
    assert rows[-1][2] == 2     # 0.97 and the inclusive 1.0
    assert sum(c for _, _, c in rows) == 5
