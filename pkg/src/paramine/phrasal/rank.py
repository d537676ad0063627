"""Ranking scores for extracted phrase pairs and the ridge combiner.

Six features per phrase pair: substitution language-model score, the two
phrase translation probabilities, the two lexical weights, and the
embedding cosine of the phrase pair.  The combiner is closed-form ridge
regression on standardized features with the scaling folded back into
raw-feature weights.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .. import embeddings
from .lm import BOS, EOS

RANK_FEATURES = ("lm_score", "phi_src_given_tgt", "phi_tgt_given_src",
                 "lex_src_given_tgt", "lex_tgt_given_src", "embedding_cosine")


@dataclass(frozen=True)
class PhraseContext:
    """Two words of context on each side of a phrase slot; boundary
    symbols fill missing positions."""

    left: tuple = (BOS, BOS)
    right: tuple = (EOS, EOS)


def lm_substitution_score(lm, context, candidate):
    """Length-normalized log10 probability of left + candidate + right."""
    tokens = list(context.left) + list(candidate) + list(context.right)
    history = [BOS] * (lm.order - 1)
    total = 0.0
    scored = 0
    for w in tokens:
        if w == BOS:
            # boundary symbol: context only, never a scored position
            history.append(BOS)
            continue
        total += lm.logprob(w, tuple(history))
        history.append(lm.map_token(w))
        scored += 1
        if w == EOS:
            break
    if scored == 0:
        return 0.0
    return total / scored


def embedding_phrase_score(p, p_prime, table):
    """Cosine of the mean word vectors of two phrases (OOV words skipped)."""

    def mean_vec(phrase):
        vecs = [table.get(w) for w in phrase]
        vecs = [v for v in vecs if v is not None]
        if not vecs:
            return None
        return np.mean(vecs, axis=0)

    v1, v2 = mean_vec(p), mean_vec(p_prime)
    if v1 is None or v2 is None:
        return 0.0
    return embeddings.cosine(v1, v2)


def phrase_pair_features(source, target, entry, lm_model=None, table=None,
                         context=None):
    """The six ranking features for one phrase-table entry."""
    if context is None:
        context = PhraseContext()
    lm_score = (lm_substitution_score(lm_model, context, target)
                if lm_model is not None else 0.0)
    emb = (embedding_phrase_score(source, target, table)
           if table is not None else 0.0)
    return np.array([lm_score, entry.phi_src_given_tgt,
                     entry.phi_tgt_given_src, entry.lex_src_given_tgt,
                     entry.lex_tgt_given_src, emb])


@dataclass
class RankModel:
    weights: np.ndarray  # over raw (unstandardized) features
    intercept: float
    ridge: float
    fallback_used: bool = False


def train_rank(features, human_scores, ridge=1.0):
    """Closed-form ridge regression of human scores on standardized
    features; weights are folded back to the raw feature scale."""
    X = np.asarray(features, dtype=np.float64)
    y = np.asarray(human_scores, dtype=np.float64)
    if X.ndim != 2 or len(X) != len(y):
        raise ValueError("features must be 2-d and match scores")
    if len(y) < 6:
        raise ValueError("need at least 6 rated pairs")
    mean = X.mean(axis=0)
    std = X.std(axis=0)
    std = np.where(std < 1e-12, 1.0, std)
    Z = (X - mean) / std
    A = Z.T @ Z + ridge * np.eye(Z.shape[1])
    b = Z.T @ (y - y.mean())
    fallback = False
    try:
        w_std = np.linalg.solve(A, b)
    except np.linalg.LinAlgError:
        fallback = True
        A = Z.T @ Z + max(ridge, 1.0) * 10.0 * np.eye(Z.shape[1])
        w_std = np.linalg.solve(A, b)
    weights = w_std / std
    intercept = float(y.mean() - np.dot(weights, mean))
    return RankModel(weights=weights, intercept=intercept, ridge=ridge,
                     fallback_used=fallback)


def rank_score(model, features):
    features = np.asarray(features, dtype=np.float64)
    return float(features @ model.weights + model.intercept)


def evaluate_likert(ranked_pairs, ratings, top_fractions=(0.1, 0.2, 0.3, 0.4,
                                                          0.5, 1.0)):
    """Percentage of sampled entries rated 5 within each top fraction.

    `ranked_pairs` is the full ranking (best first); `ratings` maps a
    subset of those pairs to 1-5 scores.
    """
    rated = [(idx, ratings[p]) for idx, p in enumerate(ranked_pairs)
             if p in ratings]
    if not rated:
        raise ValueError("no rated pairs present in the ranking")
    n = len(ranked_pairs)
    out = {}
    for frac in top_fractions:
        cut = max(1, int(round(frac * n)))
        in_cut = [score for idx, score in rated if idx < cut]
        out[frac] = (100.0 * sum(1 for s in in_cut if s == 5) / len(in_cut)
                     if in_cut else 0.0)
    return out
