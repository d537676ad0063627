"""Word-vector tables, sentence vectors and weighted matrix factorization.

The factorization is a weighted ALS over a tf-idf word x sentence matrix:
observed cells get weight 1, missing cells a small weight w_m.  Setting
the orthogonality penalty rho > 0 additionally pushes the word-factor
Gram matrix toward diagonal (the OrMF variant); rho = 0 is plain WMF.
"""

from __future__ import annotations

import hashlib
import json
import math
from collections import Counter
from dataclasses import dataclass, field
from typing import Optional

import numpy as np


class EmbeddingFormatError(ValueError):
    pass


@dataclass
class EmbeddingTable:
    dimension: int
    vocabulary: dict
    duplicates: int = 0

    def __contains__(self, word):
        return word in self.vocabulary

    def get(self, word):
        return self.vocabulary.get(word)


def load_embeddings(path):
    """Whitespace-separated text vectors: word followed by d floats per line.

    Duplicate words keep the first occurrence; inconsistent dimensions are
    a format error carrying the offending line number.
    """
    vocab = {}
    dimension = None
    duplicates = 0
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            parts = line.rstrip("\n").split()
            if not parts:
                continue
            word, values = parts[0], parts[1:]
            try:
                vec = np.array([float(v) for v in values], dtype=np.float64)
            except ValueError:
                raise EmbeddingFormatError(
                    "line %d: non-numeric vector entry" % lineno)
            if dimension is None:
                dimension = len(vec)
                if dimension == 0:
                    raise EmbeddingFormatError("line %d: empty vector" % lineno)
            elif len(vec) != dimension:
                raise EmbeddingFormatError(
                    "line %d: expected %d values, got %d"
                    % (lineno, dimension, len(vec)))
            if not np.all(np.isfinite(vec)):
                raise EmbeddingFormatError("line %d: non-finite entry" % lineno)
            if word in vocab:
                duplicates += 1
                continue
            vocab[word] = vec
    return EmbeddingTable(dimension=dimension or 0, vocabulary=vocab,
                          duplicates=duplicates)


def sentence_vector_sum(tokens, table):
    """Elementwise sum of in-vocabulary token vectors (zeros if all OOV)."""
    total = np.zeros(table.dimension)
    for tok in tokens:
        vec = table.get(tok)
        if vec is not None:
            total = total + vec
    return total


def cosine(u, v):
    u = np.asarray(u, dtype=np.float64)
    v = np.asarray(v, dtype=np.float64)
    nu, nv = np.linalg.norm(u), np.linalg.norm(v)
    if nu == 0 or nv == 0:
        return 0.0
    return float(np.dot(u, v) / (nu * nv))


def pair_features_vec(v1, v2):
    """[v1 + v2, |v1 - v2|] feature vector for a sentence pair."""
    v1 = np.asarray(v1, dtype=np.float64)
    v2 = np.asarray(v2, dtype=np.float64)
    if v1.shape != v2.shape:
        raise ValueError("dimension mismatch: %s vs %s" % (v1.shape, v2.shape))
    return np.concatenate([v1 + v2, np.abs(v1 - v2)])


@dataclass
class TermSentenceMatrix:
    """tf-idf matrix (|V| x N) with an observed-cell mask."""

    vocab: list
    word_index: dict
    idf: dict
    matrix: np.ndarray
    observed: np.ndarray  # bool mask, True where the raw count is nonzero


def build_term_sentence_matrix(sentences):
    """tf-idf weighting: tf = raw count, idf = log(N / df)."""
    sentences = [list(s) for s in sentences]
    if not sentences:
        raise ValueError("empty corpus")
    df = Counter()
    counts = [Counter(s) for s in sentences]
    for c in counts:
        df.update(c.keys())
    vocab = sorted(df)
    word_index = {w: i for i, w in enumerate(vocab)}
    n = len(sentences)
    idf = {w: math.log(n / df[w]) for w in vocab}
    X = np.zeros((len(vocab), n))
    observed = np.zeros((len(vocab), n), dtype=bool)
    for j, c in enumerate(counts):
        for w, tf in c.items():
            i = word_index[w]
            X[i, j] = tf * idf[w]
            observed[i, j] = True
    return TermSentenceMatrix(vocab=vocab, word_index=word_index, idf=idf,
                              matrix=X, observed=observed)


@dataclass
class FactorModel:
    k: int
    word_factors: np.ndarray  # |V| x k
    vocab: list
    word_index: dict
    idf: dict
    regularizer: float
    missing_weight: float
    ortho_weight: float
    objective_history: list = field(default_factory=list)


def _objective(X, W, P, Q, lam, rho):
    resid = X - P @ Q.T
    obj = float(np.sum(W * resid * resid))
    obj += lam * (float(np.sum(P * P)) + float(np.sum(Q * Q)))
    if rho > 0:
        G = P.T @ P
        off = G - np.diag(np.diag(G))
        obj += rho * float(np.sum(off * off))
    return obj


def objective_gradients(X, observed, P, Q, lam, rho, missing_weight):
    """Analytic gradients of the weighted objective wrt P and Q.

    Exposed for finite-difference verification.
    """
    W = np.where(observed, 1.0, missing_weight)
    resid = P @ Q.T - X
    grad_p = 2.0 * (W * resid) @ Q + 2.0 * lam * P
    grad_q = 2.0 * (W * resid).T @ P + 2.0 * lam * Q
    if rho > 0:
        G = P.T @ P
        off = G - np.diag(np.diag(G))
        grad_p = grad_p + 4.0 * rho * (P @ off)
    return grad_p, grad_q


def _als_solve(fixed, X_rows, observed_rows, lam, w_m, k):
    """Ridge row solves: for each row of X, weighted least squares against
    the fixed factor."""
    out = np.zeros((X_rows.shape[0], k))
    base = w_m * (fixed.T @ fixed) + lam * np.eye(k)
    for i in range(X_rows.shape[0]):
        mask = observed_rows[i]
        A = base.copy()
        rhs = w_m * (fixed.T @ X_rows[i])
        if mask.any():
            Fo = fixed[mask]
            xo = X_rows[i][mask]
            A += (1.0 - w_m) * (Fo.T @ Fo)
            rhs += (1.0 - w_m) * (Fo.T @ xo)
        out[i] = np.linalg.solve(A, rhs)
    return out


def _ortho_correct(P, rho, lam, steps=10):
    """Small gradient steps on the off-diagonal Gram penalty."""
    for _ in range(steps):
        G = P.T @ P
        off = G - np.diag(np.diag(G))
        if not off.any():
            break
        grad = 4.0 * rho * (P @ off)
        denom = 4.0 * rho * (np.linalg.norm(G, 2) + 1e-12)
        P = P - (0.25 / denom) * grad
    return P


def factorize(tsm, k, regularizer=20.0, missing_weight=0.01, ortho_weight=0.0,
              sweeps=10, seed=0):
    """Alternating least squares on the weighted tf-idf matrix.

    Each sweep updates word factors P then sentence factors Q; with
    ortho_weight > 0 a gradient correction on P follows the P update.
    The per-sweep objective is recorded on the returned model.
    """
    X, observed = tsm.matrix, tsm.observed
    n_words, n_sents = X.shape
    if not (1 <= k <= min(n_words, n_sents)):
        raise ValueError("k must be in [1, min(rows, cols)]")
    if sweeps < 1:
        raise ValueError("sweeps must be >= 1")
    rng = np.random.default_rng(seed)
    P = rng.uniform(-0.5, 0.5, size=(n_words, k)) / k
    Q = rng.uniform(-0.5, 0.5, size=(n_sents, k)) / k
    W = np.where(observed, 1.0, missing_weight)
    history = []
    for sweep in range(sweeps):
        P = _als_solve(Q, X, observed, regularizer, missing_weight, k)
        if ortho_weight > 0:
            P = _ortho_correct(P, ortho_weight, regularizer)
        Q = _als_solve(P, X.T, observed.T, regularizer, missing_weight, k)
        obj = _objective(X, W, P, Q, regularizer, ortho_weight)
        if not np.isfinite(obj):
            raise ArithmeticError("non-finite objective at sweep %d" % sweep)
        history.append(obj)
    return FactorModel(k=k, word_factors=P, vocab=tsm.vocab,
                       word_index=tsm.word_index, idf=tsm.idf,
                       regularizer=regularizer, missing_weight=missing_weight,
                       ortho_weight=ortho_weight, objective_history=history)


def project_sentence(model, tokens):
    """Fold a new sentence into the latent space given fixed word factors."""
    counts = Counter(tokens)
    x = np.zeros(len(model.vocab))
    mask = np.zeros(len(model.vocab), dtype=bool)
    any_known = False
    for w, tf in counts.items():
        i = model.word_index.get(w)
        if i is None:
            continue
        any_known = True
        x[i] = tf * model.idf[w]
        mask[i] = True
    if not any_known:
        return np.zeros(model.k)
    P, w_m, lam, k = (model.word_factors, model.missing_weight,
                      model.regularizer, model.k)
    A = w_m * (P.T @ P) + lam * np.eye(k)
    rhs = w_m * (P.T @ x)
    Po = P[mask]
    A += (1.0 - w_m) * (Po.T @ Po)
    rhs += (1.0 - w_m) * (Po.T @ x[mask])
    return np.linalg.solve(A, rhs)


def save_factor_model(model, path):
    header = {
        "k": model.k,
        "regularizer": model.regularizer,
        "missing_weight": model.missing_weight,
        "ortho_weight": model.ortho_weight,
        "vocab_hash": hashlib.sha1(
            "\n".join(model.vocab).encode("utf-8")).hexdigest(),
    }
    np.savez(path,
             header=np.array(json.dumps(header)),
             word_factors=model.word_factors,
             vocab=np.array(model.vocab, dtype=object),
             idf=np.array([model.idf[w] for w in model.vocab]),
             objective_history=np.array(model.objective_history))


def load_factor_model(path):
    with np.load(path, allow_pickle=True) as data:
        header = json.loads(str(data["header"]))
        vocab = [str(w) for w in data["vocab"]]
        idf_values = data["idf"]
        model = FactorModel(
            k=int(header["k"]),
            word_factors=data["word_factors"],
            vocab=vocab,
            word_index={w: i for i, w in enumerate(vocab)},
            idf={w: float(v) for w, v in zip(vocab, idf_values)},
            regularizer=float(header["regularizer"]),
            missing_weight=float(header["missing_weight"]),
            ortho_weight=float(header["ortho_weight"]),
            objective_history=list(map(float, data["objective_history"])),
        )
    return model
