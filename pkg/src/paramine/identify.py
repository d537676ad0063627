"""Paraphrase identification: feature assembly, logistic regression, the
model zoo and silver-standard mining.

Feature modes mirror the benchmarked model families: 18 n-gram overlap
features (LR18), latent-vector pair features (VEC) or the single latent
cosine (SIM), their LEX combinations with the overlap block, the
embedding-sum cosine (EMB_COS), plus raw Random and Edit Distance
scorers.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from enum import Enum
from typing import Optional

import numpy as np

from . import corpus, embeddings, metrics, textnorm


class FeatureMode(str, Enum):
    RANDOM = "random"
    EDIT = "edit"
    EMB_COS = "emb_cos"
    LR18 = "lr18"
    VEC = "vec"
    SIM = "sim"
    LEX_VEC = "lex_vec"
    LEX_SIM = "lex_sim"


TRAINED_MODES = (FeatureMode.LR18, FeatureMode.VEC, FeatureMode.SIM,
                 FeatureMode.LEX_VEC, FeatureMode.LEX_SIM)
STANDARDIZED_MODES = (FeatureMode.VEC, FeatureMode.LEX_VEC)


class ConfigurationError(ValueError):
    pass


@dataclass
class FeatureSpec:
    mode: FeatureMode
    table: Optional[embeddings.EmbeddingTable] = None
    factor_model: Optional[embeddings.FactorModel] = None

    def __post_init__(self):
        self.mode = FeatureMode(self.mode)
        if self.mode in (FeatureMode.VEC, FeatureMode.SIM, FeatureMode.LEX_VEC,
                         FeatureMode.LEX_SIM) and self.factor_model is None:
            raise ConfigurationError("%s requires a factor model" % self.mode)
        if self.mode is FeatureMode.EMB_COS and self.table is None:
            raise ConfigurationError("emb_cos requires an embedding table")


def _tokens_and_lemmas(sentence):
    toks = textnorm.tokenize(sentence)
    surfaces = [t.surface for t in toks]
    lemmas = [textnorm.lemmatize(t.surface) if t.kind == textnorm.WORD
              else t.surface for t in toks]
    return surfaces, lemmas


def _overlap18(pair):
    t1, l1 = _tokens_and_lemmas(pair.s1)
    t2, l2 = _tokens_and_lemmas(pair.s2)
    if not t1 or not t2:
        return [0.0] * 18
    return metrics.overlap_features(t1, t2, l1, l2).vector()


def assemble_features(pair, spec):
    """Deterministic feature vector for one sentence pair under a spec."""
    mode = spec.mode
    if mode is FeatureMode.LR18:
        return np.array(_overlap18(pair))
    if mode is FeatureMode.EMB_COS:
        v1 = embeddings.sentence_vector_sum(textnorm.token_surfaces(pair.s1),
                                            spec.table)
        v2 = embeddings.sentence_vector_sum(textnorm.token_surfaces(pair.s2),
                                            spec.table)
        return np.array([embeddings.cosine(v1, v2)])
    if mode in (FeatureMode.VEC, FeatureMode.SIM, FeatureMode.LEX_VEC,
                FeatureMode.LEX_SIM):
        v1 = embeddings.project_sentence(spec.factor_model,
                                         textnorm.token_surfaces(pair.s1))
        v2 = embeddings.project_sentence(spec.factor_model,
                                         textnorm.token_surfaces(pair.s2))
        if mode is FeatureMode.VEC:
            return embeddings.pair_features_vec(v1, v2)
        if mode is FeatureMode.SIM:
            return np.array([embeddings.cosine(v1, v2)])
        if mode is FeatureMode.LEX_SIM:
            return np.array(_overlap18(pair) + [embeddings.cosine(v1, v2)])
        return np.concatenate([_overlap18(pair),
                               embeddings.pair_features_vec(v1, v2)])
    raise ConfigurationError("mode %s has no trainable features" % mode)


def _sigmoid(z):
    return np.where(z >= 0, 1.0 / (1.0 + np.exp(-z)),
                    np.exp(z) / (1.0 + np.exp(z)))


@dataclass
class LogisticModel:
    weights: np.ndarray
    bias: float
    l2: float
    mean: Optional[np.ndarray] = None
    std: Optional[np.ndarray] = None
    objective_history: list = field(default_factory=list)

    def standardize(self, x):
        if self.mean is None:
            return x
        return (x - self.mean) / self.std


def logistic_objective(weights, bias, X, y, l2):
    """Mean negative log-likelihood plus (l2 / 2n) ||w||^2."""
    z = X @ weights + bias
    # log(1 + exp(-m)) with m = z for y=1, -z for y=0, stably
    m = np.where(y, z, -z)
    nll = np.mean(np.logaddexp(0.0, -m))
    return float(nll + l2 / (2 * len(y)) * np.dot(weights, weights))


def logistic_gradient(weights, bias, X, y, l2):
    p = _sigmoid(X @ weights + bias)
    err = p - y
    grad_w = X.T @ err / len(y) + (l2 / len(y)) * weights
    grad_b = float(np.mean(err))
    return grad_w, grad_b


def train_logistic(features, labels, l2=1.0, epochs=5000, learning_rate=0.5,
                   tol=1e-6, seed=0):
    """Full-batch gradient descent from zero init; deterministic.

    Stops when the gradient norm drops below `tol` or epochs run out.
    """
    X = np.asarray(features, dtype=np.float64)
    y = np.asarray([1.0 if l else 0.0 for l in labels])
    if X.ndim != 2 or len(X) != len(y):
        raise ValueError("features must be a 2-d array matching labels")
    if y.min() == y.max():
        raise ValueError("need at least one example of each class")
    del seed  # zero init; kept for interface stability
    w = np.zeros(X.shape[1])
    b = 0.0
    history = [logistic_objective(w, b, X, y, l2)]
    step = learning_rate
    for _ in range(epochs):
        grad_w, grad_b = logistic_gradient(w, b, X, y, l2)
        gnorm = float(np.sqrt(np.dot(grad_w, grad_w) + grad_b * grad_b))
        if gnorm < tol:
            break
        # halve the step until the objective does not increase; keeps the
        # trace monotone when the fixed rate would overshoot
        while step > 1e-12:
            obj = logistic_objective(w - step * grad_w, b - step * grad_b,
                                     X, y, l2)
            if np.isfinite(obj) and obj <= history[-1]:
                break
            step /= 2.0
        w = w - step * grad_w
        b = b - step * grad_b
        history.append(logistic_objective(w, b, X, y, l2))
    return LogisticModel(weights=w, bias=b, l2=l2, objective_history=history)


def predict_prob(model, x):
    x = np.asarray(x, dtype=np.float64)
    if x.shape != model.weights.shape:
        raise ValueError("feature dimension mismatch: %s vs %s"
                         % (x.shape, model.weights.shape))
    x = model.standardize(x)
    return float(_sigmoid(np.dot(model.weights, x) + model.bias))


@dataclass
class Pipeline:
    """A feature spec plus a trained logistic model (or a raw scorer mode)."""

    spec: FeatureSpec
    logistic: Optional[LogisticModel] = None
    seed: int = 0

    def scorer(self):
        return make_scorer(self.spec, self.logistic, seed=self.seed)


def make_scorer(spec, logistic=None, seed=0):
    """Callable SentencePair -> score in [0, 1]."""
    mode = spec.mode
    if mode is FeatureMode.RANDOM:
        rng = np.random.default_rng(seed)
        return lambda pair: float(rng.uniform())
    if mode is FeatureMode.EDIT:
        return lambda pair: metrics.edit_distance_score(pair.s1, pair.s2)
    if logistic is None:
        if mode is FeatureMode.EMB_COS or mode is FeatureMode.SIM:
            return lambda pair: float(assemble_features(pair, spec)[0])
        raise ConfigurationError("mode %s needs a trained model" % mode)
    return lambda pair: predict_prob(logistic, assemble_features(pair, spec))


def train_pipeline(dataset, spec, l2=1.0, epochs=5000, learning_rate=0.5):
    """Assemble features for a dataset and fit the logistic layer.

    Debatable pairs are excluded; VEC/LEX_VEC features are z-scored with
    training-split statistics folded into the model.
    """
    if spec.mode not in TRAINED_MODES:
        return Pipeline(spec=spec)
    data = dataset.without_debatable()
    X = np.array([assemble_features(lp.pair, spec) for lp in data.pairs])
    y = data.labels()
    mean = std = None
    if spec.mode in STANDARDIZED_MODES:
        mean = X.mean(axis=0)
        std = X.std(axis=0)
        std = np.where(std < 1e-12, 1.0, std)
        X = (X - mean) / std
    model = train_logistic(X, y, l2=l2, epochs=epochs,
                           learning_rate=learning_rate)
    model.mean, model.std = mean, std
    return Pipeline(spec=spec, logistic=model)


@dataclass(frozen=True)
class ScoredPair:
    pair: corpus.SentencePair
    probability: float


@dataclass
class EvalResult:
    max_f1: metrics.PrPoint
    at_half: metrics.PrPoint
    n_pairs: int
    n_positive: int


def evaluate(scorer, dataset):
    """Max-F1 and threshold-0.5 operating point on a labeled dataset."""
    data = dataset.without_debatable()
    scores = [scorer(lp.pair) for lp in data.pairs]
    labels = data.labels()
    return EvalResult(max_f1=metrics.max_f1(scores, labels),
                      at_half=metrics.pr_at_threshold(scores, labels, 0.5),
                      n_pairs=len(labels), n_positive=sum(labels))


def mine_silver(scorer, pairs, threshold=0.5):
    """Pairs scoring at or above the threshold, sorted by descending score."""
    scored = [ScoredPair(pair=p, probability=scorer(p)) for p in pairs]
    kept = [sp for sp in scored if sp.probability >= threshold]
    kept.sort(key=lambda sp: (-sp.probability, sp.pair.pair_id))
    return kept


def save_logistic(model, mode, path):
    rec = {
        "mode": str(FeatureMode(mode).value),
        "l2": model.l2,
        "weights": model.weights.tolist(),
        "bias": model.bias,
        "mean": None if model.mean is None else model.mean.tolist(),
        "std": None if model.std is None else model.std.tolist(),
    }
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(rec, fh, indent=2)
        fh.write("\n")


def load_logistic(path):
    with open(path, encoding="utf-8") as fh:
        rec = json.load(fh)
    model = LogisticModel(
        weights=np.array(rec["weights"], dtype=np.float64),
        bias=float(rec["bias"]),
        l2=float(rec["l2"]),
        mean=None if rec["mean"] is None else np.array(rec["mean"]),
        std=None if rec["std"] is None else np.array(rec["std"]),
    )
    return model, FeatureMode(rec["mode"])
