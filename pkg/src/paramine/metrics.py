"""Surface metrics and evaluation statistics.

n-gram counts, PINC, Jaccard, BLEU-style overlap features, edit distance,
max-F1 over the precision-recall curve, Pearson correlation and Cohen's
kappa.  Everything here is a pure function over token lists / score lists.
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass


@dataclass(frozen=True)
class PrPoint:
    """One operating point on a precision-recall curve."""

    threshold: float
    precision: float
    recall: float
    f1: float


@dataclass(frozen=True)
class OverlapFeatures:
    """18 n-gram overlap features: P/R/F for n=1..3 on surface tokens and lemmas.

    Layout of each 9-tuple: (p1, r1, f1, p2, r2, f2, p3, r3, f3).
    """

    surface: tuple
    lemma: tuple

    def vector(self):
        return list(self.surface) + list(self.lemma)


def ngrams(tokens, n):
    """Contiguous n-grams with multiplicity, as a Counter over tuples."""
    if n <= 0:
        raise ValueError("n must be >= 1, got %r" % (n,))
    toks = list(tokens)
    return Counter(tuple(toks[i:i + n]) for i in range(len(toks) - n + 1))


def pinc(source, candidate, max_n=4):
    """n-gram dissimilarity of candidate against source (0 = identical).

    Mean over n = 1..min(max_n, len(candidate)) of the fraction of the
    candidate's n-gram *set* absent from the source's n-gram set.
    """
    source, candidate = list(source), list(candidate)
    if not candidate:
        raise ValueError("candidate must be non-empty")
    upper = min(max_n, len(candidate))
    total = 0.0
    for n in range(1, upper + 1):
        cand = set(ngrams(candidate, n))
        src = set(ngrams(source, n))
        total += 1.0 - len(cand & src) / len(cand)
    return total / upper


def jaccard(a, b):
    """Token-set intersection over union."""
    sa, sb = set(a), set(b)
    if not sa and not sb:
        raise ValueError("both token lists are empty")
    return len(sa & sb) / len(sa | sb)


def _prf(matches, total_a, total_b):
    p = matches / total_a if total_a else 0.0
    r = matches / total_b if total_b else 0.0
    f = 2 * p * r / (p + r) if p + r > 0 else 0.0
    return p, r, f


def _overlap9(s1, s2):
    out = []
    for n in (1, 2, 3):
        g1, g2 = ngrams(s1, n), ngrams(s2, n)
        matches = sum((g1 & g2).values())  # clipped multiset intersection
        out.extend(_prf(matches, sum(g1.values()), sum(g2.values())))
    return tuple(out)


def overlap_features(s1_tokens, s2_tokens, s1_lemmas, s2_lemmas):
    """18-dim overlap feature block; precision normalizes by s1, recall by s2."""
    if not list(s1_tokens) or not list(s2_tokens):
        raise ValueError("token lists must be non-empty")
    return OverlapFeatures(surface=_overlap9(s1_tokens, s2_tokens),
                           lemma=_overlap9(s1_lemmas, s2_lemmas))


def levenshtein(s1, s2):
    """Classic character edit distance, O(len1*len2)."""
    if len(s1) < len(s2):
        s1, s2 = s2, s1
    prev = list(range(len(s2) + 1))
    for i, c1 in enumerate(s1, start=1):
        cur = [i]
        for j, c2 in enumerate(s2, start=1):
            cur.append(min(prev[j] + 1, cur[j - 1] + 1,
                           prev[j - 1] + (c1 != c2)))
        prev = cur
    return prev[-1]


def edit_distance_score(s1, s2):
    """Similarity in [0, 1]: 1 - levenshtein / max length."""
    longest = max(len(s1), len(s2))
    if longest == 0:
        return 1.0
    return 1.0 - levenshtein(s1, s2) / longest


def max_f1(scores, labels):
    """Best F1 over all thresholds of the form `score >= t`.

    Sweeps every distinct score; ties on F1 break toward higher precision.
    Requires at least one positive label.
    """
    scores, labels = list(scores), [bool(l) for l in labels]
    if len(scores) != len(labels):
        raise ValueError("scores and labels must have equal length")
    n_pos = sum(labels)
    if n_pos == 0:
        raise ValueError("need at least one positive label")

    order = sorted(range(len(scores)), key=lambda i: -scores[i])
    best = None
    tp = fp = 0
    i = 0
    while i < len(order):
        t = scores[order[i]]
        # consume the whole tie group at this score
        while i < len(order) and scores[order[i]] == t:
            if labels[order[i]]:
                tp += 1
            else:
                fp += 1
            i += 1
        p = tp / (tp + fp)
        r = tp / n_pos
        f = 2 * p * r / (p + r) if p + r > 0 else 0.0
        point = PrPoint(threshold=t, precision=p, recall=r, f1=f)
        if best is None or (f, p) > (best.f1, best.precision):
            best = point
    return best


def pr_at_threshold(scores, labels, threshold):
    """Precision/recall/F1 of `score >= threshold` predictions."""
    labels = [bool(l) for l in labels]
    tp = sum(1 for s, l in zip(scores, labels) if s >= threshold and l)
    fp = sum(1 for s, l in zip(scores, labels) if s >= threshold and not l)
    n_pos = sum(labels)
    p = tp / (tp + fp) if tp + fp else 0.0
    r = tp / n_pos if n_pos else 0.0
    f = 2 * p * r / (p + r) if p + r > 0 else 0.0
    return PrPoint(threshold=threshold, precision=p, recall=r, f1=f)


def pearson(x, y):
    """Sample Pearson correlation; raises on constant input."""
    x, y = list(map(float, x)), list(map(float, y))
    if len(x) != len(y) or len(x) < 2:
        raise ValueError("need two equal-length vectors of length >= 2")
    mx = sum(x) / len(x)
    my = sum(y) / len(y)
    dx = [v - mx for v in x]
    dy = [v - my for v in y]
    vx = math.sqrt(sum(v * v for v in dx))
    vy = math.sqrt(sum(v * v for v in dy))
    if vx == 0 or vy == 0:
        raise ValueError("pearson undefined for constant vectors")
    return sum(a * b for a, b in zip(dx, dy)) / (vx * vy)


def cohen_kappa(a, b):
    """Chance-corrected agreement between two binary label sequences."""
    a, b = [bool(x) for x in a], [bool(x) for x in b]
    if len(a) != len(b) or not a:
        raise ValueError("need two equal-length non-empty label lists")
    n = len(a)
    p_o = sum(1 for x, y in zip(a, b) if x == y) / n
    pa1 = sum(a) / n
    pb1 = sum(b) / n
    p_e = pa1 * pb1 + (1 - pa1) * (1 - pb1)
    if p_e == 1.0:
        return 1.0 if p_o == 1.0 else 0.0
    return (p_o - p_e) / (1 - p_e)


def histogram(values, bin_width=0.05, low=0.0, high=1.0):
    """Fixed-width histogram over [low, high]; returns (lo, hi, count) rows.

    Values equal to `high` land in the last bin.
    """
    n_bins = int(round((high - low) / bin_width))
    counts = [0] * n_bins
    for v in values:
        idx = int((v - low) / bin_width)
        idx = min(max(idx, 0), n_bins - 1)
        counts[idx] += 1
    return [(low + i * bin_width, low + (i + 1) * bin_width, counts[i])
            for i in range(n_bins)]
