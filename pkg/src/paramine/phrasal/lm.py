"""Interpolated Kneser-Ney n-gram language model with ARPA persistence.

Discounts default to D = n1 / (n1 + 2*n2) per order; lower orders use
continuation counts (with the usual exception for <s>-initial grams).
The conditional distribution of every seen history sums to one over the
vocabulary (real words, </s> and the unknown symbol).
"""

from __future__ import annotations

import math
from collections import Counter, defaultdict

BOS = "<s>"
EOS = "</s>"
UNK = "<unk>"


class NgramLM:
    def __init__(self, order=3, min_count=1, discounts=None):
        if order < 1:
            raise ValueError("order must be >= 1")
        self.order = order
        self.min_count = min_count
        self._discount_override = discounts
        self.vocab = set()          # predictable symbols: words, </s>, <unk>
        self.counts = {}            # order -> Counter over gram tuples
        self.history_total = {}     # order -> {history: sum of counts}
        self.history_distinct = {}  # order -> {history: distinct continuations}
        self.discounts = {}

    # ------------------------------------------------------------ training

    def _map_word(self, w, keep):
        if w in (BOS, EOS):
            return w
        return w if w in keep else UNK

    def fit(self, sentences):
        sentences = [list(s) for s in sentences]
        if not sentences:
            raise ValueError("empty corpus")
        word_counts = Counter(w for s in sentences for w in s)
        keep = {w for w, c in word_counts.items() if c >= self.min_count}
        self.vocab = set(keep) | {EOS, UNK}
        mapped = [[self._map_word(w, keep) for w in s] for s in sentences]

        raw = {m: Counter() for m in range(1, self.order + 1)}
        for m in range(1, self.order + 1):
            for s in mapped:
                padded = [BOS] * (m - 1) + s + [EOS]
                for i in range(len(padded) - m + 1):
                    gram = tuple(padded[i:i + m])
                    if m == 1 and gram[0] == BOS:
                        continue
                    raw[m][gram] += 1

        # adjusted (continuation) counts for the lower orders
        counts = {self.order: raw[self.order]}
        for m in range(self.order - 1, 0, -1):
            adj = Counter()
            for gram in raw[m + 1]:
                adj[gram[1:]] += 1
            for gram in raw[m]:
                if BOS in gram:
                    adj[gram] = raw[m][gram]
                elif gram not in adj:
                    # can happen only for grams unseen as continuations
                    adj[gram] = raw[m][gram]
            counts[m] = adj
        self.counts = counts

        for m in range(1, self.order + 1):
            freq = Counter(counts[m].values())
            n1, n2 = freq.get(1, 0), freq.get(2, 0)
            if self._discount_override is not None:
                self.discounts[m] = float(self._discount_override)
            else:
                self.discounts[m] = n1 / (n1 + 2.0 * n2) if n1 + 2 * n2 else 0.0

        self.history_total = {}
        self.history_distinct = {}
        for m in range(2, self.order + 1):
            total = defaultdict(int)
            distinct = defaultdict(int)
            for gram, c in counts[m].items():
                total[gram[:-1]] += c
                distinct[gram[:-1]] += 1
            self.history_total[m] = dict(total)
            self.history_distinct[m] = dict(distinct)
        self._uni_total = sum(self.counts[1].values())
        self._uni_distinct = len(self.counts[1])
        return self

    # ------------------------------------------------------------- queries

    def map_token(self, w):
        if w in (BOS, EOS):
            return w
        return w if w in self.vocab else UNK

    def _p_unigram(self, w):
        v = len(self.vocab)
        total = self._uni_total
        if total == 0:
            return 1.0 / v
        d = self.discounts[1]
        base = max(self.counts[1].get((w,), 0) - d, 0.0) / total
        return base + d * self._uni_distinct / total * (1.0 / v)

    def _p(self, w, history, m):
        if m == 1:
            return self._p_unigram(w)
        hist = history[-(m - 1):] if m > 1 else ()
        if len(hist) < m - 1:
            hist = (BOS,) * (m - 1 - len(hist)) + hist
        total = self.history_total.get(m, {}).get(hist, 0)
        if total == 0:
            return self._p(w, hist[1:], m - 1)
        d = self.discounts[m]
        c = self.counts[m].get(hist + (w,), 0)
        lam = d * self.history_distinct[m][hist] / total
        return max(c - d, 0.0) / total + lam * self._p(w, hist[1:], m - 1)

    def prob(self, word, history=()):
        """p(word | history), mapping OOV tokens to the unknown symbol."""
        w = self.map_token(word)
        hist = tuple(self.map_token(h) for h in history)
        return self._p(w, hist, self.order)

    def logprob(self, word, history=()):
        p = self.prob(word, history)
        return math.log10(p) if p > 0 else float("-inf")

    def sequence_logprob(self, tokens, bos=True, eos=True):
        """Sum of log10 conditional probabilities over the token sequence."""
        tokens = list(tokens)
        context = [BOS] * (self.order - 1) if bos else []
        targets = tokens + ([EOS] if eos else [])
        total = 0.0
        seq = list(context)
        for w in targets:
            total += self.logprob(w, tuple(seq))
            seq.append(self.map_token(w))
        return total

    def perplexity(self, sentences):
        lp = 0.0
        n = 0
        for s in sentences:
            lp += self.sequence_logprob(s)
            n += len(list(s)) + 1
        return 10 ** (-lp / n)

    def histories(self, m):
        """Observed histories at order m (length m-1 tuples)."""
        if m == 1:
            return [()]
        return sorted(self.history_total.get(m, {}))

    def predictable_vocab(self):
        return sorted(self.vocab)


# ----------------------------------------------------------------- ARPA IO

def _backoff(lm, hist, m):
    """Interpolation weight of history `hist` at order m (= ARPA backoff)."""
    total = lm.history_total.get(m, {}).get(hist, 0)
    if total == 0:
        return 1.0
    return lm.discounts[m] * lm.history_distinct[m][hist] / total


def save_arpa(lm, path):
    """Write the model in ARPA text format (log10 probs and backoffs)."""
    grams = {}
    for m in range(1, lm.order + 1):
        entries = set(lm.counts[m])
        # every history of the next order needs a line to carry its backoff
        entries.update(lm.history_total.get(m + 1, {}))
        grams[m] = sorted(entries)
    if (BOS,) not in lm.counts[1] and lm.order > 1:
        grams[1] = sorted(set(grams[1]) | {(BOS,)})
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\\data\\\n")
        for m in range(1, lm.order + 1):
            fh.write("ngram %d=%d\n" % (m, len(grams[m])))
        for m in range(1, lm.order + 1):
            fh.write("\n\\%d-grams:\n" % m)
            for gram in grams[m]:
                if m == 1 and gram == (BOS,):
                    logp = -99.0
                else:
                    p = lm._p(gram[-1], gram[:-1], m)
                    logp = math.log10(p) if p > 0 else -99.0
                line = "%.7f\t%s" % (logp, " ".join(gram))
                if m < lm.order:
                    bow = _backoff(lm, gram, m + 1)
                    line += "\t%.7f" % math.log10(max(bow, 1e-99))
                fh.write(line + "\n")
        fh.write("\n\\end\\\n")


class ArpaLM:
    """Backoff query model over a loaded ARPA file."""

    def __init__(self, order, probs, backoffs, vocab):
        self.order = order
        self.probs = probs        # gram tuple -> log10 prob
        self.backoffs = backoffs  # gram tuple -> log10 backoff
        self.vocab = vocab

    def map_token(self, w):
        if w in (BOS, EOS):
            return w
        return w if (w,) in self.probs else UNK

    def logprob(self, word, history=()):
        w = self.map_token(word)
        hist = tuple(self.map_token(h) for h in history)
        hist = hist[-(self.order - 1):] if self.order > 1 else ()
        return self._logprob(w, hist)

    def _logprob(self, w, hist):
        gram = hist + (w,)
        if gram in self.probs:
            return self.probs[gram]
        if not hist:
            return -99.0
        return self.backoffs.get(hist, 0.0) + self._logprob(w, hist[1:])

    def prob(self, word, history=()):
        return 10 ** self.logprob(word, history)


def load_arpa(path):
    probs, backoffs = {}, {}
    order = 0
    current = None
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if not line or line.startswith("\\data\\") or line == "\\end\\":
                current = None
                continue
            if line.startswith("ngram "):
                order = max(order, int(line.split("=")[0].split()[1]))
                continue
            if line.startswith("\\") and line.endswith("-grams:"):
                current = int(line[1:].split("-")[0])
                continue
            if current is None:
                continue
            parts = line.split("\t")
            logp = float(parts[0])
            gram = tuple(parts[1].split())
            probs[gram] = logp
            if len(parts) > 2:
                backoffs[gram] = float(parts[2])
    vocab = {g[0] for g in probs if len(g) == 1 and g[0] != BOS}
    return ArpaLM(order=order, probs=probs, backoffs=backoffs, vocab=vocab)
