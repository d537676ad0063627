"""Staged heuristic monolingual word aligner.

Stages, each enforcing one-to-one links:
  1. maximal identical contiguous sequences (length >= 2), longest first,
     leftmost on ties;
  2. remaining identical content unigrams, matched by position proximity;
  3. embedding-similar content word pairs (cosine >= tau), scored by
     cosine plus a bonus for already-linked neighbors within a window,
     greedy best-first;
  4. stopwords whose both immediate neighbors are linked to adjacent
     target positions.
"""

from __future__ import annotations

from dataclasses import dataclass

from .. import embeddings

DEFAULT_TAU = 0.7
DEFAULT_WINDOW = 3
DEFAULT_CONTEXT_WEIGHT = 0.5


@dataclass(frozen=True)
class Alignment:
    links: frozenset  # of (source index, target index)

    def source_indices(self):
        return {i for i, _ in self.links}

    def target_indices(self):
        return {j for _, j in self.links}


def _common_sequences(src, tgt, src_free, tgt_free):
    """All (i, j, length >= 2) spans of identical tokens over free positions."""
    spans = []
    for i in range(len(src)):
        for j in range(len(tgt)):
            length = 0
            while (i + length < len(src) and j + length < len(tgt)
                   and src[i + length] == tgt[j + length]
                   and (i + length) in src_free and (j + length) in tgt_free):
                length += 1
            if length >= 2:
                spans.append((length, i, j))
    return spans


def _neighbor_bonus(links, i, j, window):
    near_src = [(i2, j2) for i2, j2 in links if 0 < abs(i2 - i) <= window]
    if not near_src:
        return 0.0
    good = sum(1 for i2, j2 in near_src if abs(j2 - j) <= window)
    return good / len(near_src)


def align(src, tgt, table=None, stopwords=frozenset(), tau=DEFAULT_TAU,
          window=DEFAULT_WINDOW, context_weight=DEFAULT_CONTEXT_WEIGHT):
    """One-to-one word alignment between two token lists."""
    src, tgt = list(src), list(tgt)
    links = set()
    src_free = set(range(len(src)))
    tgt_free = set(range(len(tgt)))

    def take(i, j):
        links.add((i, j))
        src_free.discard(i)
        tgt_free.discard(j)

    # stage 1: identical contiguous sequences, longest first, leftmost ties
    while True:
        spans = _common_sequences(src, tgt, src_free, tgt_free)
        if not spans:
            break
        length, i, j = max(spans, key=lambda s: (s[0], -s[1], -s[2]))
        for off in range(length):
            take(i + off, j + off)

    # stage 2: identical content unigrams by position proximity
    candidates = sorted(
        (abs(i - j), i, j)
        for i in src_free for j in tgt_free
        if src[i] == tgt[j] and src[i] not in stopwords)
    for _, i, j in candidates:
        if i in src_free and j in tgt_free:
            take(i, j)

    # stage 3: embedding-similar content words, greedy best-first
    if table is not None:
        scored = []
        for i in src_free:
            if src[i] in stopwords or table.get(src[i]) is None:
                continue
            for j in tgt_free:
                if tgt[j] in stopwords or table.get(tgt[j]) is None:
                    continue
                cos = embeddings.cosine(table.get(src[i]), table.get(tgt[j]))
                if cos >= tau:
                    scored.append((cos, i, j))
        # recompute the neighbor bonus as links accumulate
        while scored:
            best = max(scored, key=lambda c: (
                c[0] + context_weight * _neighbor_bonus(links, c[1], c[2],
                                                        window),
                -c[1], -c[2]))
            _, i, j = best
            take(i, j)
            scored = [c for c in scored
                      if c[1] in src_free and c[2] in tgt_free]

    # stage 4: stopwords bracketed by links to adjacent targets
    changed = True
    while changed:
        changed = False
        link_map = dict(links)
        for i in sorted(src_free):
            if src[i] not in stopwords:
                continue
            left = link_map.get(i - 1)
            right = link_map.get(i + 1)
            if left is None or right is None or right != left + 2:
                continue
            j = left + 1
            if j in tgt_free:
                take(i, j)
                changed = True
    return Alignment(links=frozenset(links))
