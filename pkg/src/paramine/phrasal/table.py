"""Consistency-based phrase extraction and phrase-table statistics."""

from __future__ import annotations

import random
from collections import Counter, defaultdict
from dataclasses import dataclass

DEFAULT_MAX_LEN = 4
LEX_FLOOR = 1e-9  # for word pairs never linked


@dataclass(frozen=True)
class PhrasePair:
    source: tuple
    target: tuple
    count: int = 1


@dataclass(frozen=True)
class PhraseEntry:
    count: int
    phi_tgt_given_src: float
    phi_src_given_tgt: float
    lex_tgt_given_src: float
    lex_src_given_tgt: float


@dataclass
class PhraseTable:
    entries: dict  # (source tuple, target tuple) -> PhraseEntry


def extract_phrases(src, tgt, alignment, max_len=DEFAULT_MAX_LEN):
    """All consistent (source span, target span) pairs up to max_len.

    A span pair is consistent when it contains at least one link and no
    link crosses its boundary.  Identical-string pairs are discarded.
    """
    src, tgt = list(src), list(tgt)
    links = list(alignment.links)
    pairs = []
    for i1 in range(len(src)):
        for i2 in range(i1, min(i1 + max_len, len(src))):
            for j1 in range(len(tgt)):
                for j2 in range(j1, min(j1 + max_len, len(tgt))):
                    inside = False
                    consistent = True
                    for (a, b) in links:
                        src_in = i1 <= a <= i2
                        tgt_in = j1 <= b <= j2
                        if src_in and tgt_in:
                            inside = True
                        elif src_in or tgt_in:
                            consistent = False
                            break
                    if not inside or not consistent:
                        continue
                    source = tuple(src[i1:i2 + 1])
                    target = tuple(tgt[j1:j2 + 1])
                    if source == target:
                        continue
                    pairs.append(PhrasePair(source=source, target=target))
    return pairs


def word_links(src, tgt, alignment):
    """The (source word, target word) pairs of an alignment's links,
    identical links included — feeds the lexical-weight word model."""
    return [(src[i], tgt[j]) for i, j in sorted(alignment.links)]


def build_phrase_table(pairs, links=None):
    """Relative-frequency translation probabilities and lexical weights.

    Word-level translation probabilities come from `links` (a list of
    (src word, tgt word) alignment links, see word_links) when given;
    otherwise they fall back to the single-word phrase pairs, which
    misses identical word links since those pairs are discarded.
    """
    if not pairs:
        raise ValueError("no phrase pairs")
    counts = Counter()
    for pp in pairs:
        counts[(pp.source, pp.target)] += pp.count
    src_totals = defaultdict(int)
    tgt_totals = defaultdict(int)
    word_fwd = Counter()   # (src word, tgt word) link counts
    word_src = Counter()
    word_tgt = Counter()
    for (source, target), c in counts.items():
        src_totals[source] += c
        tgt_totals[target] += c
        if links is None and len(source) == 1 and len(target) == 1:
            word_fwd[(source[0], target[0])] += c
            word_src[source[0]] += c
            word_tgt[target[0]] += c
    if links is not None:
        for s, t in links:
            word_fwd[(s, t)] += 1
            word_src[s] += 1
            word_tgt[t] += 1

    def w_fwd(s, t):
        if word_src[s] == 0:
            return LEX_FLOOR
        return max(word_fwd[(s, t)] / word_src[s], LEX_FLOOR)

    def w_bwd(t, s):
        if word_tgt[t] == 0:
            return LEX_FLOOR
        return max(word_fwd[(s, t)] / word_tgt[t], LEX_FLOOR)

    entries = {}
    for (source, target), c in counts.items():
        lex_fwd = 1.0
        for t in target:
            lex_fwd *= max(w_fwd(s, t) for s in source)
        lex_fwd **= 1.0 / len(target)
        lex_bwd = 1.0
        for s in source:
            lex_bwd *= max(w_bwd(t, s) for t in target)
        lex_bwd **= 1.0 / len(source)
        entries[(source, target)] = PhraseEntry(
            count=c,
            phi_tgt_given_src=c / src_totals[source],
            phi_src_given_tgt=c / tgt_totals[target],
            lex_tgt_given_src=lex_fwd,
            lex_src_given_tgt=lex_bwd,
        )
    return PhraseTable(entries=entries)


def save_phrase_table(table, path):
    """TSV: p, p', count, phi(p'|p), phi(p|p'), lex(p'|p), lex(p|p');
    sorted by p then descending count."""
    rows = sorted(table.entries.items(),
                  key=lambda kv: (kv[0][0], -kv[1].count, kv[0][1]))
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for (source, target), e in rows:
            fh.write("%s\t%s\t%d\t%.8g\t%.8g\t%.8g\t%.8g\n" % (
                " ".join(source), " ".join(target), e.count,
                e.phi_tgt_given_src, e.phi_src_given_tgt,
                e.lex_tgt_given_src, e.lex_src_given_tgt))


def load_phrase_table(path):
    entries = {}
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            line = line.rstrip("\n")
            if not line:
                continue
            p, pp, count, f1, f2, l1, l2 = line.split("\t")
            entries[(tuple(p.split()), tuple(pp.split()))] = PhraseEntry(
                count=int(count), phi_tgt_given_src=float(f1),
                phi_src_given_tgt=float(f2), lex_tgt_given_src=float(l1),
                lex_src_given_tgt=float(l2))
    return PhraseTable(entries=entries)


def _fold(pair):
    source, target = pair
    return (tuple(w.casefold() for w in source),
            tuple(w.casefold() for w in target))


def table_overlap(table_a, table_b, sample_size, seed=0):
    """Coverage of a 1:1 union sample in each of two phrase tables.

    Samples `sample_size` entries from each table (capped at table size,
    with a warning flag), pools them, and reports the fraction of the
    pool found in each table; a match is a case-folded (p, p') in either
    direction.
    """
    rng = random.Random(seed)

    def sample(table):
        keys = sorted(table.entries)
        n = min(sample_size, len(keys))
        return rng.sample(keys, n), n < sample_size

    sample_a, capped_a = sample(table_a)
    sample_b, capped_b = sample(table_b)
    pool = [_fold(p) for p in sample_a + sample_b]

    def lookup(table):
        folded = set()
        for pair in table.entries:
            f = _fold(pair)
            folded.add(f)
            folded.add((f[1], f[0]))
        return sum(1 for p in pool if p in folded) / len(pool)

    return {
        "coverage_a": lookup(table_a),
        "coverage_b": lookup(table_b),
        "sample_a": len(sample_a),
        "sample_b": len(sample_b),
        "capped": capped_a or capped_b,
    }
