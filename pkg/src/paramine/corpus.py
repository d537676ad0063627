"""Corpus ingestion, URL grouping, candidate pair generation and labeled
dataset I/O.

Input is line-delimited JSON tweet records; labeled datasets round-trip
through a 3-column TSV (s1, s2, label) where label is either 0/1 or an
explicit vote pattern "(k, m)".
"""

from __future__ import annotations

import hashlib
import json
import re
from dataclasses import dataclass, field, replace
from typing import Optional

from . import textnorm

PARAPHRASE = "paraphrase"
NON_PARAPHRASE = "non_paraphrase"
DEBATABLE = "debatable"

DEFAULT_POS_MIN = 4
DEFAULT_NEG_MAX = 2

ORIGINAL_VS_REST = "original_vs_rest"
ALL_PAIRS = "all_pairs"


@dataclass(frozen=True)
class Tweet:
    id: str
    author: str
    text: str
    urls: tuple = ()
    timestamp: int = 0
    is_auto_retweet: bool = False


@dataclass(frozen=True)
class UrlGroup:
    url: str
    tweets: tuple
    seed_account: Optional[str] = None


@dataclass(frozen=True)
class SentencePair:
    pair_id: str
    s1: str
    s2: str
    url: Optional[str] = None


@dataclass(frozen=True)
class LabeledPair:
    pair: SentencePair
    gold: str
    positive_votes: Optional[int] = None
    total_votes: Optional[int] = None


@dataclass
class Dataset:
    name: str
    pairs: list
    split: str = "train"

    def labels(self):
        return [p.gold == PARAPHRASE for p in self.pairs]

    def without_debatable(self):
        kept = [p for p in self.pairs if p.gold != DEBATABLE]
        return Dataset(name=self.name, pairs=kept, split=self.split)


@dataclass
class IngestResult:
    tweets: list
    skipped: list = field(default_factory=list)  # (line_number, reason)

    @property
    def skip_count(self):
        return len(self.skipped)


def _dedup(urls):
    seen, out = set(), []
    for u in urls:
        if u not in seen:
            seen.add(u)
            out.append(u)
    return out


def ingest_jsonl(stream):
    """Parse line-delimited JSON tweet records; bad lines are skipped and
    reported, never fatal."""
    result = IngestResult(tweets=[])
    for lineno, line in enumerate(stream, start=1):
        line = line.strip()
        if not line:
            continue
        try:
            rec = json.loads(line)
        except json.JSONDecodeError as exc:
            result.skipped.append((lineno, "bad json: %s" % exc.msg))
            continue
        if not isinstance(rec, dict):
            result.skipped.append((lineno, "not an object"))
            continue
        tid = str(rec.get("id", "")).strip()
        text = str(rec.get("text", "")).strip()
        if not tid or not text:
            result.skipped.append((lineno, "missing id or text"))
            continue
        auto = bool(rec.get("retweeted")) or bool(re.match(r"RT @\w+", text))
        result.tweets.append(Tweet(
            id=tid,
            author=str(rec.get("author", "")),
            text=text,
            urls=tuple(_dedup(rec.get("urls") or [])),
            timestamp=int(rec.get("timestamp") or 0),
            is_auto_retweet=auto,
        ))
    return result


def resolve_urls(tweet, resolver):
    """Map shortened URLs to canonical forms; unknown URLs pass through.

    `resolver` is a mapping or a callable url -> url.
    """
    if resolver is None:
        lookup = lambda u: u
    elif callable(resolver):
        def lookup(u):
            try:
                return resolver(u) or u
            except Exception:
                return u
    else:
        lookup = lambda u: resolver.get(u, u)
    return replace(tweet, urls=tuple(_dedup(lookup(u) for u in tweet.urls)))


def group_by_url(tweets, seed_accounts=()):
    """One group per canonical URL with >= 2 non-auto-retweet tweets.

    A tweet with k URLs appears in k groups; group members are sorted by
    timestamp.  The seed account is the author of the earliest member
    posted by any account in `seed_accounts`.
    """
    seeds = set(seed_accounts)
    buckets = {}
    for tweet in tweets:
        if tweet.is_auto_retweet:
            continue
        for url in tweet.urls:
            buckets.setdefault(url, []).append(tweet)
    groups = []
    for url in sorted(buckets):
        members = sorted(buckets[url], key=lambda t: (t.timestamp, t.id))
        if len(members) < 2:
            continue
        seed = next((t.author for t in members if t.author in seeds), None)
        groups.append(UrlGroup(url=url, tweets=tuple(members),
                               seed_account=seed))
    return groups


def _norm_ws(s):
    return " ".join(s.split())


def _first_sentence(text):
    sentences = textnorm.split_sentences(text)
    return sentences[0] if sentences else text.strip()


def _pair_id(url, index):
    tag = hashlib.sha1((url or "").encode("utf-8")).hexdigest()[:10]
    return "%s-%04d" % (tag, index)


def generate_pairs(group, max_candidates=10, strategy=ORIGINAL_VS_REST):
    """Candidate sentence pairs from one URL group.

    original_vs_rest: s1 is the first sentence of the earliest tweet from
    the seed account (earliest overall if none); s2 iterates over other
    tweets' first sentences in timestamp order, up to max_candidates.
    all_pairs: all unordered tweet pairs, up to max_candidates pairs per
    anchor tweet.
    """
    if len(group.tweets) < 2:
        return []
    pairs = []
    if strategy == ORIGINAL_VS_REST:
        original = next((t for t in group.tweets
                         if t.author == group.seed_account), group.tweets[0])
        s1 = _first_sentence(original.text)
        for tweet in group.tweets:
            if tweet.id == original.id or len(pairs) >= max_candidates:
                continue
            s2 = _first_sentence(tweet.text)
            if _norm_ws(s1) == _norm_ws(s2):
                continue
            pairs.append(SentencePair(pair_id=_pair_id(group.url, len(pairs)),
                                      s1=s1, s2=s2, url=group.url))
    elif strategy == ALL_PAIRS:
        sentences = [_first_sentence(t.text) for t in group.tweets]
        for i in range(len(sentences)):
            taken = 0
            for j in range(i + 1, len(sentences)):
                if taken >= max_candidates:
                    break
                if _norm_ws(sentences[i]) == _norm_ws(sentences[j]):
                    continue
                taken += 1
                pairs.append(SentencePair(
                    pair_id=_pair_id(group.url, len(pairs)),
                    s1=sentences[i], s2=sentences[j], url=group.url))
    else:
        raise ValueError("unknown strategy %r" % (strategy,))
    return pairs


def aggregate_votes(positive_votes, total_votes,
                    pos_min=DEFAULT_POS_MIN, neg_max=DEFAULT_NEG_MAX):
    """Majority-vote label from vote counts."""
    if not (0 <= positive_votes <= total_votes):
        raise ValueError("need 0 <= positive_votes <= total_votes")
    if neg_max >= pos_min:
        raise ValueError("need neg_max < pos_min")
    if positive_votes >= pos_min:
        return PARAPHRASE
    if positive_votes <= neg_max:
        return NON_PARAPHRASE
    return DEBATABLE


_VOTE_RE = re.compile(r"^\((\d+),\s*(\d+)\)$")


def _clean_field(s):
    return s.replace("\t", " ")


def import_labeled_tsv(path, name=None, split="train",
                       pos_min=DEFAULT_POS_MIN, neg_max=DEFAULT_NEG_MAX):
    """Read a 3-column TSV into a Dataset; unparseable rows are skipped.

    Returns (dataset, skipped) where skipped lists (line_number, reason).
    """
    pairs, skipped = [], []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.rstrip("\n")
            if not line:
                continue
            cols = line.split("\t")
            if len(cols) != 3:
                skipped.append((lineno, "expected 3 columns, got %d" % len(cols)))
                continue
            s1, s2, label = cols
            pid = "%s-%d" % (hashlib.sha1(
                ("%s\t%s" % (s1, s2)).encode("utf-8")).hexdigest()[:10], lineno)
            pair = SentencePair(pair_id=pid, s1=s1, s2=s2)
            m = _VOTE_RE.match(label.strip())
            if m:
                pos, tot = int(m.group(1)), int(m.group(2))
                if pos > tot:
                    skipped.append((lineno, "positive votes exceed total"))
                    continue
                gold = aggregate_votes(pos, tot, pos_min, neg_max)
                pairs.append(LabeledPair(pair=pair, gold=gold,
                                         positive_votes=pos, total_votes=tot))
            elif label.strip() in ("0", "1"):
                gold = PARAPHRASE if label.strip() == "1" else NON_PARAPHRASE
                pairs.append(LabeledPair(pair=pair, gold=gold))
            else:
                skipped.append((lineno, "unparseable label %r" % label))
    return Dataset(name=name or str(path), pairs=pairs, split=split), skipped


def export_labeled_tsv(dataset, path):
    """Write a Dataset back to canonical TSV (vote pattern when votes are
    known, else 0/1); tabs inside text become single spaces."""
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for lp in dataset.pairs:
            if lp.positive_votes is not None and lp.total_votes is not None:
                label = "(%d, %d)" % (lp.positive_votes, lp.total_votes)
            else:
                label = "1" if lp.gold == PARAPHRASE else "0"
            fh.write("%s\t%s\t%s\n" % (_clean_field(lp.pair.s1),
                                       _clean_field(lp.pair.s2), label))
