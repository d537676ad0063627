"""Twitter-aware text normalization.

Tokenization, sentence splitting, a rule-table stemmer standing in for a
lemmatizer, and the manual-retweet filter.  Rule tables (abbreviations,
stem rules, clitic suffixes, stopwords) ship as plain-text data files next
to this module.
"""

from __future__ import annotations

import dataclasses
import itertools
import json
import re
from dataclasses import dataclass
from importlib import resources
from typing import Optional

from . import metrics

# token kinds
WORD = "word"
MENTION = "mention"
HASHTAG = "hashtag"
URL = "url"
NUMBER = "number"
EMOTICON = "emoticon"
PUNCT = "punct"


@dataclass(frozen=True)
class Token:
    surface: str
    kind: str


@dataclass(frozen=True)
class PageMeta:
    """Title/description meta tags of a linked page."""

    title: Optional[str] = None
    description: Optional[str] = None


def _load_lines(name):
    text = resources.files("paramine.data").joinpath(name).read_text("utf-8")
    return [ln.strip() for ln in text.splitlines()
            if ln.strip() and not ln.startswith("#")]


_ABBREVIATIONS = frozenset(w.lower() for w in _load_lines("abbreviations.txt"))
_CLITICS = sorted(_load_lines("contractions.txt"), key=len, reverse=True)
STOPWORDS = frozenset(_load_lines("stopwords.txt"))


def _load_stem_rules():
    rules = []
    for ln in _load_lines("stem_rules.tsv"):
        parts = ln.split("\t")
        suffix = parts[0]
        replacement = parts[1] if len(parts) > 1 else ""
        min_stem = int(parts[2]) if len(parts) > 2 and parts[2] else 0
        rules.append((suffix, replacement, min_stem))
    return rules


_STEM_RULES = _load_stem_rules()

_URL_RE = re.compile(
    r"(?:https?://\S+"
    r"|www\.\S+"
    r"|[A-Za-z0-9][\w.-]*\.(?:com|org|net|gov|edu|io|co|uk|us)(?:/\S*)?)")
_EMOTICON_RE = re.compile(r"(?:[<>]?[:;=8][\-o*']?[)\](\[dDpP/\\|}{]|<3)")
_MENTION_RE = re.compile(r"@\w+")
_HASHTAG_RE = re.compile(r"#\w+")
_NUMBER_RE = re.compile(r"[+-]?\d+(?:[.,]\d+)*%?")
_WORD_RE = re.compile(r"[A-Za-z][A-Za-z0-9']*")
_PUNCT_RE = re.compile(r"[^\w\s]+|_")
_TRAILING_PUNCT = ".,;:!?'\")]"


def looks_like_url(s):
    m = _URL_RE.match(s)
    return bool(m) and m.end() == len(s)


def _split_clitics(word):
    """Split trailing clitic suffixes off a word, longest suffix first."""
    parts = []
    while True:
        for suffix in _CLITICS:
            if word.lower().endswith(suffix) and len(word) > len(suffix):
                parts.append(word[len(word) - len(suffix):])
                word = word[:len(word) - len(suffix)]
                break
        else:
            break
    return [word] + list(reversed(parts))


def tokenize(text):
    """Split text into typed tokens.

    URLs, @mentions, #hashtags, emoticons and numbers are kept whole;
    word, mention and hashtag surfaces are lowercased; clitic suffixes
    (n't, 'll, ...) are split off word tokens.
    """
    tokens = []
    pos = 0
    n = len(text)
    while pos < n:
        if text[pos].isspace():
            pos += 1
            continue
        m = _URL_RE.match(text, pos)
        if m:
            surface = m.group(0)
            trimmed = surface.rstrip(_TRAILING_PUNCT)
            # keep at least the scheme+host; push trailing punct back
            if trimmed and looks_like_url(trimmed):
                tokens.append(Token(trimmed, URL))
                pos += len(trimmed)
                continue
            if looks_like_url(surface):
                tokens.append(Token(surface, URL))
                pos = m.end()
                continue
        for regex, kind in ((_EMOTICON_RE, EMOTICON), (_MENTION_RE, MENTION),
                            (_HASHTAG_RE, HASHTAG), (_NUMBER_RE, NUMBER),
                            (_WORD_RE, WORD), (_PUNCT_RE, PUNCT)):
            m = regex.match(text, pos)
            if m:
                surface = m.group(0)
                if kind == WORD:
                    for piece in _split_clitics(surface.lower()):
                        tokens.append(Token(piece, WORD))
                elif kind in (MENTION, HASHTAG):
                    tokens.append(Token(surface.lower(), kind))
                else:
                    tokens.append(Token(surface, kind))
                pos = m.end()
                break
        else:
            tokens.append(Token(text[pos], PUNCT))
            pos += 1
    return tokens


def token_surfaces(text):
    return [t.surface for t in tokenize(text)]


def _protected_spans(text):
    spans = []
    for m in _URL_RE.finditer(text):
        surface = m.group(0)
        trimmed = surface.rstrip(_TRAILING_PUNCT)
        end = m.start() + len(trimmed) if trimmed else m.end()
        spans.append((m.start(), end))
    return spans


def split_sentences(text):
    """Split on sentence-final . ! ? runs, protecting URLs and abbreviations."""
    spans = _protected_spans(text)
    cuts = []
    for m in re.finditer(r"[.!?]+", text):
        if any(s <= m.start() < e for s, e in spans):
            continue
        # dot inside a token (U.S., 3.5): next char is not a break
        if m.end() < len(text) and not text[m.end()].isspace():
            continue
        if m.group(0).endswith("."):
            # token preceding the run, including the run itself
            start = m.start()
            while start > 0 and not text[start - 1].isspace():
                start -= 1
            token = text[start:m.end()].lower()
            if token in _ABBREVIATIONS:
                continue
        cuts.append(m.end())
    sentences = []
    prev = 0
    for cut in cuts:
        piece = text[prev:cut].strip()
        if piece:
            sentences.append(piece)
        prev = cut
    tail = text[prev:].strip()
    if tail:
        sentences.append(tail)
    return sentences


def lemmatize(word):
    """Deterministic suffix-stripping stem; idempotent by construction."""
    while True:
        for suffix, replacement, min_stem in _STEM_RULES:
            if not word.endswith(suffix):
                continue
            stem = word[:len(word) - len(suffix)]
            if len(stem) < min_stem:
                continue
            if replacement == "=":
                return word
            word = stem + replacement
            break
        else:
            return word


_RT_PREFIX_RE = re.compile(r"^\s*(?:rt\s+@\w+\s*:?\s*)+", re.IGNORECASE)


def _stripped_tokens(text):
    """Token sequence after removing RT prefix, mentions, hashtags and
    trailing URLs."""
    text = _RT_PREFIX_RE.sub("", text)
    toks = [t for t in tokenize(text) if t.kind not in (MENTION, HASHTAG)]
    while toks and toks[-1].kind == URL:
        toks.pop()
    return toks


def _is_contiguous_subsequence(short, long):
    if not short:
        return True
    for i in range(len(long) - len(short) + 1):
        if long[i:i + len(short)] == short:
            return True
    return False


def _meta_token_sequences(meta):
    seqs = []
    if meta is None:
        return seqs
    if meta.title:
        title = meta.title.rsplit("|", 1)[0] if "|" in meta.title else meta.title
        seqs.append([t.surface for t in tokenize(title) if t.kind != PUNCT])
    if meta.description:
        seqs.append([t.surface for t in tokenize(meta.description)
                     if t.kind != PUNCT])
    return seqs


def is_manual_retweet(candidate, original, meta=None):
    """Rule-based manual-retweet check.

    True iff, after stripping RT prefixes, mentions, hashtags and trailing
    URLs: (a) one token sequence is a contiguous subsequence of the other,
    (b) the sequences differ only in punctuation tokens, or (c) the
    candidate equals the page's title or description token sequence.
    """
    cand = _stripped_tokens(candidate)
    orig = _stripped_tokens(original)
    cand_surf = [t.surface for t in cand]
    orig_surf = [t.surface for t in orig]
    if len(cand_surf) <= len(orig_surf):
        if _is_contiguous_subsequence(cand_surf, orig_surf):
            return True
    elif _is_contiguous_subsequence(orig_surf, cand_surf):
        return True
    cand_words = [t.surface for t in cand if t.kind != PUNCT]
    orig_words = [t.surface for t in orig if t.kind != PUNCT]
    if cand_words == orig_words:
        return True
    return any(cand_words == seq for seq in _meta_token_sequences(meta))


def filter_group(group, meta=None):
    """Drop auto-retweets, then manual retweets of earlier retained tweets.

    The earliest non-auto tweet is always retained (it is the original);
    each later tweet is dropped when flagged against any retained earlier
    tweet or against the page meta.
    """
    survivors = []
    for tweet in group.tweets:
        if tweet.is_auto_retweet:
            continue
        if not survivors:
            survivors.append(tweet)
            continue
        flagged = any(is_manual_retweet(tweet.text, kept.text, meta)
                      for kept in survivors)
        if not flagged:
            survivors.append(tweet)
    return dataclasses.replace(group, tweets=survivors)


def group_stats(texts):
    """Mean pairwise PINC and Jaccard over all ordered pairs of texts."""
    token_lists = [token_surfaces(t) for t in texts]
    pincs, jacs = [], []
    for a, b in itertools.permutations(range(len(token_lists)), 2):
        if token_lists[b]:
            pincs.append(metrics.pinc(token_lists[a], token_lists[b]))
        if token_lists[a] or token_lists[b]:
            jacs.append(metrics.jaccard(token_lists[a], token_lists[b]))
    mean = lambda xs: sum(xs) / len(xs) if xs else 0.0
    return mean(pincs), mean(jacs)


def load_page_meta(path):
    """JSONL sidecar keyed by url -> PageMeta."""
    out = {}
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if not line:
                continue
            rec = json.loads(line)
            out[rec["url"]] = PageMeta(title=rec.get("title"),
                                       description=rec.get("description"))
    return out
