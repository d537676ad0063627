"""Tokenizer, sentence splitter, stemmer and retweet-filter tests."""

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from paramine import textnorm


# ---------------------------------------------------------------- tokenizer

def surfaces(text):
    return [t.surface for t in textnorm.tokenize(text)]


def kinds(text):
    return [t.kind for t in textnorm.tokenize(text)]


def test_tokenize_basic_tweet():
    toks = textnorm.tokenize(
        "Samsung halts Galaxy Note 7 production http://cnn.it/x2 #tech @cnn")
    assert [t.surface for t in toks] == [
        "samsung", "halts", "galaxy", "note", "7", "production",
        "http://cnn.it/x2", "#tech", "@cnn"]
    assert toks[6].kind == textnorm.URL
    assert toks[7].kind == textnorm.HASHTAG
    assert toks[8].kind == textnorm.MENTION


def test_tokenize_clitics():
    assert surfaces("I can't believe it's here") == [
        "i", "ca", "n't", "believe", "it", "'s", "here"]


def test_tokenize_numbers_and_punct():
    assert surfaces("Up 3.5% today!") == ["up", "3.5%", "today", "!"]


def test_tokenize_url_trailing_punct_split_off():
    toks = textnorm.tokenize("see http://ex.com/a, ok")
    assert toks[1].surface == "http://ex.com/a"
    assert toks[2].kind == textnorm.PUNCT


def test_tokenize_emoticon_kept_whole():
    toks = textnorm.tokenize("great news :)")
    assert toks[-1] == textnorm.Token(":)", textnorm.EMOTICON)


def test_tokenize_empty():
    assert textnorm.tokenize("") == []
    assert textnorm.tokenize("   ") == []


@given(st.text(alphabet="abc XY.#@:/!9'", max_size=40))
@settings(max_examples=300)
def test_tokenize_loses_no_non_space_characters(text):
    # every non-whitespace char of the input appears in some token
    joined = "".join(surfaces(text))
    for ch in text:
        if not ch.isspace():
            assert ch.lower() in joined


@given(st.text(alphabet="abc XY.#@:/!9'", max_size=40))
@settings(max_examples=200)
def test_tokenize_reconstruction_case_insensitive(text):
    # concatenated surfaces equal the input with whitespace removed,
    # up to lowercasing of words/mentions/hashtags
    expected = "".join(text.split()).lower()
    assert "".join(surfaces(text)).lower() == expected


# --------------------------------------------------------- sentence splitter

def test_split_sentences_plain():
    assert textnorm.split_sentences("One fell. Two rose! Three?") == [
        "One fell.", "Two rose!", "Three?"]


def test_split_sentences_protects_urls():
    out = textnorm.split_sentences("Read this http://ex.com/a.b.c then reply.")
    assert out == ["Read this http://ex.com/a.b.c then reply."]


def test_split_sentences_abbreviation():
    out = textnorm.split_sentences("The U.S. economy grew. Analysts agreed.")
    assert out == ["The U.S. economy grew.", "Analysts agreed."]


def test_split_sentences_decimal_number():
    assert textnorm.split_sentences("It rose 3.5 percent today.") == [
        "It rose 3.5 percent today."]


def test_split_sentences_no_terminal():
    assert textnorm.split_sentences("no punctuation at all") == [
        "no punctuation at all"]


# ------------------------------------------------------------------ stemmer

def test_lemmatize_rules():
    assert textnorm.lemmatize("halted") == "halt"
    assert textnorm.lemmatize("studies") == "studi"
    assert textnorm.lemmatize("classes") == "class"
    assert textnorm.lemmatize("pass") == "pass"
    assert textnorm.lemmatize("cats") == "cat"


@given(st.text(alphabet="abcdefgis", min_size=1, max_size=12))
@settings(max_examples=300)
def test_lemmatize_idempotent(word):
    once = textnorm.lemmatize(word)
    assert textnorm.lemmatize(once) == once


# ------------------------------------------------------------ retweet filter

def test_manual_retweet_rt_prefix_copy():
    orig = "Samsung halts Note 7 production"
    assert textnorm.is_manual_retweet("RT @newswire: " + orig, orig)


def test_manual_retweet_hashtag_and_url_ignored():
    orig = "Samsung halts Note 7 production"
    cand = orig + " #tech http://smn.it/x1"
    assert textnorm.is_manual_retweet(cand, orig)


def test_manual_retweet_subsequence():
    orig = "Breaking news: Samsung halts Note 7 production worldwide"
    assert textnorm.is_manual_retweet("Samsung halts Note 7 production", orig)


def test_manual_retweet_punctuation_variant():
    orig = "Samsung halts Note 7 production"
    assert textnorm.is_manual_retweet(orig + "...", orig)


def test_manual_retweet_title_match():
    meta = textnorm.PageMeta(title="Samsung halts Note 7 production | CNN")
    assert textnorm.is_manual_retweet("Samsung halts Note 7 production",
                                      "Totally unrelated original text here",
                                      meta)


def test_genuine_rewrite_not_flagged():
    orig = "Samsung halts Galaxy Note 7 production after reports of fires"
    cand = "Note 7 production halted by Samsung after more fires"
    assert not textnorm.is_manual_retweet(cand, orig)


def test_filter_group_survivors(retweet_group):
    filtered = textnorm.filter_group(retweet_group)
    ids = [t.id for t in filtered.tweets]
    assert ids == ["t00", "t05", "t06", "t07", "t09"]


def test_filter_group_keeps_earliest(retweet_group):
    filtered = textnorm.filter_group(retweet_group)
    assert filtered.tweets[0].id == "t00"


def test_filter_group_idempotent(retweet_group):
    once = textnorm.filter_group(retweet_group)
    twice = textnorm.filter_group(once)
    assert [t.id for t in twice.tweets] == [t.id for t in once.tweets]


def test_filter_direction(retweet_group):
    """Filtering removes near-copies: diversity up, overlap down."""
    before = [t.text for t in retweet_group.tweets]
    after = [t.text for t in textnorm.filter_group(retweet_group).tweets]
    pinc_before, jac_before = textnorm.group_stats(before)
    pinc_after, jac_after = textnorm.group_stats(after)
    assert pinc_after > pinc_before
    assert jac_after < jac_before


def test_load_page_meta(tmp_path):
    path = tmp_path / "meta.jsonl"
    path.write_text('{"url": "http://a", "title": "T", "description": "D"}\n')
    meta = textnorm.load_page_meta(path)
    assert meta["http://a"] == textnorm.PageMeta(title="T", description="D")
