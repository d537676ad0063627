"""Kneser-Ney LM: normalization, discounts, ARPA round trip."""

import math
import random

import pytest

from paramine.phrasal import lm as L


CORPUS = [["a", "b"], ["a", "b"], ["a", "c"], ["b", "c", "a"],
          ["c", "a", "b"], ["d", "a"], ["b", "d"]]


def random_corpus(rng, vocab="abcde", n_sents=12, max_len=5):
    return [[rng.choice(vocab) for _ in range(rng.randint(1, max_len))]
            for _ in range(n_sents)]


# ------------------------------------------------------------ normalization

@pytest.mark.parametrize("order", [1, 2, 3])
def test_per_history_normalization(order):
    rng = random.Random(42)
    for trial in range(10):
        model = L.NgramLM(order=order).fit(random_corpus(rng))
        vocab = model.predictable_vocab()
        for hist in model.histories(model.order):
            total = sum(model._p(w, hist, model.order) for w in vocab)
            assert total == pytest.approx(1.0, abs=1e-6), (trial, hist)


def test_unigram_normalization_includes_unknown():
    model = L.NgramLM(order=2).fit(CORPUS)
    vocab = model.predictable_vocab()
    assert L.UNK in vocab and L.EOS in vocab and L.BOS not in vocab
    assert sum(model._p_unigram(w) for w in vocab) == pytest.approx(1.0)


def test_zero_discount_is_maximum_likelihood():
    model = L.NgramLM(order=2, discounts=0.0).fit(CORPUS)
    # with D=0 the bigram conditional is pure relative frequency
    count_ab = sum(1 for s in CORPUS
                   for x, y in zip(s, s[1:]) if (x, y) == ("a", "b"))
    total_a = model.history_total[2][("a",)]
    assert model.prob("b", ("a",)) == pytest.approx(count_ab / total_a)


def test_discount_formula():
    model = L.NgramLM(order=2).fit(CORPUS)
    from collections import Counter
    freq = Counter(model.counts[2].values())
    n1, n2 = freq.get(1, 0), freq.get(2, 0)
    assert model.discounts[2] == pytest.approx(n1 / (n1 + 2 * n2))


def test_kneser_ney_prefers_frequent_continuation():
    model = L.NgramLM(order=2).fit([["a", "b"], ["a", "b"], ["a", "c"]])
    assert model.prob("b", ("a",)) > model.prob("c", ("a",))


def test_unknown_words_map_to_unk():
    model = L.NgramLM(order=2).fit(CORPUS)
    assert model.prob("zzz", ("a",)) == model.prob(L.UNK, ("a",))
    assert model.prob("b", ("zzz",)) == model.prob("b", (L.UNK,))


def test_min_count_maps_singletons_to_unk():
    corpus = [["x", "y"], ["x", "z"], ["x", "y"]]
    model = L.NgramLM(order=2, min_count=2).fit(corpus)
    assert "z" not in model.vocab
    assert "x" in model.vocab and "y" in model.vocab
    # the singleton now behaves exactly like any unknown word
    assert model.prob("z", ("x",)) == model.prob(L.UNK, ("x",))


def test_sequence_logprob_and_perplexity():
    model = L.NgramLM(order=2).fit(CORPUS)
    lp = model.sequence_logprob(["a", "b"])
    manual = (model.logprob("a", (L.BOS,)) + model.logprob("b", ("a",))
              + model.logprob(L.EOS, ("b",)))
    assert lp == pytest.approx(manual)
    assert model.perplexity(CORPUS) > 1.0


def test_empty_corpus_raises():
    with pytest.raises(ValueError):
        L.NgramLM(order=2).fit([])
    with pytest.raises(ValueError):
        L.NgramLM(order=0)


# ------------------------------------------------------------------- ARPA

def test_arpa_round_trip(tmp_path):
    rng = random.Random(3)
    corpus = random_corpus(rng, n_sents=20)
    model = L.NgramLM(order=3).fit(corpus)
    path = tmp_path / "model.arpa"
    L.save_arpa(model, path)
    loaded = L.load_arpa(path)
    assert loaded.order == 3
    vocab = model.predictable_vocab()
    histories = [(L.BOS, L.BOS)] + [h for h in model.histories(3)][:20]
    worst = 0.0
    for hist in histories:
        for w in vocab:
            p = model.prob(w, hist)
            if p <= 0:
                continue
            worst = max(worst, abs(model.logprob(w, hist)
                                   - loaded.logprob(w, hist)))
    assert worst < 1e-6


def test_arpa_round_trip_unseen_history(tmp_path):
    model = L.NgramLM(order=3).fit(CORPUS)
    path = tmp_path / "model.arpa"
    L.save_arpa(model, path)
    loaded = L.load_arpa(path)
    # a history never observed at order 3 backs off identically
    hist = ("d", "d")
    for w in model.predictable_vocab():
        p = model.prob(w, hist)
        if p > 0:
            assert loaded.logprob(w, hist) == pytest.approx(
                model.logprob(w, hist), abs=1e-6)


def test_arpa_bos_convention(tmp_path):
    model = L.NgramLM(order=2).fit(CORPUS)
    path = tmp_path / "model.arpa"
    L.save_arpa(model, path)
    text = path.read_text(encoding="utf-8")
    assert "\\data\\" in text and "\\end\\" in text
    # <s> carries the -99 placeholder log-probability
    bos_lines = [ln for ln in text.splitlines()
                 if ln.split("\t")[1:2] == [L.BOS]]
    assert bos_lines and bos_lines[0].startswith("-99")


def test_arpa_probabilities_normalize(tmp_path):
    model = L.NgramLM(order=2).fit(CORPUS)
    path = tmp_path / "model.arpa"
    L.save_arpa(model, path)
    loaded = L.load_arpa(path)
    for hist in [(w,) for w in model.predictable_vocab()] + [(L.BOS,)]:
        total = sum(loaded.prob(w, hist) for w in model.predictable_vocab())
        assert total == pytest.approx(1.0, abs=1e-6), hist
