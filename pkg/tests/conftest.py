import numpy as np
import pytest

from paramine import corpus, embeddings


@pytest.fixture
def embedding_file(tmp_path):
    """Small 3-d embedding table written to disk."""
    vectors = {
        "samsung": (1.0, 0.0, 0.0),
        "halts": (0.8, 0.6, 0.0),
        "suspends": (0.9, 0.52, 0.0),
        "production": (0.0, 0.0, 1.0),
        "galaxy": (0.0, 1.0, 0.0),
        "note": (0.1, 0.9, 0.1),
        "stops": (0.82, 0.57, 0.01),
        "cat": (0.5, 0.5, 0.0),
        "dog": (0.45, 0.55, 0.1),
    }
    path = tmp_path / "vectors.txt"
    with open(path, "w", encoding="utf-8") as fh:
        for word, vec in vectors.items():
            fh.write(word + " " + " ".join("%g" % v for v in vec) + "\n")
    return path


@pytest.fixture
def embedding_table(embedding_file):
    return embeddings.load_embeddings(embedding_file)


def _tweet(i, text, ts=None, author=None, auto=False):
    return corpus.Tweet(id="t%02d" % i, author=author or "user%d" % i,
                        text=text, urls=("http://ex.com/story",),
                        timestamp=ts if ts is not None else 100 + i,
                        is_auto_retweet=auto)


@pytest.fixture
def retweet_group():
    """10-tweet URL group: an original plus mixed retweets and rewrites.

    Survivors after filtering: the original and the 5 genuine rewrites.
    """
    original = "Samsung halts Galaxy Note 7 production after reports of fires"
    tweets = (
        _tweet(0, original, ts=100, author="newswire"),
        # auto-retweet (dropped before the manual check)
        _tweet(1, "RT @newswire: " + original, ts=101, auto=True),
        # manual RT prefix, text copied verbatim
        _tweet(2, "RT @newswire: " + original, ts=102),
        # copy with a hashtag appended
        _tweet(3, original + " #tech", ts=103),
        # copy with trailing URL and a mention
        _tweet(4, original + " http://smn.it/x1 @friend", ts=104),
        # genuine rewrites
        _tweet(5, "Samsung suspends Note 7 production following battery fires",
               ts=105),
        _tweet(6, "Note 7 production halted by Samsung after more fires",
               ts=106),
        _tweet(7, "Samsung stops making the Galaxy Note 7", ts=107),
        # punctuation-only variant of the original
        _tweet(8, original.rstrip() + "...", ts=108),
        _tweet(9, "Breaking: Samsung pauses all Galaxy Note 7 output", ts=109),
    )
    return corpus.UrlGroup(url="http://ex.com/story", tweets=tweets,
                           seed_account="newswire")


@pytest.fixture
def toy_dataset():
    """Linearly separable labeled dataset: near-copies vs unrelated pairs."""
    pos = [
        ("the cat sat on the mat", "the cat sat on a mat"),
        ("stocks fell sharply on monday", "stocks fell hard on monday"),
        ("she finished the marathon in record time",
         "she completed the marathon in record time"),
        ("police closed the road after the crash",
         "police shut the road after the crash"),
        ("the team won the final game", "the team won the last game"),
    ]
    neg = [
        ("the cat sat on the mat", "interest rates rose again this quarter"),
        ("stocks fell sharply on monday", "the recipe calls for two eggs"),
        ("she finished the marathon in record time",
         "the museum opens at nine tomorrow"),
        ("police closed the road after the crash",
         "bananas are rich in potassium"),
        ("the team won the final game", "rain is expected late tonight"),
    ]
    pairs = []
    for rep in range(4):
        for k, (s1, s2) in enumerate(pos):
            pid = "pos-%d-%d" % (rep, k)
            pairs.append(corpus.LabeledPair(
                pair=corpus.SentencePair(pair_id=pid, s1=s1, s2=s2),
                gold=corpus.PARAPHRASE))
        for k, (s1, s2) in enumerate(neg):
            pid = "neg-%d-%d" % (rep, k)
            pairs.append(corpus.LabeledPair(
                pair=corpus.SentencePair(pair_id=pid, s1=s1, s2=s2),
                gold=corpus.NON_PARAPHRASE))
    return corpus.Dataset(name="toy", pairs=pairs)
