"""Phrasal paraphrase pipeline: monolingual alignment, consistency-based
phrase extraction, phrase-table statistics, an n-gram language model and
ranking of extracted phrase pairs."""

from .align import Alignment, align
from .table import (PhrasePair, PhraseTable, build_phrase_table,
                    extract_phrases, load_phrase_table, save_phrase_table,
                    table_overlap, word_links)
from .lm import NgramLM, load_arpa, save_arpa
from .rank import (RankModel, embedding_phrase_score, evaluate_likert,
                   lm_substitution_score, rank_score, train_rank)

__all__ = [
    "Alignment", "align", "PhrasePair", "PhraseTable", "build_phrase_table",
    "extract_phrases", "load_phrase_table", "save_phrase_table",
    "table_overlap", "word_links", "NgramLM", "load_arpa", "save_arpa",
    "RankModel",
    "embedding_phrase_score", "evaluate_likert", "lm_substitution_score",
    "rank_score", "train_rank",
]
