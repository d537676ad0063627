"""Paraphrase mining toolkit for URL-linked short-text posts.

Subpackages cover the full pipeline: corpus ingestion and pairing,
tweet-aware text normalization, surface metrics, short-text embeddings
via weighted matrix factorization, paraphrase identification models,
phrasal paraphrase extraction/ranking, and a crowd annotation service.
"""

__version__ = "0.1.0"
