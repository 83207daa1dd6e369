"""Unsupervised keyword extractors."""

from .common import K_DEFAULT, METHODS, KeywordSet, ScoredKeyword, read_keywords, top_k, write_keywords
from .embed import extract_embed
from .rake import extract_rake
from .textrank import extract_textrank
from .tfidf import document_frequencies, extract_tfidf
from .yake import extract_yake

__all__ = [
    "K_DEFAULT", "METHODS", "KeywordSet", "ScoredKeyword", "read_keywords", "top_k",
    "write_keywords", "extract_embed", "extract_rake", "extract_textrank",
    "document_frequencies", "extract_tfidf", "extract_yake", "extract_corpus",
]


def extract_corpus(method, tdocs, k=K_DEFAULT, doc_vectors=None, store=None,
                   rake_metric="degree_over_freq", threads=1):
    """Run one extractor over every tokenized document, preserving order."""
    from ..errors import ConfigError

    if method not in METHODS:
        raise ConfigError(f"unknown method {method!r}; choose from {', '.join(METHODS)}")
    if method == "tfidf":
        df = document_frequencies(tdocs)
        fn = lambda i: extract_tfidf(tdocs[i], df, len(tdocs), k)
    elif method == "yake":
        fn = lambda i: extract_yake(tdocs[i], k)
    elif method == "rake":
        fn = lambda i: extract_rake(tdocs[i], k, rake_metric)
    elif method == "textrank":
        fn = lambda i: extract_textrank(tdocs[i], k)
    else:
        if doc_vectors is None or store is None:
            raise ConfigError("embed method needs document vectors and a word vector store")
        fn = lambda i: extract_embed(tdocs[i], doc_vectors[i], store, k)
    if threads == 1 or len(tdocs) < 2:
        return [fn(i) for i in range(len(tdocs))]
    from concurrent.futures import ThreadPoolExecutor

    with ThreadPoolExecutor(max_workers=threads or None) as pool:
        return list(pool.map(fn, range(len(tdocs))))
