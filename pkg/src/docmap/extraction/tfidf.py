"""TF-IDF over stopword-free unigrams and bigrams."""

import math
from collections import Counter

from ..corpus import candidate_phrases
from ..errors import ContractError
from .common import KeywordSet, top_k

MAX_NGRAM = 2


def document_frequencies(tdocs):
    df = Counter()
    for tdoc in tdocs:
        df.update({c.text for c in candidate_phrases(tdoc, MAX_NGRAM)})
    return df


def extract_tfidf(tdoc, corpus_df, N, k=20):
    """Score each candidate by raw tf times ln(N / df); higher is better."""
    if N <= 0:
        raise ContractError("corpus size N must be positive")
    scored = []
    for cand in candidate_phrases(tdoc, MAX_NGRAM):
        df = corpus_df.get(cand.text, 0)
        if df <= 0:
            raise ContractError(f"candidate {cand.text!r} missing from document frequencies")
        scored.append((cand.text, cand.doc_frequency * math.log(N / df)))
    return KeywordSet(tdoc.doc_id, "tfidf", top_k(scored, k, "desc"))
