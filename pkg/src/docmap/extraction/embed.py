"""Rank candidate phrases by cosine similarity to the document vector."""

import logging

import numpy as np

from ..corpus import candidate_phrases
from ..vectors import cosine
from .common import KeywordSet, top_k

log = logging.getLogger(__name__)

MAX_NGRAM = 3


def extract_embed(tdoc, doc_vec, store, k=20):
    if not np.any(doc_vec.vector):
        log.warning("%s: zero document vector, no embedding keywords", tdoc.doc_id)
        return KeywordSet(tdoc.doc_id, "embed", [])
    scored = []
    for cand in candidate_phrases(tdoc, MAX_NGRAM):
        vecs = [store.get(t.normalized) for t in cand.tokens]
        if any(v is None for v in vecs):
            continue
        scored.append((cand.text, cosine(np.mean(vecs, axis=0), doc_vec.vector)))
    return KeywordSet(tdoc.doc_id, "embed", top_k(scored, k, "desc"))
