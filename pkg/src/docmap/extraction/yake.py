"""YAKE!: single-document keyword scoring from statistical term features.

Lower scores are better. Candidates are stopword-free n-grams (n <= 3);
stopwords still take part in term statistics and as context neighbours.
"""

import math
import statistics
from dataclasses import dataclass

from ..corpus import candidate_phrases
from .common import KeywordSet, top_k

WINDOW = 1
MAX_NGRAM = 3
DEDUP_THRESHOLD = 0.9


@dataclass(frozen=True)
class TermFeatures:
    tf: int
    casing: float
    position: float
    frequency: float
    relatedness: float
    dispersion: float
    score: float


def levenshtein(a, b):
    if len(a) < len(b):
        a, b = b, a
    prev = list(range(len(b) + 1))
    for i, ca in enumerate(a, start=1):
        cur = [i]
        for j, cb in enumerate(b, start=1):
            cur.append(min(prev[j] + 1, cur[j - 1] + 1, prev[j - 1] + (ca != cb)))
        prev = cur
    return prev[-1]


def similarity(a, b):
    longest = max(len(a), len(b))
    return 1.0 if longest == 0 else 1.0 - levenshtein(a, b) / longest


def _blocks(tdoc):
    # Context windows never cross punctuation or sentence boundaries.
    for sent in tdoc.sentences:
        block = []
        for tok in sent:
            if tok.after_break and block:
                yield block
                block = []
            block.append(tok)
        if block:
            yield block


def term_features(tdoc, window=WINDOW):
    """Feature table for every term (stopwords included) of ``tdoc``."""
    tf, upper, acronym = {}, {}, {}
    sentences = {}
    stop = {}
    left, right = {}, {}
    for sent in tdoc.sentences:
        for i, tok in enumerate(sent):
            w = tok.normalized
            tf[w] = tf.get(w, 0) + 1
            stop[w] = tok.is_stopword
            sentences.setdefault(w, set()).add(tok.sentence_index)
            if len(tok.surface) > 1 and tok.surface.isupper():
                acronym[w] = acronym.get(w, 0) + 1
            elif tok.surface[:1].isupper() and i > 0:
                upper[w] = upper.get(w, 0) + 1
    for block in _blocks(tdoc):
        for i, tok in enumerate(block):
            for prev in block[max(0, i - window) : i]:
                right.setdefault(prev.normalized, {}).setdefault(tok.normalized, 0)
                right[prev.normalized][tok.normalized] += 1
                left.setdefault(tok.normalized, {}).setdefault(prev.normalized, 0)
                left[tok.normalized][prev.normalized] += 1
    if not tf:
        return {}
    content_tf = [c for w, c in tf.items() if not stop[w]] or list(tf.values())
    mean_tf = statistics.fmean(content_tf)
    std_tf = statistics.pstdev(content_tf)
    max_tf = max(tf.values())
    n_sent = len(tdoc.sentences)

    def spread(neigh):
        total = sum(neigh.values())
        return len(neigh) / total if total else 0.0

    table = {}
    for w, count in tf.items():
        casing = max(upper.get(w, 0), acronym.get(w, 0)) / (1.0 + math.log(count))
        position = math.log(math.log(3.0 + statistics.median(sorted(sentences[w]))))
        frequency = count / (mean_tf + std_tf)
        relatedness = 1.0 + (spread(left.get(w, {})) + spread(right.get(w, {}))) * count / max_tf
        dispersion = len(sentences[w]) / n_sent
        score = (position * relatedness) / (
            casing + frequency / relatedness + dispersion / relatedness
        )
        table[w] = TermFeatures(count, casing, position, frequency, relatedness, dispersion, score)
    return table


def score_candidates(tdoc):
    table = term_features(tdoc)
    scored = []
    for cand in candidate_phrases(tdoc, MAX_NGRAM):
        hs = [table[t.normalized].score for t in cand.tokens]
        scored.append((cand.text, math.prod(hs) / (cand.doc_frequency * (1.0 + sum(hs)))))
    return scored


def deduplicate(ranked, k, threshold=DEDUP_THRESHOLD):
    """Walk best-first; drop anything too similar to an already kept phrase."""
    kept = []
    for text, score in ranked:
        if all(similarity(text, other) < threshold for other, _ in kept):
            kept.append((text, score))
            if len(kept) == k:
                break
    return kept


def extract_yake(tdoc, k=20):
    scored = score_candidates(tdoc)
    if not scored:
        return KeywordSet(tdoc.doc_id, "yake", [])
    ranked = [(kw.text, kw.score) for kw in top_k(scored, len(scored), "asc")]
    return KeywordSet(tdoc.doc_id, "yake", top_k(deduplicate(ranked, k), k, "asc"))
