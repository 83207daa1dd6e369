"""TextRank: PageRank over a word co-occurrence graph."""

import math

import numpy as np

from ..corpus import content_runs
from .common import KeywordSet, top_k

WINDOW = 2
DAMPING = 0.85
TOL = 1e-6
MAX_ITER = 100


def cooccurrence_graph(tdoc, window=WINDOW):
    """Undirected edges between content words at most ``window - 1`` apart.

    Distance is measured in the stopword-filtered word sequence of each
    sentence. Returns (sorted node list, set of index pairs).
    """
    sequences = [[t.normalized for t in sent if not t.is_stopword] for sent in tdoc.sentences]
    nodes = sorted({w for seq in sequences for w in seq})
    index = {w: i for i, w in enumerate(nodes)}
    edges = set()
    for seq in sequences:
        for i, w in enumerate(seq):
            for other in seq[i + 1 : i + window]:
                if other != w:
                    a, b = sorted((index[w], index[other]))
                    edges.add((a, b))
    return nodes, edges


def pagerank(n, edges, damping=DAMPING, tol=TOL, max_iter=MAX_ITER):
    """PageRank of an undirected graph; dangling mass is spread uniformly."""
    if n == 0:
        return np.zeros(0)
    A = np.zeros((n, n))
    for a, b in edges:
        A[a, b] = A[b, a] = 1.0
    deg = A.sum(axis=1)
    dangling = deg == 0
    T = np.divide(A, deg[:, None], out=np.zeros_like(A), where=~dangling[:, None])
    pr = np.full(n, 1.0 / n)
    for _ in range(max_iter):
        new = (1.0 - damping) / n + damping * (T.T @ pr + pr[dangling].sum() / n)
        delta = np.abs(new - pr).sum()
        pr = new
        if delta < tol:
            break
    return pr


def extract_textrank(tdoc, k=20):
    nodes, edges = cooccurrence_graph(tdoc)
    if not nodes:
        return KeywordSet(tdoc.doc_id, "textrank", [])
    ranks = dict(zip(nodes, pagerank(len(nodes), edges)))
    n_select = math.ceil(len(nodes) / 3)
    selected = {text for text, _ in sorted(ranks.items(), key=lambda p: (-p[1], p[0]))[:n_select]}
    phrases = {}
    for run in content_runs(tdoc):
        current = []
        for tok in run + [None]:
            if tok is not None and tok.normalized in selected:
                current.append(tok.normalized)
                continue
            if current:
                text = " ".join(current)
                phrases.setdefault(text, sum(ranks[w] for w in current))
            current = []
    return KeywordSet(tdoc.doc_id, "textrank", top_k(phrases.items(), k, "desc"))
