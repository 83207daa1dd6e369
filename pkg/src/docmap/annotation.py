"""Cluster labelling by hypergeometric keyword enrichment."""

import json
import logging
import math
from dataclasses import dataclass

from .errors import ContractError

log = logging.getLogger(__name__)

ALPHA = 0.05
LABELS_PER_CLUSTER = 5


@dataclass(frozen=True)
class EnrichedKeyword:
    text: str
    cluster: int
    k: int
    n: int
    K: int
    N: int
    p_value: float

    def to_json(self):
        return {"text": self.text, "p": self.p_value, "k": self.k, "n": self.n,
                "K": self.K, "N": self.N}


def keyword_presence(keyword_sets):
    """Map each keyword to the ids of documents whose top-k set contains it."""
    presence = {}
    seen = set()
    for ks in keyword_sets:
        if ks.doc_id in seen:
            raise ContractError(f"duplicate document id {ks.doc_id!r}")
        seen.add(ks.doc_id)
        for kw in ks.keywords:
            presence.setdefault(kw.text, set()).add(ks.doc_id)
    return presence


_LOG_FACT = [0.0]


def _log_fact(m):
    """ln(m!) via lgamma, memoised in a growing table."""
    if m >= len(_LOG_FACT):
        _LOG_FACT.extend(math.lgamma(i + 1) for i in range(len(_LOG_FACT), m + 1))
    return _LOG_FACT[m]


def _log_comb(a, b):
    return _log_fact(a) - _log_fact(b) - _log_fact(a - b)


def hypergeom_sf(k, K, n, N):
    """P(X >= k) for X ~ Hypergeometric(N population, K successes, n draws)."""
    if not (0 <= k <= n <= N and k <= K <= N):
        raise ContractError(f"invalid hypergeometric arguments k={k}, K={K}, n={n}, N={N}")
    lo = max(k, n - (N - K))
    hi = min(K, n)
    if k <= max(0, n - (N - K)):
        return 1.0
    if lo > hi:
        return 0.0
    _log_fact(N)
    lf = _LOG_FACT
    M = N - K
    const = lf[K] + lf[M] - lf[N] + lf[n] + lf[N - n]
    terms = [const - lf[i] - lf[K - i] - lf[n - i] - lf[M - n + i] for i in range(lo, hi + 1)]
    top = max(terms)
    return min(1.0, math.exp(top) * math.fsum([math.exp(t - top) for t in terms]))


def benjamini_hochberg(pvalues):
    m = len(pvalues)
    order = sorted(range(m), key=lambda i: pvalues[i])
    adjusted = [0.0] * m
    running = 1.0
    for rank in range(m, 0, -1):
        i = order[rank - 1]
        running = min(running, pvalues[i] * m / rank)
        adjusted[i] = running
    return adjusted


def label_clusters(presence, assignments, alpha=ALPHA, top_m=LABELS_PER_CLUSTER,
                   clusters=None, fdr=False):
    """Enriched keywords per cluster.

    ``assignments`` maps doc id to cluster index (negative = unassigned).
    Unassigned documents count towards the background. Labels are sorted by
    p-value, then in-cluster count (descending), then text.
    """
    if not 0.0 < alpha < 1.0:
        raise ContractError(f"alpha must be in (0, 1), got {alpha}")
    N = len(assignments)
    members = {}
    for doc_id, c in assignments.items():
        if c is not None and c >= 0:
            members.setdefault(int(c), set()).add(doc_id)
    if clusters is None:
        clusters = sorted(members)
    labels = {}
    for c in clusters:
        docs = members.get(c, set())
        if not docs:
            log.warning("cluster %s is empty; skipped", c)
            continue
        n = len(docs)
        tested = []
        for text in sorted(presence):
            ids = presence[text]
            k = len(ids & docs)
            if k == 0:
                continue
            K = len(ids)
            tested.append(EnrichedKeyword(text, c, k, n, K, N, hypergeom_sf(k, K, n, N)))
        decisive = [kw.p_value for kw in tested]
        if fdr and tested:
            decisive = benjamini_hochberg(decisive)
        chosen = [kw for kw, p in zip(tested, decisive) if p < alpha and kw.k * N >= kw.K * n]
        chosen.sort(key=lambda kw: (kw.p_value, -kw.k, kw.text))
        labels[c] = chosen[:top_m]
    return labels


def write_labels(labels, path):
    payload = [
        {"cluster": c, "labels": [kw.to_json() for kw in kws]} for c, kws in sorted(labels.items())
    ]
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(payload, fh, indent=2, ensure_ascii=False)
        fh.write("\n")


def read_labels(path):
    with open(path, encoding="utf-8") as fh:
        payload = json.load(fh)
    return {
        int(entry["cluster"]): [
            EnrichedKeyword(l["text"], int(entry["cluster"]), l["k"], l["n"], l["K"], l["N"], l["p"])
            for l in entry["labels"]
        ]
        for entry in payload
    }
