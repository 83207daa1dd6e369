"""RAKE: word scores from a within-phrase co-occurrence graph."""

from collections import Counter

from ..corpus import content_runs
from ..errors import ConfigError
from .common import KeywordSet, top_k

METRICS = ("degree_over_freq", "freq", "degree")


def word_scores(phrases, metric="degree_over_freq"):
    if metric not in METRICS:
        raise ConfigError(f"unknown RAKE metric {metric!r}; choose from {', '.join(METRICS)}")
    freq = Counter()
    degree = Counter()
    for phrase in phrases:
        for word in phrase:
            freq[word] += 1
            degree[word] += len(phrase)
    if metric == "freq":
        return {w: float(freq[w]) for w in freq}
    if metric == "degree":
        return {w: float(degree[w]) for w in degree}
    return {w: degree[w] / freq[w] for w in freq}


def extract_rake(tdoc, k=20, metric="degree_over_freq"):
    phrases = [[t.normalized for t in run] for run in content_runs(tdoc)]
    scores = word_scores(phrases, metric)
    candidates = {}
    for phrase in phrases:
        text = " ".join(phrase)
        if text not in candidates:
            candidates[text] = sum(scores[w] for w in phrase)
    return KeywordSet(tdoc.doc_id, "rake", top_k(candidates.items(), k, "desc"))
