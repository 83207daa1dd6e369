"""Shared keyword types and ranking helpers."""

import json
from dataclasses import dataclass, field

from ..errors import ContractError, ParseError

K_DEFAULT = 20
METHODS = ("tfidf", "yake", "rake", "textrank", "embed")


@dataclass(frozen=True)
class ScoredKeyword:
    text: str
    score: float
    rank: int = 0


@dataclass
class KeywordSet:
    doc_id: str
    method: str
    keywords: list = field(default_factory=list)

    @property
    def texts(self):
        return [kw.text for kw in self.keywords]

    def to_json(self):
        return {
            "id": self.doc_id,
            "method": self.method,
            "keywords": [
                {"text": kw.text, "score": kw.score, "rank": kw.rank} for kw in self.keywords
            ],
        }


def top_k(scored, k, better="desc"):
    """Sort ``(text, score)`` pairs best-first, break ties by text, keep ``k``.

    ``better`` is ``"desc"`` when higher scores are better, ``"asc"`` otherwise.
    """
    if k < 1:
        raise ContractError(f"k must be >= 1, got {k}")
    pairs = [(kw.text, kw.score) if isinstance(kw, ScoredKeyword) else kw for kw in scored]
    if better == "desc":
        pairs.sort(key=lambda p: (-p[1], p[0]))
    elif better == "asc":
        pairs.sort(key=lambda p: (p[1], p[0]))
    else:
        raise ContractError(f"unknown ordering {better!r}")
    return [ScoredKeyword(t, float(s), r) for r, (t, s) in enumerate(pairs[:k], start=1)]


def write_keywords(keyword_sets, path):
    with open(path, "w", encoding="utf-8") as fh:
        for ks in keyword_sets:
            fh.write(json.dumps(ks.to_json(), ensure_ascii=False) + "\n")


def read_keywords(path):
    out = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                obj = json.loads(line)
                kws = [ScoredKeyword(k["text"], float(k["score"]), int(k["rank"]))
                       for k in obj["keywords"]]
                out.append(KeywordSet(str(obj["id"]), obj["method"], kws))
            except (json.JSONDecodeError, KeyError, TypeError) as exc:
                raise ParseError(f"{path}: line {lineno}: bad keyword record ({exc})") from None
    return out
