"""Corpus ingestion, tokenization and candidate-phrase generation."""

import json
import logging
import re
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

from .errors import ContractError, ParseError
from .stem import stem

log = logging.getLogger(__name__)

# Letters/digits with internal hyphens; "_" is excluded from \w on purpose.
TOKEN_RE = re.compile(r"[^\W_]+(?:-[^\W_]+)*")
SENTENCE_END_RE = re.compile(r"(?<=[.!?])\s+")


@dataclass(frozen=True)
class Document:
    id: str
    title: str
    abstract: str
    gold_keywords: list | None = None

    def to_json(self):
        out = {"id": self.id, "title": self.title, "abstract": self.abstract}
        if self.gold_keywords is not None:
            out["keywords"] = list(self.gold_keywords)
        return out


@dataclass
class Corpus:
    documents: list = field(default_factory=list)
    skipped: int = 0

    def __post_init__(self):
        seen = set()
        for doc in self.documents:
            if not doc.id:
                raise ContractError("document id must be non-empty")
            if doc.id in seen:
                raise ContractError(f"duplicate document id {doc.id!r}")
            seen.add(doc.id)

    def __len__(self):
        return len(self.documents)

    def __iter__(self):
        return iter(self.documents)

    @property
    def ids(self):
        return [d.id for d in self.documents]

    @property
    def stats(self):
        with_gold = [d for d in self.documents if d.gold_keywords]
        n_kw = sum(len(d.gold_keywords) for d in with_gold)
        return {
            "documents": len(self.documents),
            "with_gold": len(with_gold),
            "mean_gold": n_kw / len(with_gold) if with_gold else 0.0,
        }


@dataclass(frozen=True)
class Token:
    surface: str
    normalized: str
    stem: str
    is_stopword: bool
    sentence_index: int
    position_in_doc: int
    # True when punctuation (not just whitespace) separates this token from
    # the previous one in the same sentence.
    after_break: bool = False


@dataclass(frozen=True)
class TokenizedDoc:
    doc_id: str
    sentences: list

    @property
    def tokens(self):
        return [t for sent in self.sentences for t in sent]


@dataclass(frozen=True)
class CandidatePhrase:
    tokens: tuple
    text: str
    doc_frequency: int


def default_stopwords():
    text = resources.files("docmap").joinpath("data/stopwords.txt").read_text("utf-8")
    return frozenset(w.strip() for w in text.splitlines() if w.strip())


def load_stopwords(path):
    with open(path, encoding="utf-8") as fh:
        words = frozenset(line.strip().casefold() for line in fh if line.strip())
    return words


def _document_from_obj(obj, lineno):
    if not isinstance(obj, dict):
        raise ParseError(f"line {lineno}: expected a JSON object")
    try:
        doc_id = str(obj["id"])
        abstract = obj["abstract"]
    except KeyError as exc:
        raise ParseError(f"line {lineno}: missing key {exc.args[0]!r}") from None
    if not isinstance(abstract, str):
        raise ParseError(f"line {lineno}: abstract must be a string")
    keywords = obj.get("keywords")
    if keywords is not None:
        if not isinstance(keywords, list) or not all(isinstance(k, str) for k in keywords):
            raise ParseError(f"line {lineno}: keywords must be a list of strings")
    return Document(doc_id, str(obj.get("title", "")), abstract, keywords)


def load_jsonl(path) -> Corpus:
    """Read a corpus JSONL file, skipping documents with blank abstracts."""
    docs = []
    skipped = 0
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as exc:
                raise ParseError(f"line {lineno}: malformed JSON ({exc.msg})") from None
            doc = _document_from_obj(obj, lineno)
            if not doc.abstract.strip():
                skipped += 1
                continue
            docs.append(doc)
    if skipped:
        log.warning("%s: skipped %d document(s) with empty abstract", path, skipped)
    return Corpus(docs, skipped=skipped)


def dump_jsonl(corpus, path):
    with open(path, "w", encoding="utf-8") as fh:
        for doc in corpus:
            fh.write(json.dumps(doc.to_json(), ensure_ascii=False) + "\n")


def split_sentences(text):
    return [s for s in SENTENCE_END_RE.split(text.strip()) if s]


def tokenize(doc, stopwords=None) -> TokenizedDoc:
    """Split ``doc.abstract`` into sentences of annotated tokens."""
    if stopwords is None:
        stopwords = default_stopwords()
    sentences = []
    position = 0
    for sentence_text in split_sentences(doc.abstract):
        sent = []
        prev_end = None
        for m in TOKEN_RE.finditer(sentence_text):
            gap = sentence_text[prev_end : m.start()] if prev_end is not None else ""
            norm = m.group().casefold()
            sent.append(
                Token(
                    surface=m.group(),
                    normalized=norm,
                    stem=stem(norm),
                    is_stopword=norm in stopwords,
                    sentence_index=len(sentences),
                    position_in_doc=position,
                    after_break=bool(gap.strip()),
                )
            )
            position += 1
            prev_end = m.end()
        if sent:
            sentences.append(sent)
    return TokenizedDoc(doc.id, sentences)


def content_runs(tdoc):
    """Maximal runs of adjacent non-stopword tokens, split at punctuation."""
    runs = []
    for sent in tdoc.sentences:
        run = []
        for tok in sent:
            if tok.is_stopword or tok.after_break:
                if run:
                    runs.append(run)
                run = []
            if not tok.is_stopword:
                run.append(tok)
        if run:
            runs.append(run)
    return runs


def candidate_phrases(tdoc, max_len=3):
    """All stopword-free n-grams (n <= max_len) not crossing punctuation.

    Results are deduplicated by normalized text, in order of first
    occurrence, with per-document frequency accumulated.
    """
    if not 1 <= max_len <= 3:
        raise ContractError(f"max_len must be in [1, 3], got {max_len}")
    counts = {}
    first = {}
    for run in content_runs(tdoc):
        for n in range(1, max_len + 1):
            for i in range(len(run) - n + 1):
                gram = tuple(run[i : i + n])
                text = " ".join(t.normalized for t in gram)
                counts[text] = counts.get(text, 0) + 1
                first.setdefault(text, gram)
    return [CandidatePhrase(first[t], t, c) for t, c in counts.items()]
