"""Pretrained word vectors (textual .vec format) and document averaging."""

import logging
from dataclasses import dataclass

import numpy as np

from .errors import ContractError, ParseError

log = logging.getLogger(__name__)


class WordVectorStore:
    def __init__(self, words, matrix):
        matrix = np.asarray(matrix, dtype=float)
        if matrix.ndim != 2 or matrix.shape[1] < 1:
            raise ContractError("vector matrix must be 2-D with dim >= 1")
        if len(words) != matrix.shape[0]:
            raise ContractError("word count does not match matrix rows")
        self.words = list(words)
        self.matrix = matrix
        self.index = {w: i for i, w in enumerate(self.words)}
        self.duplicates = 0

    @property
    def dim(self):
        return self.matrix.shape[1]

    def __len__(self):
        return len(self.words)

    def __contains__(self, word):
        return word in self.index

    def get(self, word):
        i = self.index.get(word)
        return None if i is None else self.matrix[i]

    def scaled(self, c):
        return WordVectorStore(self.words, self.matrix * c)


def load_vec(path, limit=None) -> WordVectorStore:
    """Load a ``<count> <dim>`` headed text vector file.

    Words are case-folded on load; on collision the first row wins.
    """
    words, rows = [], []
    seen = set()
    duplicates = 0
    with open(path, encoding="utf-8") as fh:
        header = fh.readline().split()
        if len(header) != 2 or not all(h.isdigit() for h in header):
            raise ParseError(f"{path}: line 1: expected '<count> <dim>' header")
        dim = int(header[1])
        if dim < 1:
            raise ParseError(f"{path}: line 1: dim must be >= 1")
        for lineno, line in enumerate(fh, start=2):
            if limit is not None and len(words) >= limit:
                break
            parts = line.rstrip("\n").rstrip(" ").split(" ")
            if len(parts) == 1 and not parts[0]:
                continue
            if len(parts) != dim + 1:
                raise ParseError(
                    f"{path}: line {lineno}: expected {dim} values, got {len(parts) - 1}"
                )
            word = parts[0].casefold()
            if word in seen:
                duplicates += 1
                continue
            try:
                vec = [float(v) for v in parts[1:]]
            except ValueError:
                raise ParseError(f"{path}: line {lineno}: non-numeric value") from None
            seen.add(word)
            words.append(word)
            rows.append(vec)
    if not words:
        raise ParseError(f"{path}: no vectors found")
    if duplicates:
        log.warning("%s: %d duplicate word(s) ignored", path, duplicates)
    store = WordVectorStore(words, np.array(rows))
    store.duplicates = duplicates
    return store


def save_vec(store, path):
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(f"{len(store)} {store.dim}\n")
        for w, row in zip(store.words, store.matrix):
            fh.write(w + " " + " ".join(repr(float(v)) for v in row) + "\n")


@dataclass(frozen=True)
class DocVector:
    doc_id: str
    vector: np.ndarray
    oov_fraction: float


def doc_vector(tdoc, store) -> DocVector:
    """Mean word vector over in-vocabulary, non-stopword token occurrences."""
    total = 0
    rows = []
    for tok in tdoc.tokens:
        if tok.is_stopword:
            continue
        total += 1
        i = store.index.get(tok.normalized)
        if i is not None:
            rows.append(i)
    if not rows:
        return DocVector(tdoc.doc_id, np.zeros(store.dim), 1.0)
    vec = store.matrix[rows].mean(axis=0)
    return DocVector(tdoc.doc_id, vec, 1.0 - len(rows) / total)


def cosine(u, v) -> float:
    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)
    if u.shape != v.shape:
        raise ContractError(f"length mismatch: {u.shape} vs {v.shape}")
    nu = np.linalg.norm(u)
    nv = np.linalg.norm(v)
    if nu == 0 or nv == 0:
        return 0.0
    return float(np.clip(u @ v / (nu * nv), -1.0, 1.0))


def write_doc_vectors(doc_vectors, path):
    """TSV: ``doc_id, oov_fraction, v1..vd``; floats in repr form."""
    with open(path, "w", encoding="utf-8") as fh:
        for dv in doc_vectors:
            vals = "\t".join(repr(float(x)) for x in dv.vector)
            fh.write(f"{dv.doc_id}\t{dv.oov_fraction!r}\t{vals}\n")


def read_doc_vectors(path):
    out = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            parts = line.rstrip("\n").split("\t")
            if len(parts) < 3:
                raise ParseError(f"{path}: line {lineno}: too few columns")
            out.append(DocVector(parts[0], np.array([float(x) for x in parts[2:]]),
                                 float(parts[1])))
    return out
