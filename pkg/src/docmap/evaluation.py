"""Precision, recall and F1 of extracted keywords against gold keywords."""

import csv
import re
import statistics
from dataclasses import dataclass, field

from .errors import ContractError, EmptyGoldError, ParseError
from .stem import stem

WORD_RE = re.compile(r"[^\W_]+")


def normalize_keyword(text):
    """Case-fold, drop punctuation, stem each word, join with single spaces."""
    return " ".join(stem(w) for w in WORD_RE.findall(text.casefold()))


def _unique_gold(gold):
    out = []
    for g in gold:
        norm = normalize_keyword(g)
        if norm and norm not in out:
            out.append(norm)
    return out


def match(predicted, gold):
    """Count predictions matching a distinct gold keyword; each gold matches once."""
    remaining = set(_unique_gold(gold))
    hits = 0
    for p in predicted:
        norm = normalize_keyword(p)
        if norm in remaining:
            remaining.discard(norm)
            hits += 1
    return hits


def _f1(p, r):
    return 0.0 if p + r == 0 else 2 * p * r / (p + r)


def prf_at_n(predicted, gold, n):
    """(precision, recall, F1) of the first ``n`` predictions.

    Precision divides by min(n, number of predictions) so short candidate
    lists are not penalised for slots they could never fill.
    """
    texts = predicted.texts if hasattr(predicted, "texts") else list(predicted)
    gold_norm = _unique_gold(gold)
    if not gold_norm:
        raise ContractError("gold keyword list is empty")
    if n < 1:
        raise ContractError("n must be >= 1")
    top = texts[:n]
    hits = match(top, gold)
    p = hits / len(top) if top else 0.0
    r = hits / len(gold_norm)
    return p, r, _f1(p, r)


@dataclass
class EvalReport:
    method: str
    rows: list = field(default_factory=list)  # (n, precision, recall, f1)
    docs_evaluated: int = 0

    def column(self, name):
        i = {"n": 0, "precision": 1, "recall": 2, "f1": 3}[name]
        return [row[i] for row in self.rows]


def evaluate(keyword_sets, corpus, k=20, f1_of_means=False):
    """Macro-averaged P/R/F1 at every n = 1..k over documents with gold keywords."""
    by_id = {}
    method = None
    for ks in keyword_sets:
        by_id[ks.doc_id] = ks
        method = method or ks.method
    docs = [d for d in corpus if d.gold_keywords and _unique_gold(d.gold_keywords)]
    if not docs:
        raise EmptyGoldError("no document has gold keywords")
    missing = [d.id for d in docs if d.id not in by_id]
    if missing:
        raise ContractError(f"no keywords for {len(missing)} gold document(s), e.g. {missing[0]}")
    rows = []
    for n in range(1, k + 1):
        scores = [prf_at_n(by_id[d.id], d.gold_keywords, n) for d in docs]
        p = statistics.fmean(s[0] for s in scores)
        r = statistics.fmean(s[1] for s in scores)
        f = _f1(p, r) if f1_of_means else statistics.fmean(s[2] for s in scores)
        rows.append((n, p, r, f))
    return EvalReport(method or "", rows, len(docs))


def write_report_csv(reports, path):
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["method", "n", "precision", "recall", "f1"])
        for rep in reports:
            for n, p, r, f in rep.rows:
                writer.writerow([rep.method, n, f"{p:.6f}", f"{r:.6f}", f"{f:.6f}"])


def write_pr_csv(reports, path):
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["method", "n", "recall", "precision"])
        for rep in reports:
            for n, p, r, _ in rep.rows:
                writer.writerow([rep.method, n, f"{r:.6f}", f"{p:.6f}"])


def read_report_csv(path):
    reports = {}
    with open(path, encoding="utf-8", newline="") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames != ["method", "n", "precision", "recall", "f1"]:
            raise ParseError(f"{path}: unexpected header {reader.fieldnames}")
        for row in reader:
            rep = reports.setdefault(row["method"], EvalReport(row["method"]))
            rep.rows.append((int(row["n"]), float(row["precision"]), float(row["recall"]),
                             float(row["f1"])))
    return list(reports.values())
