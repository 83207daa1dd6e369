"""PubMed efetch XML parsing and a rate-limited E-utilities client."""

import logging
import os
import time
import xml.etree.ElementTree as ET
from dataclasses import dataclass, field
from pathlib import Path

from .corpus import Corpus, Document
from .errors import ContractError, EmptyCorpusError, FetchError, NoResultsError, ParseError

log = logging.getLogger(__name__)

EUTILS = "https://eutils.ncbi.nlm.nih.gov/entrez/eutils"
BATCH_SIZE = 200
MAX_ATTEMPTS = 3


@dataclass
class PubMedRecord:
    pmid: str
    title: str
    abstract_sections: list = field(default_factory=list)
    author_keywords: list = field(default_factory=list)

    @property
    def abstract(self):
        return " ".join(self.abstract_sections)

    def to_document(self):
        return Document(self.pmid, self.title, self.abstract, list(self.author_keywords))


def _text(elem):
    # itertext keeps inline markup such as <i> or <sup>
    return " ".join("".join(elem.itertext()).split())


def _byte_offset(raw, line, column):
    lines = raw.split(b"\n")
    return sum(len(l) + 1 for l in lines[: line - 1]) + column


def parse_records(source):
    """Yield a PubMedRecord per PubmedArticle, in document order."""
    raw = Path(source).read_bytes()
    try:
        root = ET.fromstring(raw)
    except ET.ParseError as exc:
        line, column = exc.position
        offset = _byte_offset(raw, line, column)
        raise ParseError(f"{source}: malformed XML at byte offset {offset} ({exc})") from None
    for art in root.iter("PubmedArticle"):
        pmid_el = art.find("MedlineCitation/PMID")
        pmid = pmid_el.text.strip() if pmid_el is not None and pmid_el.text else ""
        title_el = art.find(".//Article/ArticleTitle")
        title = _text(title_el) if title_el is not None else ""
        sections = [_text(a) for a in art.findall(".//Article/Abstract/AbstractText")]
        sections = [s for s in sections if s]
        keywords = [_text(k) for k in art.findall("MedlineCitation/KeywordList/Keyword")]
        keywords = [k for k in keywords if k]
        yield PubMedRecord(pmid, title, sections, keywords)


def parse_efetch_xml(*paths) -> Corpus:
    """Build a Corpus from one or more efetch XML files.

    Articles without abstract text are skipped and tallied. MeSH headings
    are ignored; only author KeywordList entries become gold keywords.
    """
    docs = []
    skipped = 0
    seen = set()
    for path in paths:
        for rec in parse_records(path):
            if not rec.abstract_sections:
                skipped += 1
                continue
            if not rec.pmid.isdigit():
                raise ParseError(f"{path}: non-numeric PMID {rec.pmid!r}")
            if rec.pmid in seen:
                log.warning("duplicate PMID %s ignored", rec.pmid)
                continue
            seen.add(rec.pmid)
            docs.append(rec.to_document())
    if skipped:
        log.warning("skipped %d article(s) without abstract", skipped)
    if not docs:
        raise EmptyCorpusError("no articles with abstracts found")
    return Corpus(docs, skipped=skipped)


class RateLimiter:
    """Enforces a minimum spacing between calls using an injectable clock."""

    def __init__(self, per_second, clock=time.monotonic, sleep=time.sleep):
        self.interval = 1.0 / per_second
        self.clock = clock
        self.sleep = sleep
        self._last = None

    def wait(self):
        if self._last is not None:
            remaining = self._last + self.interval - self.clock()
            if remaining > 0:
                self.sleep(remaining)
        self._last = self.clock()


class EutilsClient:
    def __init__(self, api_key=None, get=None, clock=time.monotonic, sleep=time.sleep,
                 base_url=EUTILS):
        if get is None:
            import requests

            get = requests.get
        self.api_key = api_key if api_key is not None else os.environ.get("NCBI_API_KEY")
        self.get = get
        self.sleep = sleep
        self.base_url = base_url
        self.limiter = RateLimiter(10 if self.api_key else 3, clock=clock, sleep=sleep)

    def _request(self, endpoint, params):
        params = dict(params, db="pubmed")
        if self.api_key:
            params["api_key"] = self.api_key
        url = f"{self.base_url}/{endpoint}"
        last_error = None
        for attempt in range(MAX_ATTEMPTS):
            if attempt:
                self.sleep(2 ** (attempt - 1))
            self.limiter.wait()
            try:
                resp = self.get(url, params=params, timeout=60)
            except OSError as exc:
                last_error = exc
                continue
            if resp.status_code == 200:
                return resp
            last_error = f"HTTP {resp.status_code}"
        raise FetchError(f"{endpoint} failed after {MAX_ATTEMPTS} attempts: {last_error}")

    def search(self, query, max_records):
        resp = self._request("esearch.fcgi", {"term": query, "retmax": max_records,
                                              "retmode": "json"})
        ids = resp.json()["esearchresult"]["idlist"]
        return ids[:max_records]

    def efetch(self, pmids):
        resp = self._request("efetch.fcgi", {"id": ",".join(pmids), "retmode": "xml"})
        return resp.content


def fetch(query, max_records, out_dir, api_key=None, client=None):
    """Download up to ``max_records`` matching articles as batch XML files."""
    if max_records < 1:
        raise ContractError("max_records must be >= 1")
    client = client or EutilsClient(api_key=api_key)
    pmids = client.search(query, max_records)
    if not pmids:
        raise NoResultsError(f"no PubMed results for {query!r}")
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    written = []
    for index, start in enumerate(range(0, len(pmids), BATCH_SIZE)):
        xml = client.efetch(pmids[start : start + BATCH_SIZE])
        path = out / f"batch_{index}.xml"
        path.write_bytes(xml)
        written.append(path)
        log.info("wrote %s", path)
    return written
