"""End-to-end orchestration: corpus in, annotated map and reports out."""

import hashlib
import json
import logging
from contextlib import contextmanager
from pathlib import Path

import numpy as np

from . import annotation, clustering, evaluation, projection, render
from .corpus import Corpus, default_stopwords, load_jsonl, load_stopwords, tokenize
from .errors import DocmapError, StageError
from .extraction import extract_corpus, write_keywords
from .pubmed import parse_efetch_xml
from .vectors import doc_vector, load_vec, write_doc_vectors

log = logging.getLogger(__name__)

MANIFEST = "manifest.json"


@contextmanager
def stage(name):
    log.info("stage %s", name)
    try:
        yield
    except StageError:
        raise
    except (DocmapError, OSError, ValueError, ArithmeticError) as exc:
        raise StageError(name, exc) from exc


def load_corpus(path) -> Corpus:
    """JSONL corpus file, efetch XML file, or a directory of XML batches."""
    path = Path(path)
    if path.is_dir():
        return parse_efetch_xml(*sorted(path.glob("*.xml")))
    if path.suffix.lower() == ".xml":
        return parse_efetch_xml(path)
    return load_jsonl(path)


def resolve_perplexity(perplexity, n):
    if perplexity < n:
        return perplexity
    reduced = max((n - 1) / 3.0, 1.0 + 1e-3)
    log.warning("perplexity %.3g too large for %d documents; using %.3g", perplexity, n, reduced)
    return reduced


def sha256_file(path):
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 16), b""):
            h.update(chunk)
    return h.hexdigest()


def write_manifest(out_dir, config, artifacts, extra=None):
    payload = {
        "config": config.to_json(),
        "artifacts": [{"name": name, "sha256": sha256_file(out_dir / name)} for name in artifacts],
    }
    if extra:
        payload.update(extra)
    with open(out_dir / MANIFEST, "w", encoding="utf-8") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return payload


def verify_manifest(out_dir):
    """Names of artifacts whose current hash differs from the manifest."""
    out_dir = Path(out_dir)
    with open(out_dir / MANIFEST, encoding="utf-8") as fh:
        manifest = json.load(fh)
    return [a["name"] for a in manifest["artifacts"]
            if not (out_dir / a["name"]).exists() or sha256_file(out_dir / a["name"]) != a["sha256"]]


def run_pipeline(config):
    """Run every stage; returns the output directory path."""
    config.validate()
    out = Path(config.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    artifacts = []
    tsne_seed, gmm_seed = config.sub_seeds()

    with open(out / "config.json", "w", encoding="utf-8") as fh:
        json.dump(config.to_json(), fh, indent=2, sort_keys=True)
        fh.write("\n")
    artifacts.append("config.json")

    with stage("ingest"):
        corpus = load_corpus(config.corpus)
        stopwords = load_stopwords(config.stopwords) if config.stopwords else default_stopwords()
        tdocs = [tokenize(doc, stopwords) for doc in corpus]
        ids = corpus.ids

    with stage("vectors"):
        store = load_vec(config.vectors, limit=config.vectors_limit)
        doc_vecs = [doc_vector(td, store) for td in tdocs]
        zero = sum(1 for dv in doc_vecs if not np.any(dv.vector))
        if zero:
            log.warning("%d document(s) have no in-vocabulary words (zero vectors)", zero)
        write_doc_vectors(doc_vecs, out / "doc_vectors.tsv")
        artifacts.append("doc_vectors.tsv")

    with stage("project"):
        X = np.array([dv.vector for dv in doc_vecs])
        proj = projection.tsne(
            X,
            perplexity=resolve_perplexity(config.perplexity, len(X)),
            iterations=config.tsne_iterations,
            learning_rate=config.learning_rate,
            seed=tsne_seed,
        )
        projection.write_projection(ids, proj.coords, out / "projection.tsv")
        artifacts.append("projection.tsv")

    with stage("cluster"):
        K = min(config.K_clusters, len(ids))
        model = clustering.fit_gmm(proj.coords, K, seed=gmm_seed,
                                   threshold=config.assign_threshold)
        projection.write_projection(ids, proj.coords, out / "clusters.tsv", model.assignments)
        clustering.write_model(model, out / "gmm.json")
        populated = set(model.assignments[model.assignments >= 0].tolist())
        if len(populated) >= 2:
            exemplars = clustering.silhouette_exemplars(
                proj.coords, model.assignments, config.exemplars_per_cluster, ids)
        else:
            log.warning("fewer than two populated clusters; no exemplars")
            exemplars = {}
        clustering.write_exemplars(exemplars, out / "exemplars.json")
        artifacts += ["clusters.tsv", "gmm.json", "exemplars.json"]

    keyword_cache = {}

    def keywords_for(method):
        if method not in keyword_cache:
            keyword_cache[method] = extract_corpus(
                method, tdocs, config.k_keywords, doc_vectors=doc_vecs, store=store,
                rake_metric=config.rake_metric, threads=config.threads)
        return keyword_cache[method]

    with stage("keywords"):
        write_keywords(keywords_for(config.method), out / "keywords.jsonl")
        artifacts.append("keywords.jsonl")

    with stage("annotate"):
        presence = annotation.keyword_presence(keywords_for(config.method))
        assignments = dict(zip(ids, model.assignments.tolist()))
        labels = annotation.label_clusters(
            presence, assignments, config.alpha, config.labels_per_cluster,
            clusters=sorted(populated), fdr=config.fdr)
        annotation.write_labels(labels, out / "labels.json")
        artifacts.append("labels.json")

    with stage("render-map"):
        scene = render.MapScene(
            points=[(float(x), float(y), int(c)) for (x, y), c in zip(proj.coords, model.assignments)],
            labels={c: [kw.text for kw in kws] for c, kws in labels.items()},
            anchors={c: tuple(model.means[c]) for c in sorted(populated)},
        )
        render.render_map(scene, out / "map.svg")
        artifacts.append("map.svg")

    if corpus.stats["with_gold"]:
        with stage("evaluate"):
            reports = [evaluation.evaluate(keywords_for(m), corpus, config.k_keywords,
                                           config.f1_of_means)
                       for m in config.eval_methods]
            evaluation.write_report_csv(reports, out / "eval.csv")
            evaluation.write_pr_csv(reports, out / "pr_curve.csv")
            artifacts += ["eval.csv", "pr_curve.csv"]
        with stage("render-curves"):
            render.render_curves(reports, out / "curves.svg")
            artifacts.append("curves.svg")
    else:
        log.warning("corpus has no gold keywords; evaluation skipped")

    stats = corpus.stats
    write_manifest(out, config, artifacts, {
        "corpus": {**stats, "skipped": corpus.skipped},
        "projection": {"final_kl": round(proj.final_kl, 9)},
        "clusters": {"K": model.K, "unassigned": int((model.assignments < 0).sum())},
    })
    return out
