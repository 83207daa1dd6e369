"""``docmap`` command-line interface."""

import argparse
import json
import logging
import sys
from pathlib import Path

import numpy as np

from . import annotation, clustering, evaluation, projection, pubmed, render
from .config import parse_config
from .corpus import default_stopwords, dump_jsonl, load_stopwords, tokenize
from .errors import ConfigError, DocmapError
from .extraction import METHODS, extract_corpus, read_keywords, write_keywords
from .extraction.rake import METRICS
from .pipeline import load_corpus, resolve_perplexity, run_pipeline
from .vectors import doc_vector, load_vec, read_doc_vectors, write_doc_vectors

log = logging.getLogger("docmap")


def _stopwords(args):
    return load_stopwords(args.stopwords) if args.stopwords else default_stopwords()


def cmd_fetch(args):
    files = pubmed.fetch(args.query, args.max, args.out, api_key=args.api_key)
    print(f"wrote {len(files)} batch file(s) to {args.out}")


def cmd_ingest(args):
    paths = [Path(p) for p in args.input]
    xml = [p for p in paths if p.is_dir() or p.suffix.lower() == ".xml"]
    if xml and len(xml) == len(paths):
        files = []
        for p in paths:
            files += sorted(p.glob("*.xml")) if p.is_dir() else [p]
        corpus = pubmed.parse_efetch_xml(*files)
    elif len(paths) == 1:
        corpus = load_corpus(paths[0])
    else:
        raise ConfigError("pass either one JSONL file or XML files/directories")
    dump_jsonl(corpus, args.out)
    stats = corpus.stats
    print(f"{stats['documents']} documents ({stats['with_gold']} with gold keywords, "
          f"mean {stats['mean_gold']:.1f}); skipped {corpus.skipped}")


def cmd_vectors(args):
    corpus = load_corpus(args.corpus)
    store = load_vec(args.vectors, limit=args.limit)
    sw = _stopwords(args)
    vecs = [doc_vector(tokenize(d, sw), store) for d in corpus]
    write_doc_vectors(vecs, args.out)


def cmd_project(args):
    vecs = read_doc_vectors(args.doc_vectors)
    X = np.array([v.vector for v in vecs])
    proj = projection.tsne(X, resolve_perplexity(args.perplexity, len(X)), args.iterations,
                           args.learning_rate, args.seed)
    projection.write_projection([v.doc_id for v in vecs], proj.coords, args.out)
    print(f"final KL {proj.final_kl:.6f}")


def cmd_cluster(args):
    ids, coords, _ = projection.read_projection(args.projection)
    model = clustering.fit_gmm(coords, args.K, seed=args.seed, threshold=args.threshold)
    projection.write_projection(ids, coords, args.out, model.assignments)
    if args.model:
        clustering.write_model(model, args.model)
    if args.exemplars:
        ex = clustering.silhouette_exemplars(coords, model.assignments, args.top_m, ids)
        clustering.write_exemplars(ex, args.exemplars)


def cmd_keywords(args):
    corpus = load_corpus(args.corpus)
    sw = _stopwords(args)
    tdocs = [tokenize(d, sw) for d in corpus]
    store = doc_vecs = None
    if args.method == "embed":
        if not args.vectors:
            raise ConfigError("--vectors is required for --method embed")
        store = load_vec(args.vectors, limit=args.limit)
        doc_vecs = [doc_vector(td, store) for td in tdocs]
    sets = extract_corpus(args.method, tdocs, args.k, doc_vectors=doc_vecs, store=store,
                          rake_metric=args.rake_metric, threads=args.threads)
    write_keywords(sets, args.out)


def cmd_annotate(args):
    sets = read_keywords(args.keywords)
    ids, _, clusters = projection.read_projection(args.clusters)
    if clusters is None:
        raise ConfigError(f"{args.clusters} has no cluster column")
    presence = annotation.keyword_presence(sets)
    labels = annotation.label_clusters(presence, dict(zip(ids, clusters.tolist())),
                                       args.alpha, args.top_m, fdr=args.fdr)
    annotation.write_labels(labels, args.out)


def cmd_evaluate(args):
    corpus = load_corpus(args.corpus)
    reports = [evaluation.evaluate(read_keywords(p), corpus, args.k, args.f1_of_means)
               for p in args.keywords]
    evaluation.write_report_csv(reports, args.out)
    if args.pr_out:
        evaluation.write_pr_csv(reports, args.pr_out)


def cmd_render_map(args):
    ids, coords, clusters = projection.read_projection(args.clusters)
    if clusters is None:
        clusters = np.full(len(ids), -1)
    labels = annotation.read_labels(args.labels) if args.labels else {}
    populated = sorted(set(clusters[clusters >= 0].tolist()))
    if args.model:
        means = clustering.read_model_means(args.model)
        anchors = {c: tuple(means[c]) for c in populated}
    else:
        anchors = {c: tuple(coords[clusters == c].mean(axis=0)) for c in populated}
    scene = render.MapScene(
        points=[(float(x), float(y), int(c)) for (x, y), c in zip(coords, clusters)],
        labels={c: [kw.text for kw in kws] for c, kws in labels.items()},
        anchors=anchors,
        width=args.width,
        height=args.height,
    )
    render.render_map(scene, args.out)


def cmd_render_curves(args):
    reports = evaluation.read_report_csv(args.eval)
    if args.methods:
        wanted = args.methods.split(",")
        reports = [r for r in reports if r.method in wanted]
    render.render_curves(reports, args.out)


def cmd_pipeline(args):
    overrides = {
        "corpus": args.corpus,
        "vectors": args.vectors,
        "output_dir": args.out,
        "k_keywords": args.k,
        "method": args.method,
        "K_clusters": args.K,
        "seed": args.seed,
        "threads": args.threads,
        "alpha": args.alpha,
        "assign_threshold": args.threshold,
        "perplexity": args.perplexity,
        "tsne_iterations": args.iterations,
        "fdr": True if args.fdr else None,
    }
    cfg = parse_config(args.config, overrides)
    if not cfg.corpus or not cfg.vectors:
        raise ConfigError("corpus and vectors paths are required")
    out = run_pipeline(cfg)
    print(f"artifacts written to {out}")


def build_parser():
    p = argparse.ArgumentParser(prog="docmap", description="Annotated document maps.")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    def add(name, fn, help):
        sp = sub.add_parser(name, help=help)
        sp.set_defaults(func=fn)
        return sp

    sp = add("fetch", cmd_fetch, "download PubMed records as efetch XML batches")
    sp.add_argument("--query", required=True)
    sp.add_argument("--max", type=int, required=True)
    sp.add_argument("--out", required=True)
    sp.add_argument("--api-key")

    sp = add("ingest", cmd_ingest, "normalise JSONL or efetch XML into corpus JSONL")
    sp.add_argument("--input", nargs="+", required=True)
    sp.add_argument("--out", required=True)

    sp = add("vectors", cmd_vectors, "compute averaged document vectors")
    sp.add_argument("--corpus", required=True)
    sp.add_argument("--vectors", required=True)
    sp.add_argument("--out", required=True)
    sp.add_argument("--limit", type=int)
    sp.add_argument("--stopwords")

    sp = add("project", cmd_project, "t-SNE projection of document vectors")
    sp.add_argument("--doc-vectors", required=True)
    sp.add_argument("--out", required=True)
    sp.add_argument("--perplexity", type=float, default=30.0)
    sp.add_argument("--iterations", type=int, default=1000)
    sp.add_argument("--learning-rate", type=float, default=200.0)
    sp.add_argument("--seed", type=int, default=0)

    sp = add("cluster", cmd_cluster, "Gaussian mixture clustering of the map")
    sp.add_argument("--projection", required=True)
    sp.add_argument("--out", required=True)
    sp.add_argument("--K", type=int, default=9)
    sp.add_argument("--threshold", type=float, default=clustering.DEFAULT_THRESHOLD)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--model")
    sp.add_argument("--exemplars")
    sp.add_argument("--top-m", type=int, default=3)

    sp = add("keywords", cmd_keywords, "extract per-document keywords")
    sp.add_argument("--corpus", required=True)
    sp.add_argument("--method", choices=METHODS, default="yake")
    sp.add_argument("--k", type=int, default=20)
    sp.add_argument("--out", required=True)
    sp.add_argument("--vectors")
    sp.add_argument("--limit", type=int)
    sp.add_argument("--rake-metric", choices=METRICS, default="degree_over_freq")
    sp.add_argument("--stopwords")
    sp.add_argument("--threads", type=int, default=1)

    sp = add("annotate", cmd_annotate, "label clusters with enriched keywords")
    sp.add_argument("--keywords", required=True)
    sp.add_argument("--clusters", required=True)
    sp.add_argument("--out", required=True)
    sp.add_argument("--alpha", type=float, default=annotation.ALPHA)
    sp.add_argument("--top-m", type=int, default=annotation.LABELS_PER_CLUSTER)
    sp.add_argument("--fdr", action="store_true")

    sp = add("evaluate", cmd_evaluate, "score keywords against gold keywords")
    sp.add_argument("--corpus", required=True)
    sp.add_argument("--keywords", nargs="+", required=True)
    sp.add_argument("--k", type=int, default=20)
    sp.add_argument("--out", required=True)
    sp.add_argument("--pr-out")
    sp.add_argument("--f1-of-means", action="store_true")

    sp = add("render-map", cmd_render_map, "draw the annotated map as SVG")
    sp.add_argument("--clusters", required=True)
    sp.add_argument("--labels")
    sp.add_argument("--model")
    sp.add_argument("--out", required=True)
    sp.add_argument("--width", type=int, default=1200)
    sp.add_argument("--height", type=int, default=900)

    sp = add("render-curves", cmd_render_curves, "draw evaluation curves as SVG")
    sp.add_argument("--eval", required=True)
    sp.add_argument("--out", required=True)
    sp.add_argument("--methods", help="comma-separated subset of methods")

    sp = add("pipeline", cmd_pipeline, "run every stage")
    sp.add_argument("--config")
    sp.add_argument("--corpus")
    sp.add_argument("--vectors")
    sp.add_argument("--out")
    sp.add_argument("--k", type=int)
    sp.add_argument("--method", choices=METHODS)
    sp.add_argument("--K", type=int)
    sp.add_argument("--seed", type=int)
    sp.add_argument("--alpha", type=float)
    sp.add_argument("--threshold", type=float)
    sp.add_argument("--perplexity", type=float)
    sp.add_argument("--iterations", type=int)
    sp.add_argument("--fdr", action="store_true")
    sp.add_argument("--threads", type=int)
    return p


def main(argv=None):
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        args.func(args)
    except DocmapError as exc:
        print(f"docmap: error: {exc}", file=sys.stderr)
        return exc.exit_code
    except OSError as exc:
        print(f"docmap: I/O error: {exc}", file=sys.stderr)
        return 3
    return 0


if __name__ == "__main__":
    sys.exit(main())
