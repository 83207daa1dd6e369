import json
import subprocess
import sys
from pathlib import Path

import pytest

from docmap.cli import main
from docmap.config import PipelineConfig, parse_config
from docmap.errors import ConfigError, StageError
from docmap.pipeline import MANIFEST, resolve_perplexity, run_pipeline, verify_manifest

from synthetic import planted_corpus, write_corpus, write_vectors

FIXTURE_XML = Path(__file__).parent / "fixtures" / "efetch_sample.xml"


@pytest.fixture(scope="module")
def inputs(tmp_path_factory):
    d = tmp_path_factory.mktemp("inputs")
    records, _, _, (words, matrix) = planted_corpus(n_docs=60, n_topics=3, seed=5)
    write_corpus(records, d / "corpus.jsonl")
    write_vectors(words, matrix, d / "vectors.vec")
    nogold = [{k: v for k, v in r.items() if k != "keywords"} for r in records]
    write_corpus(nogold, d / "nogold.jsonl")
    return d


def fast(inputs, out, **kw):
    values = {"corpus": str(inputs / "corpus.jsonl"), "vectors": str(inputs / "vectors.vec"),
              "output_dir": str(out), "K_clusters": 3, "tsne_iterations": 300,
              "perplexity": 10.0, "eval_methods": ["tfidf", "rake"]}
    values.update(kw)
    return parse_config(overrides=values)


class TestConfig:
    def test_defaults(self):
        cfg = parse_config()
        assert (cfg.k_keywords, cfg.assign_threshold, cfg.alpha, cfg.labels_per_cluster) == (20, 0.6, 0.05, 5)
        assert (cfg.K_clusters, cfg.method, cfg.perplexity, cfg.seed) == (9, "yake", 30.0, 0)

    def test_empty_file(self, tmp_path):
        (tmp_path / "c.json").write_text("")
        assert parse_config(tmp_path / "c.json") == PipelineConfig()

    def test_precedence(self, tmp_path):
        (tmp_path / "c.json").write_text(json.dumps({"k_keywords": 10, "seed": 4}))
        cfg = parse_config(tmp_path / "c.json", {"k_keywords": 15, "seed": None})
        assert (cfg.k_keywords, cfg.seed) == (15, 4)

    @pytest.mark.parametrize("values,field", [
        ({"alpha": 1.5}, "alpha"),
        ({"assign_threshold": 0}, "assign_threshold"),
        ({"k_keywords": "20"}, "k_keywords"),
        ({"method": "lda"}, "method"),
        ({"bogus": 1}, "bogus"),
        ({"fdr": 1}, "fdr"),
    ])
    def test_invalid(self, values, field):
        with pytest.raises(ConfigError, match=field):
            parse_config(overrides=values)

    def test_bad_json(self, tmp_path):
        (tmp_path / "c.json").write_text("{nope")
        with pytest.raises(ConfigError):
            parse_config(tmp_path / "c.json")

    def test_sub_seeds_deterministic(self):
        assert PipelineConfig(seed=3).sub_seeds() == PipelineConfig(seed=3).sub_seeds()
        assert PipelineConfig(seed=3).sub_seeds() != PipelineConfig(seed=4).sub_seeds()


def test_resolve_perplexity():
    assert resolve_perplexity(30, 100) == 30
    assert resolve_perplexity(30, 10) == 3.0


class TestPipeline:
    def test_artifacts_and_manifest(self, inputs, tmp_path):
        out = run_pipeline(fast(inputs, tmp_path / "run"))
        manifest = json.loads((out / MANIFEST).read_text())
        names = [a["name"] for a in manifest["artifacts"]]
        assert names == ["config.json", "doc_vectors.tsv", "projection.tsv", "clusters.tsv",
                         "gmm.json", "exemplars.json", "keywords.jsonl", "labels.json", "map.svg",
                         "eval.csv", "pr_curve.csv", "curves.svg"]
        assert manifest["config"]["K_clusters"] == 3
        assert manifest["corpus"]["documents"] == 60
        assert verify_manifest(out) == []
        with open(out / "labels.json", "a") as fh:
            fh.write(" ")
        assert verify_manifest(out) == ["labels.json"]

    def test_deterministic_manifest(self, inputs, tmp_path):
        cfg = fast(inputs, tmp_path / "run")
        first = (run_pipeline(cfg) / MANIFEST).read_bytes()
        for p in (tmp_path / "run").iterdir():
            p.unlink()
        assert (run_pipeline(cfg) / MANIFEST).read_bytes() == first

    def test_no_gold_skips_evaluation(self, inputs, tmp_path):
        out = run_pipeline(fast(inputs, tmp_path / "run", corpus=str(inputs / "nogold.jsonl")))
        assert not (out / "eval.csv").exists() and not (out / "curves.svg").exists()
        assert (out / "map.svg").exists()

    def test_stage_failure_names_stage(self, inputs, tmp_path):
        (tmp_path / "bad.vec").write_text("2 3\nalpha 1 2\n")
        cfg = fast(inputs, tmp_path / "run", vectors=str(tmp_path / "bad.vec"))
        with pytest.raises(StageError) as info:
            run_pipeline(cfg)
        assert info.value.stage == "vectors"
        assert info.value.exit_code == 2
        assert (tmp_path / "run" / "config.json").exists()


class TestMain:
    def test_pipeline_command(self, inputs, tmp_path, capsys):
        cfg = tmp_path / "cfg.json"
        cfg.write_text(json.dumps({"tsne_iterations": 250, "perplexity": 10.0,
                                   "eval_methods": ["tfidf"]}))
        code = main(["pipeline", "--config", str(cfg), "--corpus", str(inputs / "corpus.jsonl"),
                     "--vectors", str(inputs / "vectors.vec"), "--out", str(tmp_path / "o"),
                     "--K", "3"])
        assert code == 0
        echo = json.loads((tmp_path / "o" / "config.json").read_text())
        assert (echo["K_clusters"], echo["tsne_iterations"]) == (3, 250)

    def test_validation_exit_code(self, inputs, tmp_path, capsys):
        code = main(["pipeline", "--corpus", str(inputs / "corpus.jsonl"),
                     "--vectors", str(inputs / "vectors.vec"), "--alpha", "1.5"])
        assert code == 2
        assert "alpha" in capsys.readouterr().err

    def test_missing_file_exit_code(self, tmp_path, capsys):
        code = main(["ingest", "--input", str(tmp_path / "nope.jsonl"), "--out", str(tmp_path / "x")])
        assert code == 3

    def test_parse_error_exit_code(self, tmp_path):
        (tmp_path / "c.jsonl").write_text('{"id": "1", "abstract": "x"}\n{broken\n')
        assert main(["ingest", "--input", str(tmp_path / "c.jsonl"), "--out", str(tmp_path / "o")]) == 2

    def test_stage_commands(self, inputs, tmp_path, capsys):
        t = tmp_path
        corpus = str(inputs / "corpus.jsonl")
        assert main(["ingest", "--input", corpus, "--out", str(t / "c.jsonl")]) == 0
        assert "60 documents" in capsys.readouterr().out
        assert main(["vectors", "--corpus", str(t / "c.jsonl"), "--vectors",
                     str(inputs / "vectors.vec"), "--out", str(t / "dv.tsv")]) == 0
        assert main(["project", "--doc-vectors", str(t / "dv.tsv"), "--out", str(t / "p.tsv"),
                     "--iterations", "300", "--perplexity", "10"]) == 0
        assert main(["cluster", "--projection", str(t / "p.tsv"), "--out", str(t / "cl.tsv"),
                     "--K", "3", "--model", str(t / "gmm.json"), "--exemplars",
                     str(t / "ex.json")]) == 0
        for m in ("yake", "embed"):
            assert main(["keywords", "--corpus", corpus, "--method", m, "--vectors",
                         str(inputs / "vectors.vec"), "--out", str(t / f"{m}.jsonl")]) == 0
        assert main(["annotate", "--keywords", str(t / "yake.jsonl"), "--clusters",
                     str(t / "cl.tsv"), "--out", str(t / "labels.json")]) == 0
        assert main(["evaluate", "--corpus", corpus, "--keywords", str(t / "yake.jsonl"),
                     str(t / "embed.jsonl"), "--out", str(t / "eval.csv"),
                     "--pr-out", str(t / "pr.csv")]) == 0
        assert main(["render-map", "--clusters", str(t / "cl.tsv"), "--labels",
                     str(t / "labels.json"), "--model", str(t / "gmm.json"),
                     "--out", str(t / "map.svg")]) == 0
        assert main(["render-curves", "--eval", str(t / "eval.csv"), "--out",
                     str(t / "curves.svg"), "--methods", "embed"]) == 0
        svg = (t / "map.svg").read_text()
        assert svg.count('<circle cx') == 60 + 3
        assert (t / "curves.svg").read_text().count('data-method="embed"') == 4

    def test_keywords_embed_requires_vectors(self, inputs, tmp_path):
        assert main(["keywords", "--corpus", str(inputs / "corpus.jsonl"), "--method", "embed",
                     "--out", str(tmp_path / "k.jsonl")]) == 2

    def test_ingest_xml(self, tmp_path, capsys):
        assert main(["ingest", "--input", str(FIXTURE_XML), "--out", str(tmp_path / "c.jsonl")]) == 0
        assert "skipped 1" in capsys.readouterr().out
        assert len((tmp_path / "c.jsonl").read_text().splitlines()) == 2

    def test_module_entry_point(self):
        res = subprocess.run([sys.executable, "-m", "docmap", "--help"], capture_output=True, text=True)
        assert res.returncode == 0 and "pipeline" in res.stdout
