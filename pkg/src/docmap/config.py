"""Pipeline configuration: JSON file plus flag overrides."""

import dataclasses
import json
from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigError
from .extraction.common import METHODS
from .extraction.rake import METRICS


@dataclass
class PipelineConfig:
    corpus: str | None = None
    vectors: str | None = None
    output_dir: str = "docmap-out"
    stopwords: str | None = None
    vectors_limit: int | None = None
    k_keywords: int = 20
    method: str = "yake"
    rake_metric: str = "degree_over_freq"
    perplexity: float = 30.0
    tsne_iterations: int = 1000
    learning_rate: float = 200.0
    K_clusters: int = 9
    assign_threshold: float = 0.6
    alpha: float = 0.05
    labels_per_cluster: int = 5
    fdr: bool = False
    exemplars_per_cluster: int = 3
    eval_methods: list = field(default_factory=lambda: list(METHODS))
    f1_of_means: bool = False
    seed: int = 0
    threads: int = 1

    def validate(self):
        def need(ok, name, msg):
            if not ok:
                raise ConfigError(f"{name}: {msg} (got {getattr(self, name)!r})")

        need(self.k_keywords >= 1, "k_keywords", "must be >= 1")
        need(self.method in METHODS, "method", f"must be one of {', '.join(METHODS)}")
        need(self.rake_metric in METRICS, "rake_metric", f"must be one of {', '.join(METRICS)}")
        need(self.perplexity > 1, "perplexity", "must be > 1")
        need(self.tsne_iterations >= 1, "tsne_iterations", "must be >= 1")
        need(self.learning_rate > 0, "learning_rate", "must be > 0")
        need(self.K_clusters >= 1, "K_clusters", "must be >= 1")
        need(0 < self.assign_threshold < 1, "assign_threshold", "must be in (0, 1)")
        need(0 < self.alpha < 1, "alpha", "must be in (0, 1)")
        need(self.labels_per_cluster >= 1, "labels_per_cluster", "must be >= 1")
        need(self.exemplars_per_cluster >= 1, "exemplars_per_cluster", "must be >= 1")
        need(self.threads >= 0, "threads", "must be >= 0")
        need(self.vectors_limit is None or self.vectors_limit >= 1, "vectors_limit",
             "must be >= 1")
        need(all(m in METHODS for m in self.eval_methods), "eval_methods",
             f"entries must be in {', '.join(METHODS)}")
        return self

    def to_json(self):
        return dataclasses.asdict(self)

    def sub_seeds(self):
        """Independent seeds for (t-SNE init, GMM restarts)."""
        a, b = np.random.SeedSequence(self.seed).generate_state(2)
        return int(a), int(b)


_FIELDS = {f.name: f for f in dataclasses.fields(PipelineConfig)}


def _coerce(name, value):
    default = _FIELDS[name].default
    if value is None:
        return None
    if name in ("perplexity", "learning_rate", "assign_threshold", "alpha"):
        ok = isinstance(value, (int, float)) and not isinstance(value, bool)
        if not ok:
            raise ConfigError(f"{name}: expected a number, got {value!r}")
        return float(value)
    if isinstance(default, bool):
        if not isinstance(value, bool):
            raise ConfigError(f"{name}: expected true/false, got {value!r}")
        return value
    if isinstance(default, int) or name == "vectors_limit":
        if isinstance(value, bool) or not isinstance(value, int):
            raise ConfigError(f"{name}: expected an integer, got {value!r}")
        return value
    if name == "eval_methods":
        if not isinstance(value, list):
            raise ConfigError(f"{name}: expected a list, got {value!r}")
        return list(value)
    if not isinstance(value, str):
        raise ConfigError(f"{name}: expected a string, got {value!r}")
    return value


def parse_config(path=None, overrides=None) -> PipelineConfig:
    """Resolve defaults < JSON file < explicit overrides, then validate."""
    values = {}
    if path is not None:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
        try:
            data = json.loads(text) if text.strip() else {}
        except json.JSONDecodeError as exc:
            raise ConfigError(f"{path}: invalid JSON ({exc.msg})") from None
        if not isinstance(data, dict):
            raise ConfigError(f"{path}: config must be a JSON object")
        values.update(data)
    for key, value in (overrides or {}).items():
        if value is not None:
            values[key] = value
    unknown = sorted(set(values) - set(_FIELDS))
    if unknown:
        raise ConfigError(f"unknown config field(s): {', '.join(unknown)}")
    cfg = PipelineConfig(**{k: _coerce(k, v) for k, v in values.items()})
    return cfg.validate()
