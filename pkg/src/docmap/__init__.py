"""Explainable document maps: embed, project, cluster and label a corpus."""

__version__ = "0.1.0"
