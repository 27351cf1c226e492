"""lexkit: retrieval, mining, ensembling, and entailment pipelines for
statute and case-law corpora."""

__version__ = "0.1.0"

from . import corpus, ensemble, entail, lexical, metrics, mining, predict, scores  # noqa: F401
