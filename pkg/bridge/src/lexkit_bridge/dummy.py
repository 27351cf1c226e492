"""Deterministic offline backend.

Stands in for neural models so every schema, dedup, and atomicity contract
can be exercised without network access or checkpoints: relevance is token
overlap blended with seeded hash jitter, embeddings and fill rankings are
hash-derived, SRL is a tiny rule tagger, and fine-tuning fits per-term
log-odds weights from the labeled pairs. Same inputs, same bytes, always.
"""

from __future__ import annotations

import hashlib
import math
import re

from .io import BridgeError

_WORD_RE = re.compile(r"'s|\w+|[^\w\s]", re.UNICODE)

FILL_VOCABULARY = (
    "person domicile residence obligation obligor obligee contract thing sale "
    "ownership possession delivery performance damages rescission guarantee "
    "guarantor mandate mandatary agent principal notice consent intention "
    "manifestation nullity transfer payment price deposit lease pledge "
    "mortgage claim right duty court law article provision clause term "
    "paragraph effect time period party third heir spouse minor adult"
).split()

_VERB_LEXICON = frozenset(
    "is are was were be been has have had does do did may shall must can "
    "will would might deemed applies apply performs perform acquires acquire "
    "transfers transfer demands demand retains retain extinguishes void".split()
)


def _unit(*parts) -> float:
    """Deterministic hash-derived value in [0, 1)."""
    digest = hashlib.sha256("|".join(str(p) for p in parts).encode("utf-8")).digest()
    return int.from_bytes(digest[:8], "big") / 2**64


def tokenize(text: str) -> list[str]:
    return _WORD_RE.findall(text)


def _word_set(text: str) -> set[str]:
    return {t.lower() for t in tokenize(text) if t.isalnum()}


def score_pair(model: str, query: str, doc: str) -> float:
    """Relevance in [0, 1]: Jaccard token overlap plus hash jitter."""
    q, d = _word_set(query), _word_set(doc)
    union = q | d
    jaccard = len(q & d) / len(union) if union else 0.0
    return round(0.75 * jaccard + 0.25 * _unit("score", model, query, doc), 6)


def embed_text(model: str, text: str, dim: int) -> list[float]:
    return [round(_unit("embed", model, text, i) - 0.5, 6) for i in range(dim)]


def fill_candidates(model: str, template_id: str, mask_index: int, k: int):
    """Exactly k candidates sorted by probability descending."""
    if k > len(FILL_VOCABULARY):
        raise BridgeError(
            f"top-k {k} exceeds the dummy vocabulary size {len(FILL_VOCABULARY)}"
        )
    ranked = sorted(
        FILL_VOCABULARY,
        key=lambda tok: (-_unit("fill", model, template_id, mask_index, tok), tok),
    )[:k]
    raw = [2.0 ** (-i) for i in range(k)]
    total = sum(raw)
    return [(tok, round(w / total, 6)) for tok, w in zip(ranked, raw)]


def srl_annotate(text: str) -> dict:
    """Rule tagger: each lexicon verb becomes a predicate whose ARG1/ARG2 are
    the contiguous non-punctuation runs on either side."""
    tokens = tokenize(text)
    is_word = [t[0].isalnum() or t == "'s" for t in tokens]
    predicates = []
    for i, tok in enumerate(tokens):
        if tok.lower() not in _VERB_LEXICON:
            continue
        start = i
        while start > 0 and is_word[start - 1] and tokens[start - 1].lower() not in _VERB_LEXICON:
            start -= 1
        end = i + 1
        while end < len(tokens) and is_word[end] and tokens[end].lower() not in _VERB_LEXICON:
            end += 1
        args = []
        if start < i:
            args.append({"role": "ARG1", "span": [start, i]})
        if end > i + 1:
            args.append({"role": "ARG2", "span": [i + 1, end]})
        predicates.append({"verb": [i, i + 1], "args": args})
    return {"tokens": tokens, "predicates": predicates}


def finetune(model: str, pairs: list[dict], texts: dict[str, str]) -> dict:
    """Per-term log-odds weights from positive vs negative document texts."""
    pos: dict[str, int] = {}
    neg: dict[str, int] = {}
    for pair in pairs:
        doc_text = texts.get(pair["doc_id"])
        if doc_text is None:
            raise BridgeError(f"no text for doc id {pair['doc_id']!r}")
        bucket = pos if pair["label"] == "positive" else neg
        for term in _word_set(doc_text):
            bucket[term] = bucket.get(term, 0) + 1
    weights = {
        term: round(math.log((pos.get(term, 0) + 1) / (neg.get(term, 0) + 1)), 6)
        for term in sorted(set(pos) | set(neg))
    }
    return {"model": model, "weights": weights}


def finetuned_score(checkpoint: dict, query: str, doc: str) -> float:
    """Sigmoid of the mean learned weight over query/doc shared terms."""
    weights = checkpoint["weights"]
    shared = _word_set(query) & _word_set(doc)
    scored = [weights[t] for t in sorted(shared) if t in weights]
    if not scored:
        return 0.5
    mean = sum(scored) / len(scored)
    return round(1.0 / (1.0 + math.exp(-3.0 * mean)), 6)
