"""Tokenization, inverted index, BM25 / TfIdf scoring, and top-k retrieval.

The BM25 scoring function follows the Lucene formulation (as shipped by
Anserini): idf(t) = ln(1 + (N - df + 0.5) / (df + 0.5)) and a saturated
term-frequency component tf / (tf + k1 * (1 - b + b * dl / avgdl)).
Defaults k1 = 0.9, b = 0.4.
"""

from __future__ import annotations

import json
import math
import re
from collections import Counter
from dataclasses import dataclass, field

import numpy as np

from .errors import (
    EmptyInputError,
    IntegrityError,
    NotFoundError,
    UndefinedSimilarityError,
    ValidationError,
)

_WORD_RE = re.compile(r"[^\W_]+", re.UNICODE)

MAGIC = b"LXIDX1"


@dataclass(frozen=True)
class Tokenizer:
    """Deterministic tokenizer: lowercase word tokens or character bigrams."""

    mode: str = "word"  # "word" | "char-bigram"
    stopwords: frozenset[str] = frozenset()

    def __post_init__(self):
        if self.mode not in ("word", "char-bigram"):
            raise ValidationError(f"unknown tokenizer mode {self.mode!r}")
        object.__setattr__(self, "stopwords", frozenset(self.stopwords))

    def tokenize(self, text: str) -> list[str]:
        if self.mode == "word":
            tokens = _WORD_RE.findall(text.lower())
        else:
            chars = "".join(text.lower().split())
            if len(chars) <= 1:
                tokens = [chars] if chars else []
            else:
                tokens = [chars[i : i + 2] for i in range(len(chars) - 1)]
        if self.stopwords:
            tokens = [t for t in tokens if t not in self.stopwords]
        return tokens


def tokenizer_for_lang(lang: str) -> Tokenizer:
    """Language default: word tokens for English, character bigrams for Japanese."""
    return Tokenizer(mode="char-bigram" if lang == "ja" else "word")


@dataclass(frozen=True)
class Bm25Params:
    k1: float = 0.9
    b: float = 0.4

    def __post_init__(self):
        if not self.k1 > 0:
            raise ValidationError("k1 must be > 0")
        if not 0.0 <= self.b <= 1.0:
            raise ValidationError("b must be in [0, 1]")


@dataclass
class InvertedIndex:
    tokenizer: Tokenizer
    postings: dict[str, list[tuple[str, int]]]  # term -> [(doc_id, tf)]
    doc_lengths: dict[str, int]
    avg_doc_len: float
    N: int
    _df: dict[str, int] = field(init=False, repr=False)

    def __post_init__(self):
        self._df = {t: len(p) for t, p in self.postings.items()}

    def df(self, term: str) -> int:
        return self._df.get(term, 0)

    def tf(self, term: str, doc_id: str) -> int:
        for did, tf in self.postings.get(term, ()):
            if did == doc_id:
                return tf
        return 0

    @property
    def doc_ids(self) -> list[str]:
        return sorted(self.doc_lengths)


def build_index(docs: list[tuple[str, str]], tokenizer: Tokenizer) -> InvertedIndex:
    """Index (id, text) documents; doc length counts post-stopword tokens."""
    if not docs:
        raise EmptyInputError("cannot build an index over zero documents")
    ids = [d for d, _ in docs]
    if len(set(ids)) != len(ids):
        dupes = sorted({d for d in ids if ids.count(d) > 1})
        raise IntegrityError(f"duplicate document ids {dupes}")

    postings: dict[str, list[tuple[str, int]]] = {}
    doc_lengths: dict[str, int] = {}
    for doc_id, text in docs:
        tokens = tokenizer.tokenize(text)
        doc_lengths[doc_id] = len(tokens)
        for term, tf in sorted(Counter(tokens).items()):
            postings.setdefault(term, []).append((doc_id, tf))
    n = len(docs)
    avg = sum(doc_lengths.values()) / n
    return InvertedIndex(
        tokenizer=tokenizer, postings=postings, doc_lengths=doc_lengths, avg_doc_len=avg, N=n
    )


def bm25_idf(index: InvertedIndex, term: str) -> float:
    df = index.df(term)
    return math.log(1.0 + (index.N - df + 0.5) / (df + 0.5))


def bm25_score(
    index: InvertedIndex,
    query_tokens: list[str],
    doc_id: str,
    params: Bm25Params = Bm25Params(),
) -> float:
    """Lucene-variant BM25 of a tokenized query against one indexed document.

    Repeated query tokens contribute once per occurrence.
    """
    if doc_id not in index.doc_lengths:
        raise NotFoundError(f"document id {doc_id!r} is not indexed")
    dl = index.doc_lengths[doc_id]
    norm = params.k1 * (1.0 - params.b + params.b * dl / index.avg_doc_len)
    score = 0.0
    for term in query_tokens:
        tf = index.tf(term, doc_id)
        if tf == 0:
            continue
        score += bm25_idf(index, term) * (tf / (tf + norm))
    return score


def retrieve_top_k(
    index: InvertedIndex,
    query: str,
    k: int,
    params: Bm25Params = Bm25Params(),
) -> list[tuple[str, float]]:
    """Top-k documents by BM25, score descending, ties by ascending doc id."""
    if k < 1:
        raise ValidationError("k must be >= 1")
    tokens = index.tokenizer.tokenize(query)
    scored = {did: 0.0 for did in index.doc_lengths}
    for term in tokens:
        idf = bm25_idf(index, term)
        for did, tf in index.postings.get(term, ()):
            dl = index.doc_lengths[did]
            norm = params.k1 * (1.0 - params.b + params.b * dl / index.avg_doc_len)
            scored[did] += idf * (tf / (tf + norm))
    ranked = sorted(scored.items(), key=lambda x: (-x[1], x[0]))
    return ranked[: min(k, index.N)]


# ---------------------------------------------------------------------------
# TfIdf
# ---------------------------------------------------------------------------


def tfidf_idf(index: InvertedIndex, term: str) -> float:
    """Smoothed idf: ln((N + 1) / (df + 1)) + 1; finite for unseen terms."""
    return math.log((index.N + 1.0) / (index.df(term) + 1.0)) + 1.0


def tfidf_vector(text: str, tokenizer: Tokenizer, index: InvertedIndex) -> dict[str, float]:
    """L2-normalized sparse tf.idf vector; empty text maps to the empty vector."""
    counts = Counter(tokenizer.tokenize(text))
    vec = {t: tf * tfidf_idf(index, t) for t, tf in counts.items()}
    norm = math.sqrt(sum(w * w for w in vec.values()))
    if norm == 0.0:
        return {}
    return {t: w / norm for t, w in vec.items()}


def tfidf_cosine(a: str, b: str, tokenizer: Tokenizer, index: InvertedIndex) -> float:
    """Cosine of L2-normalized TfIdf vectors; 0.0 when no terms are shared."""
    va = tfidf_vector(a, tokenizer, index)
    vb = tfidf_vector(b, tokenizer, index)
    if not va and not vb:
        raise UndefinedSimilarityError("similarity of two empty texts is undefined")
    if not va or not vb:
        return 0.0
    if len(vb) < len(va):
        va, vb = vb, va
    dot = sum(w * vb.get(t, 0.0) for t, w in va.items())
    return min(1.0, max(0.0, dot))


def embedding_cosine(u, v) -> float:
    """Cosine similarity of two dense vectors, clamped into [-1, 1]."""
    ua = np.asarray(u, dtype=float)
    va = np.asarray(v, dtype=float)
    if ua.shape != va.shape or ua.ndim != 1:
        raise ValidationError(f"dimension mismatch: {ua.shape} vs {va.shape}")
    nu = float(np.linalg.norm(ua))
    nv = float(np.linalg.norm(va))
    if nu == 0.0 or nv == 0.0:
        raise ValidationError("cosine undefined for a zero vector")
    return float(np.clip(float(ua @ va) / (nu * nv), -1.0, 1.0))


# ---------------------------------------------------------------------------
# persistence
# ---------------------------------------------------------------------------


def save_index(index: InvertedIndex, path) -> None:
    """Versioned binary file: LXIDX1 magic, then a canonical JSON payload."""
    payload = {
        "tokenizer": {"mode": index.tokenizer.mode, "stopwords": sorted(index.tokenizer.stopwords)},
        "postings": {t: p for t, p in sorted(index.postings.items())},
        "doc_lengths": dict(sorted(index.doc_lengths.items())),
        "avg_doc_len": index.avg_doc_len,
        "N": index.N,
    }
    blob = MAGIC + b"\n" + json.dumps(payload, sort_keys=True, ensure_ascii=False).encode("utf-8")
    with open(path, "wb") as fh:
        fh.write(blob)


def load_index(path) -> InvertedIndex:
    with open(path, "rb") as fh:
        blob = fh.read()
    if not blob.startswith(MAGIC + b"\n"):
        raise ValidationError(f"not a lexkit index file (missing {MAGIC!r} header)")
    payload = json.loads(blob[len(MAGIC) + 1 :].decode("utf-8"))
    tok = Tokenizer(
        mode=payload["tokenizer"]["mode"],
        stopwords=frozenset(payload["tokenizer"]["stopwords"]),
    )
    return InvertedIndex(
        tokenizer=tok,
        postings={t: [(d, int(tf)) for d, tf in p] for t, p in payload["postings"].items()},
        doc_lengths={d: int(n) for d, n in payload["doc_lengths"].items()},
        avg_doc_len=float(payload["avg_doc_len"]),
        N=int(payload["N"]),
    )
