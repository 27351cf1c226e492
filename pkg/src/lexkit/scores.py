"""Ingestion and validation of externally produced model artifacts.

Checkpoint relevance scores arrive as line-oriented TSV
(checkpoint_id \\t query_id \\t doc_id \\t score); embeddings, SRL
annotations, and mask-fill candidates arrive as JSONL. Nothing here runs a
model; files are validated against their schema and frozen into immutable
containers.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import (
    CompletenessError,
    IntegrityError,
    NotFoundError,
    ParseError,
    ValidationError,
)


@dataclass
class ScoreMatrix:
    """(checkpoint x query x doc) relevance scores over per-query candidate pools."""

    checkpoints: tuple[str, ...]
    entries: dict[tuple[str, str, str], float]
    _pools: dict[str, list[str]] = field(init=False, repr=False)

    def __post_init__(self):
        pools: dict[str, set[str]] = {}
        for (_, qid, did), score in self.entries.items():
            if not math.isfinite(score):
                raise ValidationError(f"non-finite score for ({qid!r}, {did!r})")
            pools.setdefault(qid, set()).add(did)
        self._pools = {qid: sorted(docs) for qid, docs in pools.items()}
        for ckpt in self.checkpoints:
            for qid, docs in self._pools.items():
                for did in docs:
                    if (ckpt, qid, did) not in self.entries:
                        raise CompletenessError(
                            f"missing score for checkpoint {ckpt!r}, query {qid!r}, doc {did!r}"
                        )

    @property
    def query_ids(self) -> list[str]:
        return sorted(self._pools)

    def candidates(self, query_id: str) -> list[str]:
        if query_id not in self._pools:
            raise NotFoundError(f"query {query_id!r} not present in score matrix")
        return list(self._pools[query_id])

    def score(self, checkpoint_id: str, query_id: str, doc_id: str) -> float:
        try:
            return self.entries[(checkpoint_id, query_id, doc_id)]
        except KeyError:
            raise NotFoundError(
                f"no score for checkpoint {checkpoint_id!r}, query {query_id!r}, doc {doc_id!r}"
            ) from None

    def ranked(self, checkpoint_id: str, query_id: str) -> list[tuple[str, float]]:
        """Candidates of one query, score descending, ties by ascending doc id."""
        if checkpoint_id not in self.checkpoints:
            raise NotFoundError(f"unknown checkpoint {checkpoint_id!r}")
        rows = [(did, self.entries[(checkpoint_id, query_id, did)])
                for did in self.candidates(query_id)]
        return sorted(rows, key=lambda x: (-x[1], x[0]))


def load_scores(path) -> ScoreMatrix:
    """Read and validate a scores TSV; every hole or bad value is an error."""
    entries: dict[tuple[str, str, str], float] = {}
    checkpoints: list[str] = []
    p = Path(path)
    with open(p, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            if not line.strip():
                continue
            parts = line.rstrip("\n").split("\t")
            if len(parts) != 4:
                raise ParseError(
                    f"expected 4 tab-separated fields, got {len(parts)}", path=p, line=lineno
                )
            ckpt, qid, did, raw = parts
            try:
                score = float(raw)
            except ValueError:
                raise ParseError(f"invalid score {raw!r}", path=p, line=lineno) from None
            if not math.isfinite(score):
                raise ValidationError(f"non-finite score {raw!r} at {p}:{lineno}")
            key = (ckpt, qid, did)
            if key in entries:
                raise IntegrityError(f"duplicate score row {key} at {p}:{lineno}")
            entries[key] = score
            if ckpt not in checkpoints:
                checkpoints.append(ckpt)
    if not entries:
        raise ParseError("scores file contains no rows", path=p)
    return ScoreMatrix(checkpoints=tuple(checkpoints), entries=entries)


def save_scores(matrix: ScoreMatrix, path) -> None:
    """Write TSV rows in deterministic (checkpoint, query, doc) order."""
    with open(path, "w", encoding="utf-8") as fh:
        for ckpt in matrix.checkpoints:
            for qid in matrix.query_ids:
                for did in matrix.candidates(qid):
                    fh.write(f"{ckpt}\t{qid}\t{did}\t{matrix.entries[(ckpt, qid, did)]!r}\n")


def normalize_per_query(matrix: ScoreMatrix, method: str = "none") -> ScoreMatrix:
    """Rescale each (checkpoint, query) candidate list; 'minmax' maps onto [0, 1].

    Constant candidate lists map to 0.5. Order within a list is preserved.
    """
    if method == "none":
        return ScoreMatrix(checkpoints=matrix.checkpoints, entries=dict(matrix.entries))
    if method != "minmax":
        raise ValidationError(f"unknown normalization method {method!r}")
    entries: dict[tuple[str, str, str], float] = {}
    for ckpt in matrix.checkpoints:
        for qid in matrix.query_ids:
            docs = matrix.candidates(qid)
            vals = [matrix.entries[(ckpt, qid, d)] for d in docs]
            lo, hi = min(vals), max(vals)
            for did, v in zip(docs, vals):
                entries[(ckpt, qid, did)] = 0.5 if hi == lo else (v - lo) / (hi - lo)
    return ScoreMatrix(checkpoints=matrix.checkpoints, entries=entries)


# ---------------------------------------------------------------------------
# embeddings
# ---------------------------------------------------------------------------


class EmbeddingStore:
    """Immutable id -> dense vector map with a uniform dimension."""

    def __init__(self, vectors: dict[str, np.ndarray]):
        if not vectors:
            raise ValidationError("embedding store must not be empty")
        dims = {v.shape for v in vectors.values()}
        if len(dims) != 1 or next(iter(dims))[0] < 1 or len(next(iter(dims))) != 1:
            raise ValidationError(f"inconsistent embedding dimensions: {sorted(dims)}")
        for key, vec in vectors.items():
            if not np.all(np.isfinite(vec)):
                raise ValidationError(f"non-finite embedding for id {key!r}")
        self._vectors = {k: np.array(v, dtype=float, copy=True) for k, v in vectors.items()}
        self.dim = next(iter(self._vectors.values())).shape[0]

    def __contains__(self, key: str) -> bool:
        return key in self._vectors

    def __len__(self) -> int:
        return len(self._vectors)

    def get(self, key: str) -> np.ndarray:
        try:
            return self._vectors[key]
        except KeyError:
            raise NotFoundError(f"no embedding for id {key!r}") from None

    def ids(self) -> list[str]:
        return sorted(self._vectors)


def load_embeddings(path) -> EmbeddingStore:
    p = Path(path)
    vectors: dict[str, np.ndarray] = {}
    for lineno, line in enumerate(open(p, encoding="utf-8"), 1):
        if not line.strip():
            continue
        try:
            obj = json.loads(line)
        except json.JSONDecodeError as exc:
            raise ParseError(f"invalid JSON: {exc.msg}", path=p, line=lineno) from exc
        if "id" not in obj or "vector" not in obj:
            raise ParseError("embedding record needs 'id' and 'vector'", path=p, line=lineno)
        if obj["id"] in vectors:
            raise IntegrityError(f"duplicate embedding id {obj['id']!r} at {p}:{lineno}")
        vectors[obj["id"]] = np.asarray(obj["vector"], dtype=float)
    return EmbeddingStore(vectors)


# ---------------------------------------------------------------------------
# SRL annotations
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SrlArgument:
    role: str
    span: tuple[int, int]  # half-open token range


@dataclass(frozen=True)
class SrlPredicate:
    verb_span: tuple[int, int]
    arguments: tuple[SrlArgument, ...]

    def spans(self) -> list[tuple[int, int]]:
        return [self.verb_span] + [a.span for a in self.arguments]


@dataclass(frozen=True)
class SrlAnnotation:
    sentence_id: str
    predicates: tuple[SrlPredicate, ...]
    # Tokens the spans refer to. Optional in the wire format but carried by
    # the bridge so consumers never have to re-tokenize.
    tokens: tuple[str, ...] = ()

    def __post_init__(self):
        bound = len(self.tokens) if self.tokens else None
        for pred in self.predicates:
            for start, end in pred.spans():
                if start < 0 or end < start:
                    raise ValidationError(
                        f"{self.sentence_id!r}: bad span [{start}, {end})"
                    )
                if bound is not None and end > bound:
                    raise ValidationError(
                        f"{self.sentence_id!r}: span [{start}, {end}) exceeds {bound} tokens"
                    )


def _parse_span(raw, where: str) -> tuple[int, int]:
    if (not isinstance(raw, (list, tuple))) or len(raw) != 2:
        raise ValidationError(f"{where}: span must be a [start, end) pair, got {raw!r}")
    return (int(raw[0]), int(raw[1]))


def load_srl(path) -> dict[str, SrlAnnotation]:
    """Read srl.jsonl into a sentence_id -> annotation map."""
    p = Path(path)
    out: dict[str, SrlAnnotation] = {}
    for lineno, line in enumerate(open(p, encoding="utf-8"), 1):
        if not line.strip():
            continue
        try:
            obj = json.loads(line)
        except json.JSONDecodeError as exc:
            raise ParseError(f"invalid JSON: {exc.msg}", path=p, line=lineno) from exc
        sid = obj.get("sentence_id")
        if not sid:
            raise ParseError("missing sentence_id", path=p, line=lineno)
        if sid in out:
            raise IntegrityError(f"duplicate sentence_id {sid!r} at {p}:{lineno}")
        preds = []
        for pd in obj.get("predicates", []):
            args = tuple(
                SrlArgument(role=str(a["role"]), span=_parse_span(a["span"], sid))
                for a in pd.get("args", [])
            )
            preds.append(SrlPredicate(verb_span=_parse_span(pd["verb"], sid), arguments=args))
        out[sid] = SrlAnnotation(
            sentence_id=sid, predicates=tuple(preds), tokens=tuple(obj.get("tokens", []))
        )
    return out


def save_srl(annotations: dict[str, SrlAnnotation], path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for sid in sorted(annotations):
            ann = annotations[sid]
            rec = {
                "sentence_id": sid,
                "predicates": [
                    {
                        "verb": list(p.verb_span),
                        "args": [{"role": a.role, "span": list(a.span)} for a in p.arguments],
                    }
                    for p in ann.predicates
                ],
            }
            if ann.tokens:
                rec["tokens"] = list(ann.tokens)
            fh.write(json.dumps(rec, sort_keys=True, ensure_ascii=False) + "\n")


# ---------------------------------------------------------------------------
# mask-fill candidates
# ---------------------------------------------------------------------------


def load_fills(path) -> dict[tuple[str, int], list[tuple[str, float]]]:
    """Read fills.jsonl into a (template_id, mask_index) -> candidate list map.

    Candidates keep file order and must be sorted by probability descending.
    """
    p = Path(path)
    out: dict[tuple[str, int], list[tuple[str, float]]] = {}
    for lineno, line in enumerate(open(p, encoding="utf-8"), 1):
        if not line.strip():
            continue
        try:
            obj = json.loads(line)
        except json.JSONDecodeError as exc:
            raise ParseError(f"invalid JSON: {exc.msg}", path=p, line=lineno) from exc
        try:
            key = (str(obj["template_id"]), int(obj["mask_index"]))
            cands = [(str(c["token"]), float(c["prob"])) for c in obj["candidates"]]
        except (KeyError, TypeError, ValueError) as exc:
            raise ParseError(f"bad fill record: {exc}", path=p, line=lineno) from exc
        if key in out:
            raise IntegrityError(f"duplicate fill record {key} at {p}:{lineno}")
        if not cands:
            raise ValidationError(f"fill record {key} has no candidates")
        probs = [pr for _, pr in cands]
        if any(not math.isfinite(pr) for pr in probs):
            raise ValidationError(f"fill record {key} has a non-finite probability")
        if probs != sorted(probs, reverse=True):
            raise ValidationError(f"fill record {key} candidates not sorted by prob desc")
        out[key] = cands
    return out
