"""Training-pair construction: two-round hard-negative mining, missed-query
detection, nearest-question recovery sets, and model-ranked negative sampling.

Every miner emits the query's gold positives alongside the mined negatives
(a usable training set needs both classes), deduplicates on (query, doc),
and breaks all ranking ties by ascending doc id so output files are
byte-reproducible.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

from .errors import CompletenessError, IntegrityError, NotFoundError, ParseError
from .corpus import GoldLabels, Query
from .lexical import Bm25Params, InvertedIndex, embedding_cosine, retrieve_top_k
from .predict import PredictionSet
from .scores import EmbeddingStore, ScoreMatrix

PROVENANCES = ("bm25", "model", "tfidf", "datflt-q", "datflt-a")


@dataclass(frozen=True)
class TrainingPair:
    query_id: str
    doc_id: str
    label: str  # "positive" | "negative"
    round: int
    provenance: str


@dataclass
class TrainingPairSet:
    pairs: list[TrainingPair] = field(default_factory=list)
    skipped: list[str] = field(default_factory=list)  # warning records

    def __post_init__(self):
        keys = [(p.query_id, p.doc_id) for p in self.pairs]
        if len(set(keys)) != len(keys):
            dupes = sorted({k for k in keys if keys.count(k) > 1})
            raise IntegrityError(f"duplicate (query, doc) pairs {dupes}")

    def keys(self) -> set[tuple[str, str]]:
        return {(p.query_id, p.doc_id) for p in self.pairs}

    def triples(self) -> list[tuple[str, str, str]]:
        return [(p.query_id, p.doc_id, p.label) for p in self.pairs]


@dataclass(frozen=True)
class MissedQuerySet:
    query_ids: frozenset[str]
    defined_by: str  # "gold-based" | "empty-prediction"


def _pairs_for_query(
    qid: str,
    ranked: list[tuple[str, float]],
    gold_set: set[str],
    n_neg: int,
    round: int,
    provenance: str,
) -> list[TrainingPair]:
    out = [
        TrainingPair(qid, did, "positive", round, provenance) for did in sorted(gold_set)
    ]
    negatives = [did for did, _ in ranked if did not in gold_set][:n_neg]
    out.extend(TrainingPair(qid, did, "negative", round, provenance) for did in negatives)
    return out


def mine_negatives_round1(
    queries: list[Query],
    gold: GoldLabels,
    index: InvertedIndex | dict[str, InvertedIndex],
    n_neg: int = 10,
    params: Bm25Params = Bm25Params(),
) -> TrainingPairSet:
    """Gold positives plus the top n_neg non-gold candidates by BM25.

    `index` is either one index over the shared document corpus or a
    per-query map of candidate-pool indexes (case entailment). Queries with
    no candidate pool are skipped and recorded in `skipped`.
    """
    pairs: list[TrainingPair] = []
    skipped: list[str] = []
    for q in sorted(queries, key=lambda q: q.id):
        idx = index.get(q.id) if isinstance(index, dict) else index
        if idx is None:
            skipped.append(f"{q.id}: no candidate pool")
            continue
        ranked = retrieve_top_k(idx, q.text, k=idx.N, params=params)
        pairs.extend(_pairs_for_query(q.id, ranked, gold.get(q.id, set()), n_neg, 1, "bm25"))
    return TrainingPairSet(pairs=pairs, skipped=skipped)


def mine_negatives_round2(
    query_ids: list[str],
    gold: GoldLabels,
    matrix: ScoreMatrix,
    checkpoint_id: str,
    n_neg: int = 10,
) -> TrainingPairSet:
    """Round-one shape, but negatives ranked by a fine-tuned checkpoint's scores."""
    if checkpoint_id not in matrix.checkpoints:
        raise NotFoundError(f"unknown checkpoint {checkpoint_id!r}")
    pairs: list[TrainingPair] = []
    for qid in sorted(query_ids):
        try:
            ranked = matrix.ranked(checkpoint_id, qid)
        except NotFoundError as exc:
            raise CompletenessError(str(exc)) from exc
        pairs.extend(_pairs_for_query(qid, ranked, gold.get(qid, set()), n_neg, 2, "model"))
    return TrainingPairSet(pairs=pairs)


def find_missed_queries(
    predictions: PredictionSet, gold: GoldLabels | None = None
) -> MissedQuerySet:
    """Queries a model missed: no overlap with gold, or (without gold) an
    empty prediction."""
    if gold is not None:
        missed = frozenset(
            qid for qid in predictions
            if qid in gold and not (set(predictions[qid]) & gold[qid])
        )
        return MissedQuerySet(query_ids=missed, defined_by="gold-based")
    missed = frozenset(qid for qid, docs in predictions.items() if not docs)
    return MissedQuerySet(query_ids=missed, defined_by="empty-prediction")


def nearest_train_queries(
    missed_qid: str,
    embeddings: EmbeddingStore,
    train_queries: list[Query],
    n_near: int,
) -> list[str]:
    """Top n_near training queries by embedding cosine, excluding the query itself."""
    anchor = embeddings.get(missed_qid)
    scored = []
    for q in train_queries:
        if q.id == missed_qid:
            continue
        scored.append((q.id, embedding_cosine(anchor, embeddings.get(q.id))))
    scored.sort(key=lambda x: (-x[1], x[0]))
    return [qid for qid, _ in scored[:n_near]]


def build_datflt_q(
    missed: MissedQuerySet,
    embeddings: EmbeddingStore,
    train_queries: list[Query],
    gold: GoldLabels,
    index: InvertedIndex | dict[str, InvertedIndex] | None = None,
    n_near: int = 10,
    n_neg: int = 10,
    matrix: ScoreMatrix | None = None,
    checkpoint_id: str | None = None,
    params: Bm25Params = Bm25Params(),
) -> TrainingPairSet:
    """Recovery training set: for every missed query, take its n_near nearest
    training questions and emit their gold positives plus hard negatives.

    Negatives come from BM25 over `index` by default, or from
    (`matrix`, `checkpoint_id`) when both are given. Shared neighbors are
    emitted once.
    """
    by_id = {q.id: q for q in train_queries}
    neighbor_ids: set[str] = set()
    for missed_qid in sorted(missed.query_ids):
        neighbor_ids.update(
            nearest_train_queries(missed_qid, embeddings, train_queries, n_near)
        )

    use_model = matrix is not None and checkpoint_id is not None
    if not use_model and index is None:
        raise CompletenessError("datflt-q needs either an index or (matrix, checkpoint_id)")

    pairs: list[TrainingPair] = []
    seen: set[tuple[str, str]] = set()
    skipped: list[str] = []
    for qid in sorted(neighbor_ids):
        if use_model:
            try:
                ranked = matrix.ranked(checkpoint_id, qid)
            except NotFoundError as exc:
                raise CompletenessError(str(exc)) from exc
            round_no = 2
        else:
            idx = index.get(qid) if isinstance(index, dict) else index
            if idx is None:
                skipped.append(f"{qid}: no candidate pool")
                continue
            ranked = retrieve_top_k(idx, by_id[qid].text, k=idx.N, params=params)
            round_no = 1
        for p in _pairs_for_query(qid, ranked, gold.get(qid, set()), n_neg, round_no, "datflt-q"):
            key = (p.query_id, p.doc_id)
            if key not in seen:
                seen.add(key)
                pairs.append(p)
    return TrainingPairSet(pairs=pairs, skipped=skipped)


def build_datflt_a(
    query_ids: list[str],
    gold: GoldLabels,
    matrix: ScoreMatrix,
    checkpoint_id: str,
    n_neg: int = 10,
) -> TrainingPairSet:
    """Bootstrap set: negatives are the best model's own top-ranked non-gold
    articles, the hardest ones it confuses with the answers."""
    if checkpoint_id not in matrix.checkpoints:
        raise NotFoundError(f"unknown checkpoint {checkpoint_id!r}")
    pairs: list[TrainingPair] = []
    for qid in sorted(query_ids):
        try:
            ranked = matrix.ranked(checkpoint_id, qid)
        except NotFoundError as exc:
            raise CompletenessError(str(exc)) from exc
        pairs.extend(_pairs_for_query(qid, ranked, gold.get(qid, set()), n_neg, 2, "datflt-a"))
    return TrainingPairSet(pairs=pairs)


def check_label_consistency(pairs: TrainingPairSet, gold: GoldLabels) -> None:
    """label == positive must hold exactly for pairs present in gold."""
    for p in pairs.pairs:
        in_gold = p.query_id in gold and p.doc_id in gold[p.query_id]
        if (p.label == "positive") != in_gold:
            raise IntegrityError(
                f"label inconsistency for ({p.query_id!r}, {p.doc_id!r}): "
                f"label={p.label} in_gold={in_gold}"
            )


def save_pairs(pairs: TrainingPairSet, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for p in pairs.pairs:
            rec = {
                "query_id": p.query_id,
                "doc_id": p.doc_id,
                "label": p.label,
                "round": p.round,
                "provenance": p.provenance,
            }
            fh.write(json.dumps(rec, sort_keys=True, ensure_ascii=False) + "\n")


def load_pairs(path) -> TrainingPairSet:
    p = Path(path)
    pairs = []
    for lineno, line in enumerate(open(p, encoding="utf-8"), 1):
        if not line.strip():
            continue
        try:
            obj = json.loads(line)
            pairs.append(
                TrainingPair(
                    query_id=obj["query_id"],
                    doc_id=obj["doc_id"],
                    label=obj["label"],
                    round=int(obj["round"]),
                    provenance=obj["provenance"],
                )
            )
        except (json.JSONDecodeError, KeyError, TypeError) as exc:
            raise ParseError(f"bad pair record: {exc}", path=p, line=lineno) from exc
    return TrainingPairSet(pairs=pairs)
