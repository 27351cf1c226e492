"""Selection rules that turn ranked scores into final prediction sets.

Two rules are provided: top-k + margin (case entailment: the top candidate is
always kept and near-ties within margin m join it) and an absolute threshold
(statute retrieval: empty outputs are possible, which is what makes "missed"
queries observable downstream).
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

from .errors import EmptyInputError, ParseError, ValidationError

# query_id -> ordered list of selected doc ids (score descending)
PredictionSet = dict[str, list[str]]

Ranked = list[tuple[str, float]]


@dataclass(frozen=True)
class SelectionRule:
    kind: str  # "topk-margin" | "threshold"
    k: int | None = None
    m: float | None = None
    t: float | None = None

    def __post_init__(self):
        if self.kind == "topk-margin":
            if self.k is None or self.m is None or self.t is not None:
                raise ValidationError("topk-margin rule needs exactly k and m")
            if self.k < 1:
                raise ValidationError("k must be >= 1")
            if self.m < 0:
                raise ValidationError("m must be >= 0")
        elif self.kind == "threshold":
            if self.t is None or self.k is not None or self.m is not None:
                raise ValidationError("threshold rule needs exactly t")
        else:
            raise ValidationError(f"unknown selection rule kind {self.kind!r}")

    def apply(self, ranked: Ranked) -> list[str]:
        if self.kind == "topk-margin":
            return select_topk_margin(ranked, self.k, self.m)
        return select_threshold(ranked, self.t)


def _check_sorted(ranked: Ranked):
    for (_, a), (_, b) in zip(ranked, ranked[1:]):
        if b > a:
            raise ValidationError("ranked list must be sorted by score descending")


def select_topk_margin(ranked: Ranked, k: int, m: float) -> list[str]:
    """Keep the top candidate plus any rank <= k candidate within margin m.

    The margin test is strict (gap < m), so m = 0 selects exactly the top-1.
    """
    if not ranked:
        raise EmptyInputError("cannot select from an empty ranked list")
    if k < 1:
        raise ValidationError("k must be >= 1")
    if m < 0:
        raise ValidationError("m must be >= 0")
    _check_sorted(ranked)
    top_score = ranked[0][1]
    selected = [ranked[0][0]]
    for did, score in ranked[1:k]:
        if top_score - score < m:
            selected.append(did)
    return selected


def select_threshold(ranked: Ranked, t: float) -> list[str]:
    """All candidates scoring >= t; may be empty."""
    _check_sorted(ranked)
    return [did for did, score in ranked if score >= t]


def search_k_m(
    ranked_by_query: dict[str, Ranked],
    gold: dict[str, set[str]],
    k_range: list[int],
    m_grid: list[float],
    metric,
) -> tuple[int, float, float]:
    """Grid-search (k, m) maximizing `metric(predictions, gold)` on validation.

    `metric` maps (PredictionSet, gold) -> float. Ties resolve to the
    smallest k, then the smallest m.
    """
    if not k_range or not m_grid:
        raise EmptyInputError("k_range and m_grid must be nonempty")
    if not gold:
        raise EmptyInputError("validation gold is empty")
    for qid in gold:
        if qid not in ranked_by_query:
            raise ValidationError(f"no ranked scores for validation query {qid!r}")
    best = None
    for k in sorted(k_range):
        for m in sorted(m_grid):
            preds = {
                qid: select_topk_margin(ranked_by_query[qid], k, m) for qid in sorted(gold)
            }
            value = metric(preds, gold)
            if best is None or value > best[2]:
                best = (k, m, value)
    return best


def rank_scores(combined: dict[tuple[str, str], float]) -> dict[str, Ranked]:
    """Group (query, doc) -> score pairs into per-query ranked lists."""
    per_query: dict[str, list[tuple[str, float]]] = {}
    for (qid, did), score in combined.items():
        per_query.setdefault(qid, []).append((did, score))
    return {
        qid: sorted(rows, key=lambda x: (-x[1], x[0])) for qid, rows in per_query.items()
    }


# ---------------------------------------------------------------------------
# files
# ---------------------------------------------------------------------------


def save_predictions(preds: PredictionSet, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for qid in sorted(preds):
            rec = {"query_id": qid, "docs": list(preds[qid])}
            fh.write(json.dumps(rec, sort_keys=True, ensure_ascii=False) + "\n")


def load_predictions(path) -> PredictionSet:
    p = Path(path)
    preds: PredictionSet = {}
    for lineno, line in enumerate(open(p, encoding="utf-8"), 1):
        if not line.strip():
            continue
        try:
            obj = json.loads(line)
            qid, docs = obj["query_id"], list(obj["docs"])
        except (json.JSONDecodeError, KeyError, TypeError) as exc:
            raise ParseError(f"bad prediction record: {exc}", path=p, line=lineno) from exc
        if qid in preds:
            raise ParseError(f"duplicate query_id {qid!r}", path=p, line=lineno)
        if len(set(docs)) != len(docs):
            raise ValidationError(f"prediction for {qid!r} contains duplicate docs")
        preds[qid] = docs
    return preds


def save_rule(rule: SelectionRule, path) -> None:
    payload = {"kind": rule.kind}
    if rule.kind == "topk-margin":
        payload.update({"k": rule.k, "m": rule.m})
    else:
        payload["t"] = rule.t
    Path(path).write_text(json.dumps(payload, sort_keys=True) + "\n", encoding="utf-8")


def load_rule(path) -> SelectionRule:
    obj = json.loads(Path(path).read_text(encoding="utf-8"))
    return SelectionRule(kind=obj["kind"], k=obj.get("k"), m=obj.get("m"), t=obj.get("t"))
