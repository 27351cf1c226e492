"""Retrieval and entailment evaluation metrics.

Precision/recall/F1 are micro-averaged over all queries (single pooled
count), F2 is macro-averaged per query with the recall-weighted formula
5PR / (4P + R). Average precision uses |gold| as the denominator, so a
truncated ranking is penalized for gold items it never returns.
"""

from __future__ import annotations

import json
import warnings
from dataclasses import dataclass, field
from pathlib import Path

from .errors import EmptyInputError, ValidationError


def _check_same_queries(predictions: dict, gold: dict):
    missing = sorted(set(gold) - set(predictions))
    extra = sorted(set(predictions) - set(gold))
    if missing or extra:
        raise ValidationError(
            f"prediction/gold query sets differ (missing={missing}, extra={extra})"
        )


def micro_prf(predictions: dict[str, list[str]], gold: dict[str, set[str]]) -> tuple[float, float, float]:
    """Pooled precision, recall and F1 over all queries."""
    _check_same_queries(predictions, gold)
    tp = retrieved = relevant = 0
    for qid in sorted(gold):
        pred = set(predictions[qid])
        gset = set(gold[qid])
        tp += len(pred & gset)
        retrieved += len(pred)
        relevant += len(gset)
    p = tp / retrieved if retrieved else 0.0
    r = tp / relevant if relevant else 0.0
    f1 = 2 * p * r / (p + r) if (p + r) > 0 else 0.0
    return p, r, f1


def micro_f1(predictions: dict[str, list[str]], gold: dict[str, set[str]]) -> float:
    return micro_prf(predictions, gold)[2]


def macro_f2(predictions: dict[str, list[str]], gold: dict[str, set[str]]) -> tuple[float, float, float]:
    """Per-query F2 = 5PR / (4P + R), averaged; returns (F2, P, R) means."""
    _check_same_queries(predictions, gold)
    if not gold:
        raise EmptyInputError("cannot evaluate an empty query set")
    f2s, ps, rs = [], [], []
    for qid in sorted(gold):
        pred = set(predictions[qid])
        gset = set(gold[qid])
        tp = len(pred & gset)
        p = tp / len(pred) if pred else 0.0
        r = tp / len(gset) if gset else 0.0
        denom = 4 * p + r
        f2s.append(5 * p * r / denom if denom > 0 else 0.0)
        ps.append(p)
        rs.append(r)
    n = len(f2s)
    return sum(f2s) / n, sum(ps) / n, sum(rs) / n


def macro_f2_value(predictions: dict[str, list[str]], gold: dict[str, set[str]]) -> float:
    return macro_f2(predictions, gold)[0]


def map_score(ranked: dict[str, list[str]], gold: dict[str, set[str]]) -> float:
    """Mean average precision; AP = sum of precision-at-hit / |gold|."""
    _check_same_queries(ranked, gold)
    if not gold:
        raise EmptyInputError("cannot evaluate an empty query set")
    total = 0.0
    for qid in sorted(gold):
        gset = set(gold[qid])
        hits = 0
        ap = 0.0
        for rank, did in enumerate(ranked[qid], 1):
            if did in gset:
                hits += 1
                ap += hits / rank
        total += ap / len(gset) if gset else 0.0
    return total / len(gold)


def recall_at_k(ranked: dict[str, list[str]], gold: dict[str, set[str]], k: int) -> float:
    """Mean per-query fraction of gold found in the top k."""
    if k < 1:
        raise ValidationError("k must be >= 1")
    _check_same_queries(ranked, gold)
    if not gold:
        raise EmptyInputError("cannot evaluate an empty query set")
    total = 0.0
    for qid in sorted(gold):
        gset = set(gold[qid])
        top = set(ranked[qid][:k])
        total += len(top & gset) / len(gset) if gset else 0.0
    return total / len(gold)


def accuracy(answers: dict[str, str], gold_answers: dict[str, str]) -> float:
    """Fraction of exact YES/NO matches; a missing answer counts as wrong."""
    if not gold_answers:
        raise EmptyInputError("cannot evaluate an empty answer set")
    correct = 0
    for qid in sorted(gold_answers):
        if qid not in answers:
            warnings.warn(f"no answer for query {qid!r}; counted wrong", stacklevel=2)
            continue
        if answers[qid] == gold_answers[qid]:
            correct += 1
    return correct / len(gold_answers)


@dataclass
class MetricReport:
    micro_precision: float = 0.0
    micro_recall: float = 0.0
    micro_f1: float = 0.0
    macro_f2: float = 0.0
    macro_precision: float = 0.0
    macro_recall: float = 0.0
    map: float = 0.0
    recall_at: dict[int, float] = field(default_factory=dict)
    accuracy: float | None = None
    per_query: dict[str, dict[str, float]] = field(default_factory=dict)

    def __post_init__(self):
        for name in ("micro_precision", "micro_recall", "micro_f1",
                     "macro_f2", "macro_precision", "macro_recall", "map"):
            v = getattr(self, name)
            if not 0.0 <= v <= 1.0:
                raise ValidationError(f"{name}={v} outside [0, 1]")


def build_report(
    predictions: dict[str, list[str]],
    gold: dict[str, set[str]],
    ranked: dict[str, list[str]] | None = None,
    recall_ks: tuple[int, ...] = (5, 10, 30),
) -> MetricReport:
    """Evaluate everything computable from the given inputs."""
    p, r, f1 = micro_prf(predictions, gold)
    f2, mp, mr = macro_f2(predictions, gold)
    per_query = {}
    for qid in sorted(gold):
        pred = set(predictions[qid])
        gset = set(gold[qid])
        tp = len(pred & gset)
        qp = tp / len(pred) if pred else 0.0
        qr = tp / len(gset) if gset else 0.0
        denom = 4 * qp + qr
        per_query[qid] = {"precision": qp, "recall": qr,
                          "f2": 5 * qp * qr / denom if denom > 0 else 0.0}
    report = MetricReport(
        micro_precision=p, micro_recall=r, micro_f1=f1,
        macro_f2=f2, macro_precision=mp, macro_recall=mr,
        per_query=per_query,
    )
    if ranked is not None:
        report.map = map_score(ranked, gold)
        report.recall_at = {k: recall_at_k(ranked, gold, k) for k in recall_ks}
    return report


def save_report(report: MetricReport, path) -> None:
    payload = {
        "micro_precision": report.micro_precision,
        "micro_recall": report.micro_recall,
        "micro_f1": report.micro_f1,
        "macro_f2": report.macro_f2,
        "macro_precision": report.macro_precision,
        "macro_recall": report.macro_recall,
        "map": report.map,
        "recall_at": {str(k): v for k, v in sorted(report.recall_at.items())},
        "accuracy": report.accuracy,
        "per_query": report.per_query,
    }
    Path(path).write_text(
        json.dumps(payload, sort_keys=True, indent=2) + "\n", encoding="utf-8"
    )


def format_report(report: MetricReport) -> str:
    """Human-readable summary table."""
    rows = [
        ("micro P / R / F1",
         f"{report.micro_precision:.4f} / {report.micro_recall:.4f} / {report.micro_f1:.4f}"),
        ("macro P / R / F2",
         f"{report.macro_precision:.4f} / {report.macro_recall:.4f} / {report.macro_f2:.4f}"),
    ]
    if report.map:
        rows.append(("MAP", f"{report.map:.4f}"))
    for k, v in sorted(report.recall_at.items()):
        rows.append((f"R@{k}", f"{v:.4f}"))
    if report.accuracy is not None:
        rows.append(("accuracy", f"{report.accuracy:.4f}"))
    width = max(len(name) for name, _ in rows)
    return "\n".join(f"{name:<{width}}  {val}" for name, val in rows)
