"""Checkpoint-score ensembling: weighted combination, weight grid search,
and the main-auxiliary prediction merge.

Each checkpoint gets a raw weight in [0, 1]; effective weights are the raw
weights normalized by their sum. The grid search walks every point of
{0, step, 2*step, ..., 1}^h except the all-zero corner and keeps the point
with the best validation metric (ties go to the lexicographically smallest
raw vector). The main-auxiliary merge leaves every non-missed query alone
and unions auxiliary predictions into the missed ones.
"""

from __future__ import annotations

import itertools
import json
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path

from .errors import ConfigError, EmptyInputError, ValidationError
from .mining import MissedQuerySet
from .predict import PredictionSet, SelectionRule, rank_scores
from .scores import ScoreMatrix


@dataclass(frozen=True)
class WeightVector:
    raw: dict[str, float]

    def __post_init__(self):
        if not self.raw:
            raise ValidationError("weight vector must not be empty")
        for ckpt, w in self.raw.items():
            if not 0.0 <= w <= 1.0:
                raise ValidationError(f"raw weight for {ckpt!r} must be in [0, 1], got {w}")
        if not any(w > 0 for w in self.raw.values()):
            raise ValidationError("at least one raw weight must be > 0")

    def normalized(self) -> dict[str, float]:
        total = sum(self.raw.values())
        return {ckpt: w / total for ckpt, w in self.raw.items()}


@dataclass(frozen=True)
class EnsembleConfig:
    grid_step: float = 0.25
    metric: str = "micro-f1"  # "micro-f1" | "macro-f2"
    h: int = 5

    def __post_init__(self):
        if not 0.0 < self.grid_step <= 1.0:
            raise ValidationError("grid_step must be in (0, 1]")
        if self.metric not in ("micro-f1", "macro-f2"):
            raise ValidationError(f"unknown ensemble metric {self.metric!r}")
        if self.h < 1:
            raise ValidationError("h must be >= 1")


def weighted_scores(matrix: ScoreMatrix, w: WeightVector) -> dict[tuple[str, str], float]:
    """combined(q, d) = sum_i normalized_w_i * score_i(q, d)."""
    for ckpt in matrix.checkpoints:
        if ckpt not in w.raw:
            raise ConfigError(f"weight vector missing checkpoint {ckpt!r}")
    norm = w.normalized()
    combined: dict[tuple[str, str], float] = {}
    for qid in matrix.query_ids:
        for did in matrix.candidates(qid):
            combined[(qid, did)] = sum(
                norm[ckpt] * matrix.entries[(ckpt, qid, did)] for ckpt in matrix.checkpoints
            )
    return combined


def _grid_values(step: float) -> list[float]:
    vals = []
    i = 0
    while i * step <= 1.0 + 1e-9:
        vals.append(round(min(i * step, 1.0), 12))
        i += 1
    if vals[-1] < 1.0 - 1e-9:
        vals.append(1.0)
    return vals


def _metric_fn(name: str):
    from . import metrics

    return metrics.micro_f1 if name == "micro-f1" else metrics.macro_f2_value


def grid_search_weights(
    matrix: ScoreMatrix,
    validation_gold: dict[str, set[str]],
    cfg: EnsembleConfig,
    selection_rule: SelectionRule,
    jobs: int = 1,
) -> tuple[WeightVector, float]:
    """Exhaustive search for the raw-weight grid point maximizing the metric.

    Evaluation is per grid point and may run on several workers; the argmax
    reduction is deterministic (strictly-greater comparison over points
    enumerated in lexicographic order).
    """
    if not validation_gold:
        raise EmptyInputError("validation gold is empty")
    ckpts = list(matrix.checkpoints)
    if len(ckpts) != cfg.h:
        raise ConfigError(f"config h={cfg.h} but matrix has {len(ckpts)} checkpoints")
    for qid in validation_gold:
        if qid not in matrix.query_ids:
            raise ConfigError(f"matrix does not cover validation query {qid!r}")
    metric = _metric_fn(cfg.metric)

    def evaluate(point: tuple[float, ...]) -> float:
        w = WeightVector(raw=dict(zip(ckpts, point)))
        ranked = rank_scores(weighted_scores(matrix, w))
        preds = {qid: selection_rule.apply(ranked[qid]) for qid in sorted(validation_gold)}
        return metric(preds, validation_gold)

    points = [
        p for p in itertools.product(_grid_values(cfg.grid_step), repeat=len(ckpts))
        if any(x > 0 for x in p)
    ]
    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            values = list(pool.map(evaluate, points))
    else:
        values = [evaluate(p) for p in points]

    best_point, best_value = points[0], values[0]
    for point, value in zip(points[1:], values[1:]):
        if value > best_value:
            best_point, best_value = point, value
    return WeightVector(raw=dict(zip(ckpts, best_point))), best_value


def main_auxiliary_merge(
    main_preds: PredictionSet,
    aux_preds_list: list[PredictionSet],
    missed: MissedQuerySet,
) -> PredictionSet:
    """Keep the main model's predictions except for missed queries, which get
    the union of every auxiliary prediction plus the main one (ascending ids).
    """
    for aux in aux_preds_list:
        if set(aux) != set(main_preds):
            raise ValidationError("auxiliary predictions must cover the same query set")
    merged: PredictionSet = {}
    for qid, docs in main_preds.items():
        if qid in missed.query_ids:
            union = set(docs)
            for aux in aux_preds_list:
                union.update(aux[qid])
            merged[qid] = sorted(union)
        else:
            merged[qid] = list(docs)
    return merged


def save_ensemble(w: WeightVector, metric: str, value: float, grid_step: float, path) -> None:
    payload = {
        "weights": dict(sorted(w.raw.items())),
        "metric": metric,
        "value": value,
        "grid_step": grid_step,
    }
    Path(path).write_text(json.dumps(payload, sort_keys=True) + "\n", encoding="utf-8")


def load_ensemble(path) -> tuple[WeightVector, str, float, float]:
    obj = json.loads(Path(path).read_text(encoding="utf-8"))
    return (
        WeightVector(raw=dict(obj["weights"])),
        obj["metric"],
        float(obj["value"]),
        float(obj["grid_step"]),
    )
