"""Linear SVM on TfIdf features, trained with seeded Pegasos-style
stochastic subgradient descent on the hinge loss.

The returned model is the averaged iterate; if an averaging run ever ends
worse than the trivial zero model on its own training objective, the zero
model is returned instead, so `objective(model) <= objective(0)` holds
unconditionally.
"""

from __future__ import annotations

import json
import math
import random
from collections import Counter
from dataclasses import dataclass
from pathlib import Path

from ..errors import TrainingError, ValidationError
from ..lexical import Tokenizer

LABELS = ("YES", "NO")


@dataclass(frozen=True)
class SvmModel:
    weights: dict[str, float]
    bias: float
    lam: float
    epochs: int
    seed: int
    idf: dict[str, float]
    default_idf: float
    tokenizer_mode: str

    def __post_init__(self):
        if self.lam <= 0:
            raise ValidationError("lambda must be > 0")
        for term, w in self.weights.items():
            if not math.isfinite(w):
                raise ValidationError(f"non-finite weight for term {term!r}")
        if not math.isfinite(self.bias):
            raise ValidationError("non-finite bias")

    def tokenizer(self) -> Tokenizer:
        return Tokenizer(mode=self.tokenizer_mode)


def svm_example_text(query_text: str, article_text: str) -> str:
    """Feature text: the query concatenated with its matched article."""
    return f"{query_text} {article_text}"


def _featurize(
    text: str, tokenizer: Tokenizer, idf: dict[str, float], default_idf: float
) -> dict[str, float]:
    counts = Counter(tokenizer.tokenize(text))
    vec = {t: tf * idf.get(t, default_idf) for t, tf in counts.items()}
    norm = math.sqrt(sum(w * w for w in vec.values()))
    return {t: w / norm for t, w in vec.items()} if norm else {}


def _dot(w: dict[str, float], x: dict[str, float]) -> float:
    return sum(w.get(t, 0.0) * v for t, v in sorted(x.items()))


def _objective(
    w: dict[str, float], b: float, xs: list[dict[str, float]], ys: list[int], lam: float
) -> float:
    """Regularized hinge; the bias is trained as an augmented feature, so it
    is regularized too."""
    reg = 0.5 * lam * (sum(v * v for v in w.values()) + b * b)
    hinge = sum(max(0.0, 1.0 - y * (_dot(w, x) + b)) for x, y in zip(xs, ys))
    return reg + hinge / len(xs)


def svm_train(
    examples: list[tuple[str, str]],
    tokenizer: Tokenizer,
    lam: float = 0.01,
    epochs: int = 20,
    seed: int = 0,
) -> SvmModel:
    """Train on (text, label) examples; labels are YES/NO and both must occur."""
    if lam <= 0:
        raise ValidationError("lambda must be > 0")
    if epochs < 1:
        raise ValidationError("epochs must be >= 1")
    labels = {label for _, label in examples}
    if not labels <= set(LABELS):
        raise ValidationError(f"labels must be YES/NO, got {sorted(labels)}")
    if len(labels) < 2:
        raise TrainingError("training data must contain both YES and NO examples")

    texts = [text for text, _ in examples]
    n = len(texts)
    df = Counter()
    for text in texts:
        df.update(set(tokenizer.tokenize(text)))
    idf = {t: math.log((n + 1.0) / (c + 1.0)) + 1.0 for t, c in df.items()}
    default_idf = math.log(n + 1.0) + 1.0

    # Bias as an augmented constant feature: plain Pegasos with the optional
    # projection onto the 1/sqrt(lam) ball then applies as published.
    bias_key = "\x00bias"
    xs = [_featurize(t, tokenizer, idf, default_idf) for t in texts]
    aug = [dict(x, **{bias_key: 1.0}) for x in xs]
    ys = [1 if label == "YES" else -1 for _, label in examples]

    rng = random.Random(seed)
    w: dict[str, float] = {}
    w_sum: dict[str, float] = {}
    radius = 1.0 / math.sqrt(lam)
    total = epochs * n
    for t in range(1, total + 1):
        i = rng.randrange(n)
        eta = 1.0 / (lam * t)
        margin = ys[i] * _dot(w, aug[i])
        decay = 1.0 - eta * lam
        for term in list(w):
            w[term] *= decay
        if margin < 1.0:
            for term, v in aug[i].items():
                w[term] = w.get(term, 0.0) + eta * ys[i] * v
        norm = math.sqrt(sum(v * v for v in w.values()))
        if norm > radius:
            scale = radius / norm
            for term in w:
                w[term] *= scale
        for term, v in w.items():
            w_sum[term] = w_sum.get(term, 0.0) + v

    w_avg = {t: v / total for t, v in w_sum.items()}
    b_avg = w_avg.pop(bias_key, 0.0)
    if _objective(w_avg, b_avg, xs, ys, lam) > _objective({}, 0.0, xs, ys, lam):
        w_avg, b_avg = {}, 0.0

    return SvmModel(
        weights={t: v for t, v in sorted(w_avg.items()) if v != 0.0},
        bias=b_avg,
        lam=lam,
        epochs=epochs,
        seed=seed,
        idf=dict(sorted(idf.items())),
        default_idf=default_idf,
        tokenizer_mode=tokenizer.mode,
    )


def svm_predict(model: SvmModel, query_text: str, article_text: str) -> tuple[str, float]:
    """Signed-margin prediction; a non-negative margin answers YES."""
    x = _featurize(
        svm_example_text(query_text, article_text),
        model.tokenizer(),
        model.idf,
        model.default_idf,
    )
    margin = _dot(model.weights, x) + model.bias
    return ("YES" if margin >= 0 else "NO"), margin


def svm_training_accuracy(model: SvmModel, examples: list[tuple[str, str]]) -> float:
    correct = 0
    for text, label in examples:
        x = _featurize(text, model.tokenizer(), model.idf, model.default_idf)
        pred = "YES" if (_dot(model.weights, x) + model.bias) >= 0 else "NO"
        correct += pred == label
    return correct / len(examples)


def save_svm(model: SvmModel, path) -> None:
    payload = {
        "weights": model.weights,
        "bias": model.bias,
        "lambda": model.lam,
        "epochs": model.epochs,
        "seed": model.seed,
        "idf": model.idf,
        "default_idf": model.default_idf,
        "tokenizer_mode": model.tokenizer_mode,
    }
    Path(path).write_text(
        json.dumps(payload, sort_keys=True, ensure_ascii=False) + "\n", encoding="utf-8"
    )


def load_svm(path) -> SvmModel:
    obj = json.loads(Path(path).read_text(encoding="utf-8"))
    return SvmModel(
        weights={t: float(v) for t, v in obj["weights"].items()},
        bias=float(obj["bias"]),
        lam=float(obj["lambda"]),
        epochs=int(obj["epochs"]),
        seed=int(obj["seed"]),
        idf={t: float(v) for t, v in obj["idf"].items()},
        default_idf=float(obj["default_idf"]),
        tokenizer_mode=obj["tokenizer_mode"],
    )
