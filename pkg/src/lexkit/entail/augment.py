"""Masked-template data augmentation.

A template masks a seeded-random subset of a query's tokens; the bridge
fills each mask with top-k candidates from a masked language model, and
realization substitutes a seeded-uniform choice among them. Every random
draw is keyed by (seed, template id, mask index) so whole corpora rebuild
byte-identically.
"""

from __future__ import annotations

import hashlib
import json
import random
from dataclasses import dataclass
from pathlib import Path

from ..corpus import Query
from ..errors import NotFoundError, ParseError, ValidationError

MASK = "[MASK]"


def stable_seed(*parts) -> int:
    """Process-independent integer seed derived from the parts' repr."""
    digest = hashlib.sha256("|".join(repr(p) for p in parts).encode("utf-8")).digest()
    return int.from_bytes(digest[:8], "big")


def _round_half_up(x: float) -> int:
    return int(x + 0.5)


def mask_count(mask_ratio: float, n_tokens: int) -> int:
    return max(1, _round_half_up(mask_ratio * n_tokens))


def template_tokens(text: str) -> list[str]:
    """Whitespace tokens; texts without whitespace fall back to characters."""
    tokens = text.split()
    if len(tokens) <= 1 and len(text.strip()) > 1:
        return list(text.strip())
    return tokens


@dataclass(frozen=True)
class AugTemplate:
    template_id: str
    query_id: str
    tokens: tuple[str, ...]  # original tokens with MASK sentinels substituted
    mask_ratio: float
    seed: int
    top_k_fill: int
    masked_positions: tuple[int, ...]

    def __post_init__(self):
        if not 0.0 < self.mask_ratio < 1.0:
            raise ValidationError("mask_ratio must be in (0, 1)")
        if self.top_k_fill < 1:
            raise ValidationError("top_k_fill must be >= 1")
        expected = mask_count(self.mask_ratio, len(self.tokens))
        if len(self.masked_positions) != expected:
            raise ValidationError(
                f"template {self.template_id!r}: {len(self.masked_positions)} masks, "
                f"expected {expected}"
            )
        for pos in self.masked_positions:
            if not 0 <= pos < len(self.tokens) or self.tokens[pos] != MASK:
                raise ValidationError(
                    f"template {self.template_id!r}: position {pos} is not a mask"
                )

    @property
    def n_masks(self) -> int:
        return len(self.masked_positions)


@dataclass(frozen=True)
class AugmentedExample:
    template_id: str
    query_id: str
    text: str
    article_texts: tuple[str, ...]


def make_masked_templates(
    query: Query, mask_ratio: float, seed: int, top_k_fill: int = 5
) -> AugTemplate:
    """Mask max(1, round(ratio * n)) distinct seeded-random token positions."""
    tokens = template_tokens(query.text)
    if not tokens:
        raise ValidationError(f"query {query.id!r} has no tokens to mask")
    rng = random.Random(stable_seed(seed, query.id))
    n_masks = min(mask_count(mask_ratio, len(tokens)), len(tokens))
    positions = tuple(sorted(rng.sample(range(len(tokens)), n_masks)))
    masked = list(tokens)
    for pos in positions:
        masked[pos] = MASK
    return AugTemplate(
        template_id=f"{query.id}-s{seed}",
        query_id=query.id,
        tokens=tuple(masked),
        mask_ratio=mask_ratio,
        seed=seed,
        top_k_fill=top_k_fill,
        masked_positions=positions,
    )


def realize_augmented(
    template: AugTemplate,
    fills: dict[tuple[str, int], list[tuple[str, float]]],
    seed: int,
    article_texts: list[str] = (),
) -> AugmentedExample:
    """Replace each mask with a seeded-uniform pick among its top-k fills."""
    tokens = list(template.tokens)
    for mask_index, pos in enumerate(template.masked_positions):
        key = (template.template_id, mask_index)
        if key not in fills or not fills[key]:
            raise NotFoundError(
                f"no fill candidates for template {template.template_id!r} "
                f"mask {mask_index}"
            )
        top = fills[key][: template.top_k_fill]
        rng = random.Random(stable_seed(seed, template.template_id, mask_index))
        tokens[pos] = top[rng.randrange(len(top))][0]
    return AugmentedExample(
        template_id=template.template_id,
        query_id=template.query_id,
        text=" ".join(tokens),
        article_texts=tuple(article_texts),
    )


# ---------------------------------------------------------------------------
# templates.jsonl / augmented.jsonl
# ---------------------------------------------------------------------------


def save_templates(templates: list[AugTemplate], path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for t in templates:
            rec = {
                "template_id": t.template_id,
                "query_id": t.query_id,
                "tokens": list(t.tokens),
                "mask_ratio": t.mask_ratio,
                "seed": t.seed,
                "top_k_fill": t.top_k_fill,
                "masked_positions": list(t.masked_positions),
            }
            fh.write(json.dumps(rec, sort_keys=True, ensure_ascii=False) + "\n")


def load_templates(path) -> list[AugTemplate]:
    p = Path(path)
    out = []
    for lineno, line in enumerate(open(p, encoding="utf-8"), 1):
        if not line.strip():
            continue
        try:
            obj = json.loads(line)
            out.append(
                AugTemplate(
                    template_id=obj["template_id"],
                    query_id=obj["query_id"],
                    tokens=tuple(obj["tokens"]),
                    mask_ratio=float(obj["mask_ratio"]),
                    seed=int(obj["seed"]),
                    top_k_fill=int(obj["top_k_fill"]),
                    masked_positions=tuple(obj["masked_positions"]),
                )
            )
        except (json.JSONDecodeError, KeyError, TypeError) as exc:
            raise ParseError(f"bad template record: {exc}", path=p, line=lineno) from exc
    return out


def save_augmented(examples: list[AugmentedExample], path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for ex in examples:
            rec = {
                "template_id": ex.template_id,
                "query_id": ex.query_id,
                "text": ex.text,
                "articles": list(ex.article_texts),
            }
            fh.write(json.dumps(rec, sort_keys=True, ensure_ascii=False) + "\n")
