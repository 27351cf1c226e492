"""Query-kind detection and the rule/SVM answer routing.

Bar-exam queries about concrete parties name them with single capital
letters ("A sold a watch to B"). Those specific-scenario queries follow the
SVM's answer on disagreement; abstract (general) queries follow the
condition-statement engine.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass
from pathlib import Path

from ..corpus import Query, split_sentences
from ..errors import ParseError, ValidationError

_TOKEN_RE = re.compile(r"[^\W_]+", re.UNICODE)

ANSWERS = ("YES", "NO")


@dataclass(frozen=True)
class QueryKind:
    kind: str  # "specific-scenario" | "general"
    evidence: tuple[str, ...] = ()

    def __post_init__(self):
        if (self.kind == "specific-scenario") != bool(self.evidence):
            raise ValidationError("specific-scenario iff evidence nonempty")


def detect_query_kind(query: Query | str) -> QueryKind:
    """Specific-scenario iff the text names parties by standalone capital letters.

    'I' never counts. A sentence-initial 'A' followed by a lowercase word is
    the article, not a party, unless another party letter corroborates it.
    """
    text = query.text if isinstance(query, Query) else query
    firm: list[str] = []
    article_like: list[str] = []
    for sentence in split_sentences(text):
        tokens = _TOKEN_RE.findall(sentence)
        for j, tok in enumerate(tokens):
            if len(tok) != 1 or not tok.isupper() or tok == "I":
                continue
            initial_article = (
                tok == "A" and j == 0 and j + 1 < len(tokens) and tokens[j + 1][0].islower()
            )
            (article_like if initial_article else firm).append(tok)
    evidence: list[str] = []
    if firm:
        for tok in firm + article_like:
            if tok not in evidence:
                evidence.append(tok)
        evidence.sort()
    return QueryKind(
        kind="specific-scenario" if evidence else "general",
        evidence=tuple(evidence),
    )


def route_ensemble(cs_answer: str, svm_answer: str, kind: QueryKind) -> str:
    """Agreement wins; otherwise SVM decides specific scenarios, the
    condition-statement engine decides general questions."""
    for name, ans in (("condition-statement", cs_answer), ("svm", svm_answer)):
        if ans not in ANSWERS:
            raise ValidationError(f"{name} answer must be YES or NO, got {ans!r}")
    if cs_answer == svm_answer:
        return cs_answer
    return svm_answer if kind.kind == "specific-scenario" else cs_answer


# ---------------------------------------------------------------------------
# answers.jsonl
# ---------------------------------------------------------------------------


def save_answers(answers: list[dict], path) -> None:
    """Write answer records {"query_id","answer","method","matched_pair"}."""
    with open(path, "w", encoding="utf-8") as fh:
        for rec in answers:
            if rec.get("answer") not in ANSWERS:
                raise ValidationError(f"bad answer record {rec!r}")
            fh.write(json.dumps(rec, sort_keys=True, ensure_ascii=False) + "\n")


def load_answers(path) -> dict[str, str]:
    """Read answers.jsonl into a query_id -> YES/NO map."""
    p = Path(path)
    out: dict[str, str] = {}
    for lineno, line in enumerate(open(p, encoding="utf-8"), 1):
        if not line.strip():
            continue
        try:
            obj = json.loads(line)
            qid, ans = obj["query_id"], obj["answer"]
        except (json.JSONDecodeError, KeyError) as exc:
            raise ParseError(f"bad answer record: {exc}", path=p, line=lineno) from exc
        if ans not in ANSWERS:
            raise ValidationError(f"bad answer {ans!r} at {p}:{lineno}")
        if qid in out:
            raise ParseError(f"duplicate query_id {qid!r}", path=p, line=lineno)
        out[qid] = ans
    return out
