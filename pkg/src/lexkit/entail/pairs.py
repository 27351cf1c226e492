"""Condition-statement extraction from SRL annotations and the negation-parity
YES/NO inference.

A legal sentence asserts a statement under conditions. The statement is the
contiguous token span stretching over the main predicate and its core
(numbered) arguments; everything else in the sentence is condition
material. Exceptions introduced by "provided, however" either negate the
main statement (when they say the rule "does not apply") or contribute
their own statement.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass
from pathlib import Path

from ..corpus import Article, Query, split_sentences
from ..errors import EmptyInputError, ParseError, ValidationError
from ..lexical import InvertedIndex, Tokenizer, build_index, tfidf_cosine
from ..scores import SrlAnnotation

NEGATION_LEXICON_EN = frozenset(
    {"not", "no", "never", "cannot", "nothing", "neither", "nor", "without"}
)
NEGATION_SUBSTRINGS_JA = ("ない", "ず", "ぬ", "ません")

EXCEPTION_MARKER_EN = "provided, however"
EXCEPTION_MARKER_JA = "ただし"

APPLY_OVERRIDE_PHRASES = (("does", "not", "apply"), ("shall", "not", "apply"))

AUXILIARIES = frozenset(
    {"is", "are", "was", "were", "be", "been", "being", "am",
     "shall", "will", "would", "may", "might", "can", "could", "must",
     "do", "does", "did", "has", "have", "had"}
)

MASKABLE_PUNCT = {",", ".", ";", ":", "!", "?", "、", "。", "…"}

_POINT_MARKER = re.compile(r"^\s*\(\d+\)\s*")
_WORD_RE = re.compile(r"[^\W_]+", re.UNICODE)

_CORE_ROLE = re.compile(r"^(ARG|A)\d$", re.IGNORECASE)

VARIANTS = ("main", "exception-merged")


@dataclass(frozen=True)
class CondStatePair:
    source: tuple[str, int, str]  # (article_id, sentence_index, variant)
    condition: str
    statement: str
    condition_tokens: tuple[str, ...] = ()
    statement_tokens: tuple[str, ...] = ()
    degraded: bool = False

    def __post_init__(self):
        if not self.statement:
            raise ValidationError(f"pair {self.source}: statement must be nonempty")
        if self.source[2] not in VARIANTS:
            raise ValidationError(f"pair {self.source}: unknown variant")

    @property
    def source_id(self) -> str:
        return f"{self.source[0]}:{self.source[1]}:{self.source[2]}"


@dataclass(frozen=True)
class QueryDecomposition:
    condition: str  # every sentence but the last
    statement: str  # the last sentence

    def __post_init__(self):
        if not self.statement:
            raise ValidationError("query statement must be nonempty")


def sentence_id(article_id: str, index: int) -> str:
    return f"{article_id}:{index}"


def strip_point_marker(sentence: str) -> str:
    """Drop a leading enumeration marker like '(1) '."""
    return _POINT_MARKER.sub("", sentence)


def detokenize(tokens) -> str:
    """Join tokens with spaces, attaching punctuation and clitics."""
    out: list[str] = []
    for tok in tokens:
        if out and (tok in MASKABLE_PUNCT or tok.startswith("'") or tok == "n't"):
            out[-1] = out[-1] + tok
        else:
            out.append(tok)
    return " ".join(out)


def _strip_boundary_punct(tokens: list[str]) -> list[str]:
    start, end = 0, len(tokens)
    while start < end and tokens[start] in MASKABLE_PUNCT:
        start += 1
    while end > start and tokens[end - 1] in MASKABLE_PUNCT:
        end -= 1
    return tokens[start:end]


def _segments(indices: list[int]) -> list[list[int]]:
    """Group sorted indices into contiguous runs."""
    runs: list[list[int]] = []
    for i in indices:
        if runs and i == runs[-1][-1] + 1:
            runs[-1].append(i)
        else:
            runs.append([i])
    return runs


def render_segments(tokens: list[str], indices: list[int]) -> str:
    """Render discontiguous token runs, joined with ' and '."""
    parts = []
    for run in _segments(indices):
        stripped = _strip_boundary_punct([tokens[i] for i in run])
        if stripped:
            parts.append(detokenize(stripped))
    return " and ".join(parts)


def _find_exception(tokens: list[str]) -> tuple[int, int] | None:
    """Locate 'provided , however' in a token list.

    Returns (marker_start, body_start) where body_start is the first token
    after the marker and its trailing commas / 'that'.
    """
    lowered = [t.lower() for t in tokens]
    for i, tok in enumerate(lowered):
        if tok == "provided" and "however" in lowered[i + 1 : i + 4]:
            j = i + 1
            while j < len(tokens) and lowered[j] in (",", "however"):
                j += 1
            while j < len(tokens) and lowered[j] in (",", "that"):
                j += 1
            return i, j
    return None


def _find_phrase(tokens_lower: list[str], phrase: tuple[str, ...]) -> int:
    """Index just past the first occurrence of `phrase`, or -1."""
    n, m = len(tokens_lower), len(phrase)
    for i in range(n - m + 1):
        if tuple(tokens_lower[i : i + m]) == phrase:
            return i + m
    return -1


def _main_predicate(annotation: SrlAnnotation, lo: int, hi: int):
    """Predicate inside [lo, hi) whose labeled spans cover the most tokens.

    Ties go to the earliest verb, then to annotation order.
    """
    best = None
    for order, pred in enumerate(annotation.predicates):
        spans = pred.spans()
        if any(s < lo or e > hi for s, e in spans):
            continue
        covered = set()
        for s, e in spans:
            covered.update(range(s, e))
        key = (-len(covered), pred.verb_span[0], order)
        if best is None or key < best[0]:
            best = (key, pred)
    return best[1] if best else None


def _statement_span(pred) -> tuple[int, int]:
    """Contiguous range over the verb and its core (numbered) arguments."""
    spans = [pred.verb_span] + [a.span for a in pred.arguments if _CORE_ROLE.match(a.role)]
    return min(s for s, _ in spans), max(e for _, e in spans)


def negate_statement(tokens: list[str]) -> list[str]:
    """Insert 'not' after the first auxiliary verb, else after the first token."""
    for i, tok in enumerate(tokens):
        if tok.lower() in AUXILIARIES:
            return tokens[: i + 1] + ["not"] + tokens[i + 1 :]
    return tokens[:1] + ["not"] + tokens[1:]


def _degraded_pair(article_id: str, index: int, sentence: str) -> CondStatePair:
    tokens = tuple(sentence.split())
    return CondStatePair(
        source=(article_id, index, "main"),
        condition="",
        statement=sentence,
        condition_tokens=(),
        statement_tokens=tokens,
        degraded=True,
    )


def extract_pairs(
    article: Article, annotations: dict[str, SrlAnnotation]
) -> list[CondStatePair]:
    """Extract (condition, statement) pairs from every sentence of an article.

    `annotations` maps sentence ids ('<article_id>:<index>') to SRL
    annotations over the sentence tokens (enumeration markers stripped).
    Sentences without a usable predicate degrade to a whole-sentence
    statement with an empty condition.
    """
    out: list[CondStatePair] = []
    for idx, raw_sentence in enumerate(split_sentences(article.text, article.lang)):
        sentence = strip_point_marker(raw_sentence)
        if not sentence:
            continue
        ann = annotations.get(sentence_id(article.id, idx))
        if ann is None or not ann.predicates or not ann.tokens:
            out.append(_degraded_pair(article.id, idx, sentence))
            continue
        tokens = list(ann.tokens)
        exception = _find_exception(tokens)
        pre_hi = exception[0] if exception else len(tokens)

        pred = _main_predicate(ann, 0, pre_hi)
        if pred is None:
            out.append(_degraded_pair(article.id, idx, sentence))
            continue
        s_start, s_end = _statement_span(pred)
        statement_tokens = tokens[s_start:s_end]
        cond_indices = [i for i in range(pre_hi) if not s_start <= i < s_end]
        out.append(
            CondStatePair(
                source=(article.id, idx, "main"),
                condition=render_segments(tokens, cond_indices),
                statement=detokenize(_strip_boundary_punct(statement_tokens)),
                condition_tokens=tuple(tokens[i] for i in cond_indices),
                statement_tokens=tuple(statement_tokens),
            )
        )

        if exception is None:
            continue
        body_start = exception[1]
        body = tokens[body_start:]
        body_lower = [t.lower() for t in body]
        override_end = -1
        for phrase in APPLY_OVERRIDE_PHRASES:
            override_end = _find_phrase(body_lower, phrase)
            if override_end >= 0:
                break

        if override_end >= 0:
            # "this does not apply if C": negate the main statement, append C.
            exc_cond = _strip_boundary_punct(body[override_end:])
            merged_stmt = negate_statement(statement_tokens)
            merged_cond_indices = cond_indices
            cond_str = render_segments(tokens, merged_cond_indices)
            if exc_cond:
                exc_str = detokenize(exc_cond)
                cond_str = f"{cond_str} and {exc_str}" if cond_str else exc_str
            out.append(
                CondStatePair(
                    source=(article.id, idx, "exception-merged"),
                    condition=cond_str,
                    statement=detokenize(_strip_boundary_punct(merged_stmt)),
                    condition_tokens=tuple(
                        [tokens[i] for i in merged_cond_indices] + exc_cond
                    ),
                    statement_tokens=tuple(merged_stmt),
                )
            )
        else:
            # The exception asserts its own statement.
            pred2 = _main_predicate(ann, body_start, len(tokens))
            if pred2 is not None:
                e_start, e_end = _statement_span(pred2)
                stmt2 = tokens[e_start:e_end]
                cond2 = [i for i in range(body_start, len(tokens)) if not e_start <= i < e_end]
            else:
                stmt2 = _strip_boundary_punct(body)
                cond2 = []
            if not stmt2:
                continue
            cond_str = render_segments(tokens, cond_indices + cond2)
            out.append(
                CondStatePair(
                    source=(article.id, idx, "exception-merged"),
                    condition=cond_str,
                    statement=detokenize(_strip_boundary_punct(stmt2)),
                    condition_tokens=tuple(tokens[i] for i in cond_indices + cond2),
                    statement_tokens=tuple(stmt2),
                )
            )
    return out


def decompose_query(query: Query) -> QueryDecomposition:
    """Last sentence becomes the statement, everything before it the condition."""
    sentences = split_sentences(query.text, query.lang)
    if not sentences:
        raise EmptyInputError(f"query {query.id!r} has no sentences")
    return QueryDecomposition(condition=" ".join(sentences[:-1]), statement=sentences[-1])


def negation_count(text: str, lang: str = "en", lexicon: frozenset[str] | None = None) -> int:
    if lang == "ja":
        return sum(text.count(sub) for sub in NEGATION_SUBSTRINGS_JA)
    lex = lexicon if lexicon is not None else NEGATION_LEXICON_EN
    return sum(1 for tok in _WORD_RE.findall(text.lower()) if tok in lex)


def negation_parity(text: str, lang: str = "en", lexicon: frozenset[str] | None = None) -> str:
    """Parity ('even' | 'odd') of negation-lexicon hits in the text."""
    return "odd" if negation_count(text, lang, lexicon) % 2 else "even"


def condition_index(pairs: list[CondStatePair], tokenizer: Tokenizer) -> InvertedIndex:
    """Idf context over the pairs' condition texts (for condition matching)."""
    return build_index([(p.source_id, p.condition) for p in pairs], tokenizer)


def _condition_similarity(
    query_condition: str, pair: CondStatePair, tokenizer: Tokenizer, index: InvertedIndex
) -> float:
    q_empty = not tokenizer.tokenize(query_condition)
    p_empty = not tokenizer.tokenize(pair.condition)
    if q_empty and p_empty:
        return 1.0  # both unconditional: vacuous perfect match
    if q_empty or p_empty:
        return 0.0
    return tfidf_cosine(query_condition, pair.condition, tokenizer, index)


def infer_yes_no(
    query_dec: QueryDecomposition,
    pairs: list[CondStatePair],
    tokenizer: Tokenizer,
    index: InvertedIndex | None = None,
    lang: str = "en",
) -> tuple[str, str]:
    """Match the query's condition to the closest pair condition by TfIdf
    cosine, then answer YES when both condition and statement negation
    parities agree; returns (answer, matched pair id)."""
    if not pairs:
        raise EmptyInputError("cannot infer from zero condition-statement pairs")
    if index is None:
        index = condition_index(pairs, tokenizer)

    def tie_key(item):
        sim, pair = item
        aid, sidx, variant = pair.source
        return (-sim, aid, sidx, VARIANTS.index(variant))

    scored = [( _condition_similarity(query_dec.condition, p, tokenizer, index), p)
              for p in pairs]
    best = min(scored, key=tie_key)[1]

    cond_match = negation_parity(query_dec.condition, lang) == negation_parity(best.condition, lang)
    stmt_match = negation_parity(query_dec.statement, lang) == negation_parity(best.statement, lang)
    answer = "YES" if (cond_match and stmt_match) else "NO"
    return answer, best.source_id


# ---------------------------------------------------------------------------
# condstate.jsonl
# ---------------------------------------------------------------------------


def save_cond_pairs(pairs: list[CondStatePair], path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for p in pairs:
            rec = {
                "source": list(p.source),
                "condition": p.condition,
                "statement": p.statement,
                "condition_tokens": list(p.condition_tokens),
                "statement_tokens": list(p.statement_tokens),
                "degraded": p.degraded,
            }
            fh.write(json.dumps(rec, sort_keys=True, ensure_ascii=False) + "\n")


def load_cond_pairs(path) -> list[CondStatePair]:
    p = Path(path)
    out = []
    for lineno, line in enumerate(open(p, encoding="utf-8"), 1):
        if not line.strip():
            continue
        try:
            obj = json.loads(line)
            aid, sidx, variant = obj["source"]
            out.append(
                CondStatePair(
                    source=(str(aid), int(sidx), str(variant)),
                    condition=obj["condition"],
                    statement=obj["statement"],
                    condition_tokens=tuple(obj.get("condition_tokens", [])),
                    statement_tokens=tuple(obj.get("statement_tokens", [])),
                    degraded=bool(obj.get("degraded", False)),
                )
            )
        except (json.JSONDecodeError, KeyError, TypeError, ValueError) as exc:
            raise ParseError(f"bad condition-statement record: {exc}", path=p, line=lineno) from exc
    return out
