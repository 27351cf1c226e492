"""Data model and ingestion for articles, queries, case fragments, and gold labels.

Canonical JSONL files are the source of truth; competition-native layouts
(case directories, statute XML) are adapters that normalize into the same
records.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from fnmatch import fnmatchcase
from pathlib import Path
from xml.etree import ElementTree

from .errors import EmptyInputError, IntegrityError, ParseError, ValidationError

LANGS = ("en", "ja")
SPLITS = ("train", "validation", "test")

# Trailing tokens that never terminate a sentence.
ABBREVIATIONS = ("Mr.", "No.", "Art.", "e.g.", "i.e.")

_TERMINALS = ".!?。"


@dataclass(frozen=True)
class Article:
    id: str
    number: str
    caption: str
    text: str
    lang: str = "en"

    def __post_init__(self):
        if not self.id:
            raise ValidationError("article id must be nonempty")
        if not self.text:
            raise ValidationError(f"article {self.id!r}: text must be nonempty")
        if self.lang not in LANGS:
            raise ValidationError(f"article {self.id!r}: unknown lang {self.lang!r}")


@dataclass(frozen=True)
class Query:
    id: str
    text: str
    lang: str = "en"
    split: str = "train"

    def __post_init__(self):
        if not self.id:
            raise ValidationError("query id must be nonempty")
        if self.lang not in LANGS:
            raise ValidationError(f"query {self.id!r}: unknown lang {self.lang!r}")
        if self.split not in SPLITS:
            raise ValidationError(f"query {self.id!r}: unknown split {self.split!r}")


@dataclass(frozen=True)
class CaseFragment:
    """A base-case fragment plus its candidate paragraphs."""

    case_id: str
    fragment_text: str
    candidates: tuple[tuple[str, str], ...]  # (paragraph_id, text)

    def __post_init__(self):
        if not self.candidates:
            raise ValidationError(f"case {self.case_id!r}: candidates must be nonempty")
        pids = [pid for pid, _ in self.candidates]
        if len(set(pids)) != len(pids):
            dupes = sorted({p for p in pids if pids.count(p) > 1})
            raise IntegrityError(f"case {self.case_id!r}: duplicate paragraph ids {dupes}")

    @property
    def candidate_ids(self) -> list[str]:
        return [pid for pid, _ in self.candidates]


# query_id -> set of relevant document / paragraph ids
GoldLabels = dict[str, set[str]]


@dataclass(frozen=True)
class DatasetStats:
    n_train: int
    n_validation: int
    n_test: int
    candidates_per_case: float
    entailments_per_case: float

    def __post_init__(self):
        for name in ("n_train", "n_validation", "n_test"):
            if getattr(self, name) < 0:
                raise ValidationError(f"{name} must be >= 0")
        if self.candidates_per_case < 0 or self.entailments_per_case < 0:
            raise ValidationError("per-case ratios must be >= 0")


@dataclass
class Corpus:
    """A loaded dataset: statute articles and/or case fragments, plus queries and gold."""

    queries: list[Query]
    articles: list[Article] = field(default_factory=list)
    cases: list[CaseFragment] = field(default_factory=list)
    gold: GoldLabels = field(default_factory=dict)
    # Optional YES/NO entailment gold (statute XML `label` attribute).
    answers: dict[str, str] = field(default_factory=dict)

    def query_by_id(self, qid: str) -> Query:
        for q in self.queries:
            if q.id == qid:
                return q
        raise KeyError(qid)

    def article_by_id(self, aid: str) -> Article:
        for a in self.articles:
            if a.id == aid:
                return a
        raise KeyError(aid)


# ---------------------------------------------------------------------------
# sentence splitting
# ---------------------------------------------------------------------------


def _is_abbreviation_guarded(text: str, punct_index: int) -> bool:
    """True if the terminal at punct_index ends a guarded abbreviation token."""
    end = punct_index + 1
    start = end
    while start > 0 and not text[start - 1].isspace():
        start -= 1
    word = text[start:end]
    for abbr in ABBREVIATIONS:
        if word == abbr:
            return True
        if word.endswith(abbr) and not word[-len(abbr) - 1].isalnum():
            return True
    return False


def split_with_separators(text: str, lang: str = "en") -> list[tuple[str, str]]:
    """Split into (segment, trailing_separator) pairs whose concatenation is `text`.

    A boundary is a '.', '!', '?' or '。' followed by whitespace or end of
    string, unless the terminal closes an abbreviation from ABBREVIATIONS.
    For Japanese text '。' is self-delimiting and splits unconditionally.
    """
    segments: list[tuple[str, str]] = []
    n = len(text)
    start = 0
    i = 0
    while i < n:
        ch = text[i]
        if ch in _TERMINALS:
            unconditional = ch == "。" and lang == "ja"
            followed = i + 1 >= n or text[i + 1].isspace()
            if (unconditional or followed) and not (
                ch == "." and _is_abbreviation_guarded(text, i)
            ):
                seg_end = i + 1
                sep_end = seg_end
                while sep_end < n and text[sep_end].isspace():
                    sep_end += 1
                segments.append((text[start:seg_end], text[seg_end:sep_end]))
                start = sep_end
                i = sep_end
                continue
        i += 1
    if start < n:
        segments.append((text[start:], ""))
    return segments


def split_sentences(text: str, lang: str = "en") -> list[str]:
    """Deterministic rule-based sentence splitting; whitespace-only text -> []."""
    return [seg.strip() for seg, _ in split_with_separators(text, lang) if seg.strip()]


# ---------------------------------------------------------------------------
# canonical JSONL
# ---------------------------------------------------------------------------


def _read_jsonl(path: Path) -> list[tuple[int, dict]]:
    rows = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            if not line.strip():
                continue
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as exc:
                raise ParseError(f"invalid JSON: {exc.msg}", path=path, line=lineno) from exc
            if not isinstance(obj, dict):
                raise ParseError("record must be a JSON object", path=path, line=lineno)
            rows.append((lineno, obj))
    return rows


def _require(obj: dict, key: str, path: Path, lineno: int) -> object:
    if key not in obj:
        raise ParseError(f"missing required key {key!r}", path=path, line=lineno)
    return obj[key]


def _assign_splits(queries: list[Query], manifest: dict | None) -> list[Query]:
    if manifest is None:
        return queries
    patterns = manifest.get("splits", {})
    assigned = []
    for q in queries:
        matches = [
            split
            for split in SPLITS
            if any(fnmatchcase(q.id, pat) for pat in patterns.get(split, []))
        ]
        if not matches:
            raise IntegrityError(f"query {q.id!r} matches no split pattern in manifest")
        if len(matches) > 1:
            raise IntegrityError(f"query {q.id!r} matches multiple splits {matches}")
        assigned.append(Query(id=q.id, text=q.text, lang=q.lang, split=matches[0]))
    return assigned


def _check_unique(ids: list[str], what: str):
    seen = set()
    for x in ids:
        if x in seen:
            raise IntegrityError(f"duplicate {what} id {x!r}")
        seen.add(x)


def _validate_gold(gold: GoldLabels, query_ids: set[str], doc_ids_for) -> None:
    for qid, docs in gold.items():
        if qid not in query_ids:
            raise IntegrityError(f"gold references unknown query id {qid!r}")
        if not docs:
            raise IntegrityError(f"gold set for query {qid!r} is empty")
        known = doc_ids_for(qid)
        for did in docs:
            if did not in known:
                raise IntegrityError(
                    f"gold for query {qid!r} references unknown document id {did!r}"
                )


def _load_canonical(root: Path) -> Corpus:
    articles: list[Article] = []
    art_path = root / "articles.jsonl"
    if art_path.exists():
        for lineno, obj in _read_jsonl(art_path):
            try:
                articles.append(
                    Article(
                        id=str(_require(obj, "id", art_path, lineno)),
                        number=str(obj.get("number", "")),
                        caption=str(obj.get("caption", "")),
                        text=str(_require(obj, "text", art_path, lineno)),
                        lang=str(obj.get("lang", "en")),
                    )
                )
            except ValidationError as exc:
                raise ParseError(str(exc), path=art_path, line=lineno) from exc
        _check_unique([a.id for a in articles], "article")

    queries: list[Query] = []
    q_path = root / "queries.jsonl"
    if q_path.exists():
        for lineno, obj in _read_jsonl(q_path):
            try:
                queries.append(
                    Query(
                        id=str(_require(obj, "id", q_path, lineno)),
                        text=str(_require(obj, "text", q_path, lineno)),
                        lang=str(obj.get("lang", "en")),
                    )
                )
            except ValidationError as exc:
                raise ParseError(str(exc), path=q_path, line=lineno) from exc
        _check_unique([q.id for q in queries], "query")

    manifest = None
    man_path = root / "manifest.json"
    if man_path.exists():
        manifest = json.loads(man_path.read_text(encoding="utf-8"))
    queries = _assign_splits(queries, manifest)

    gold: GoldLabels = {}
    lab_path = root / "labels.json"
    if lab_path.exists():
        raw = json.loads(lab_path.read_text(encoding="utf-8"))
        gold = {qid: set(docs) for qid, docs in raw.items()}
        article_ids = {a.id for a in articles}
        _validate_gold(gold, {q.id for q in queries}, lambda qid: article_ids)

    return Corpus(queries=queries, articles=articles, gold=gold)


def _load_task2_dir(root: Path) -> Corpus:
    cases_dir = root / "cases"
    if not cases_dir.is_dir():
        raise ParseError("expected a cases/ directory", path=root)
    cases: list[CaseFragment] = []
    for case_dir in sorted(cases_dir.iterdir()):
        if not case_dir.is_dir():
            continue
        frag_path = case_dir / "fragment.txt"
        if not frag_path.exists():
            raise ParseError("missing fragment.txt", path=case_dir)
        para_dir = case_dir / "paragraphs"
        if not para_dir.is_dir():
            raise ParseError("missing paragraphs/ directory", path=case_dir)
        candidates = tuple(
            (p.stem, p.read_text(encoding="utf-8").strip())
            for p in sorted(para_dir.glob("*.txt"))
        )
        cases.append(
            CaseFragment(
                case_id=case_dir.name,
                fragment_text=frag_path.read_text(encoding="utf-8").strip(),
                candidates=candidates,
            )
        )
    _check_unique([c.case_id for c in cases], "case")

    queries = [Query(id=c.case_id, text=c.fragment_text, lang="en") for c in cases]
    man_path = root / "manifest.json"
    manifest = json.loads(man_path.read_text(encoding="utf-8")) if man_path.exists() else None
    queries = _assign_splits(queries, manifest)

    gold: GoldLabels = {}
    lab_path = root / "labels.json"
    if lab_path.exists():
        raw = json.loads(lab_path.read_text(encoding="utf-8"))
        gold = {cid: set(pids) for cid, pids in raw.items()}
        by_case = {c.case_id: set(c.candidate_ids) for c in cases}
        _validate_gold(gold, set(by_case), lambda cid: by_case[cid])

    return Corpus(queries=queries, cases=cases, gold=gold)


_ARTICLE_HEAD = re.compile(r"Article\s+([0-9][0-9\-]*)")


def _harvest_articles(t1_text: str, lang: str) -> list[Article]:
    """Split a statute excerpt on 'Article N' headings into Article records."""
    heads = list(_ARTICLE_HEAD.finditer(t1_text))
    out = []
    for i, m in enumerate(heads):
        end = heads[i + 1].start() if i + 1 < len(heads) else len(t1_text)
        body = t1_text[m.start():end].strip()
        if body:
            out.append(Article(id=m.group(1), number=m.group(1), caption="", text=body, lang=lang))
    return out


def _load_statute_xml(path: Path) -> Corpus:
    files = sorted(path.glob("*.xml")) if path.is_dir() else [path]
    if not files:
        raise ParseError("no XML files found", path=path)

    articles: dict[str, Article] = {}
    queries: list[Query] = []
    gold: GoldLabels = {}
    answers: dict[str, str] = {}
    for fp in files:
        try:
            tree = ElementTree.parse(fp)
        except ElementTree.ParseError as exc:
            raise ParseError(f"invalid XML: {exc}", path=fp) from exc
        for pair in tree.getroot().iter("pair"):
            pid = pair.get("id")
            if pid is None:
                raise ParseError("pair element missing id attribute", path=fp)
            t1 = pair.findtext("t1") or ""
            t2 = (pair.findtext("t2") or "").strip()
            if not t2:
                raise ParseError(f"pair {pid!r} has empty t2", path=fp)
            lang = "ja" if re.search(r"[぀-ヿ一-鿿]", t2) else "en"
            queries.append(Query(id=pid, text=t2, lang=lang))
            refs = set()
            for art in _harvest_articles(t1, lang):
                articles.setdefault(art.id, art)
                refs.add(art.id)
            if refs:
                gold[pid] = refs
            label = pair.get("label")
            if label in ("Y", "N"):
                answers[pid] = "YES" if label == "Y" else "NO"

    _check_unique([q.id for q in queries], "query")
    man_path = (path if path.is_dir() else path.parent) / "manifest.json"
    manifest = json.loads(man_path.read_text(encoding="utf-8")) if man_path.exists() else None
    queries = _assign_splits(queries, manifest)
    art_list = [articles[k] for k in sorted(articles)]
    return Corpus(queries=queries, articles=art_list, gold=gold, answers=answers)


def load_corpus(path, format: str) -> Corpus:
    """Load a corpus from `path` in one of the supported layouts.

    format: 'canonical-jsonl' | 'coliee-task2-dir' | 'coliee-statute-xml'
    """
    p = Path(path)
    if not p.exists():
        raise ParseError("path does not exist", path=p)
    if format == "canonical-jsonl":
        return _load_canonical(p)
    if format == "coliee-task2-dir":
        return _load_task2_dir(p)
    if format == "coliee-statute-xml":
        return _load_statute_xml(p)
    raise ValidationError(f"unknown corpus format {format!r}")


def save_corpus(corpus: Corpus, root) -> None:
    """Write the canonical JSONL layout (sorted keys; byte-stable round trip)."""
    rootp = Path(root)
    rootp.mkdir(parents=True, exist_ok=True)
    if corpus.articles:
        with open(rootp / "articles.jsonl", "w", encoding="utf-8") as fh:
            for a in corpus.articles:
                rec = {"id": a.id, "number": a.number, "caption": a.caption,
                       "text": a.text, "lang": a.lang}
                fh.write(json.dumps(rec, sort_keys=True, ensure_ascii=False) + "\n")
    with open(rootp / "queries.jsonl", "w", encoding="utf-8") as fh:
        for q in corpus.queries:
            rec = {"id": q.id, "text": q.text, "lang": q.lang}
            fh.write(json.dumps(rec, sort_keys=True, ensure_ascii=False) + "\n")
    splits = {s: sorted(q.id for q in corpus.queries if q.split == s) for s in SPLITS}
    (rootp / "manifest.json").write_text(
        json.dumps({"splits": splits}, sort_keys=True, ensure_ascii=False, indent=2) + "\n",
        encoding="utf-8",
    )
    if corpus.gold:
        payload = {qid: sorted(docs) for qid, docs in sorted(corpus.gold.items())}
        (rootp / "labels.json").write_text(
            json.dumps(payload, sort_keys=True, ensure_ascii=False, indent=2) + "\n",
            encoding="utf-8",
        )


def compute_stats(corpus: Corpus) -> DatasetStats:
    """Counts per split plus arithmetic-mean candidate and entailment ratios."""
    if not corpus.queries and not corpus.cases:
        raise EmptyInputError("cannot compute statistics of an empty corpus")
    by_split = {s: sum(1 for q in corpus.queries if q.split == s) for s in SPLITS}
    if corpus.cases:
        cand = sum(len(c.candidates) for c in corpus.cases) / len(corpus.cases)
    elif corpus.articles:
        cand = float(len(corpus.articles))
    else:
        cand = 0.0
    if corpus.gold:
        ent = sum(len(v) for v in corpus.gold.values()) / len(corpus.gold)
    else:
        ent = 0.0
    return DatasetStats(
        n_train=by_split["train"],
        n_validation=by_split["validation"],
        n_test=by_split["test"],
        candidates_per_case=cand,
        entailments_per_case=ent,
    )
