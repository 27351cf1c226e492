import json

import pytest
from hypothesis import given, strategies as st

from lexkit.corpus import (
    Article,
    CaseFragment,
    Corpus,
    Query,
    compute_stats,
    load_corpus,
    save_corpus,
    split_sentences,
    split_with_separators,
)
from lexkit.errors import EmptyInputError, IntegrityError, ParseError, ValidationError


def _write_canonical(root, articles=(), queries=(), manifest=None, labels=None):
    root.mkdir(parents=True, exist_ok=True)
    if articles:
        with open(root / "articles.jsonl", "w", encoding="utf-8") as fh:
            for rec in articles:
                fh.write(json.dumps(rec) + "\n")
    if queries:
        with open(root / "queries.jsonl", "w", encoding="utf-8") as fh:
            for rec in queries:
                fh.write(json.dumps(rec) + "\n")
    if manifest is not None:
        (root / "manifest.json").write_text(json.dumps(manifest))
    if labels is not None:
        (root / "labels.json").write_text(json.dumps(labels))


ARTICLES_3 = [
    {"id": "1", "number": "1", "caption": "", "text": "First rule.", "lang": "en"},
    {"id": "2", "number": "2", "caption": "", "text": "Second rule.", "lang": "en"},
    {"id": "3", "number": "3", "caption": "", "text": "Third rule.", "lang": "en"},
]


def test_canonical_identity_load(tmp_path):
    _write_canonical(tmp_path / "c", articles=ARTICLES_3)
    corpus = load_corpus(tmp_path / "c", "canonical-jsonl")
    assert [a.id for a in corpus.articles] == ["1", "2", "3"]
    assert corpus.articles[0].text == "First rule."


def test_duplicate_article_id_is_integrity_error(tmp_path):
    recs = ARTICLES_3 + [ARTICLES_3[0]]
    _write_canonical(tmp_path / "c", articles=recs)
    with pytest.raises(IntegrityError, match="'1'"):
        load_corpus(tmp_path / "c", "canonical-jsonl")


def test_malformed_record_names_file_and_line(tmp_path):
    root = tmp_path / "c"
    root.mkdir()
    (root / "articles.jsonl").write_text('{"id": "1", "text": "ok"}\n{broken\n')
    with pytest.raises(ParseError) as err:
        load_corpus(root, "canonical-jsonl")
    assert "articles.jsonl" in str(err.value)
    assert ":2" in str(err.value)


def test_manifest_split_assignment(tmp_path):
    _write_canonical(
        tmp_path / "c",
        queries=[{"id": "R02-1", "text": "q"}, {"id": "R03-7", "text": "q"}],
        manifest={"splits": {"train": [], "validation": ["R02*"], "test": ["R03*"]}},
    )
    corpus = load_corpus(tmp_path / "c", "canonical-jsonl")
    assert {q.id: q.split for q in corpus.queries} == {
        "R02-1": "validation",
        "R03-7": "test",
    }


def test_query_matching_no_split_is_error(tmp_path):
    _write_canonical(
        tmp_path / "c",
        queries=[{"id": "H18-1", "text": "q"}],
        manifest={"splits": {"train": ["R*"], "validation": [], "test": []}},
    )
    with pytest.raises(IntegrityError, match="H18-1"):
        load_corpus(tmp_path / "c", "canonical-jsonl")


def test_gold_referencing_unknown_doc_is_error(tmp_path):
    _write_canonical(
        tmp_path / "c",
        articles=ARTICLES_3,
        queries=[{"id": "q1", "text": "t"}],
        labels={"q1": ["99"]},
    )
    with pytest.raises(IntegrityError, match="'99'"):
        load_corpus(tmp_path / "c", "canonical-jsonl")


def test_roundtrip_byte_stable(tmp_path, synthetic_corpus):
    first = tmp_path / "first"
    second = tmp_path / "second"
    save_corpus(synthetic_corpus, first)
    reloaded = load_corpus(first, "canonical-jsonl")
    save_corpus(reloaded, second)
    for name in ("articles.jsonl", "queries.jsonl", "manifest.json", "labels.json"):
        assert (first / name).read_bytes() == (second / name).read_bytes()


# ---------------------------------------------------------------------------
# task-2 directory layout
# ---------------------------------------------------------------------------


def _write_case(root, case_id, fragment, paragraphs):
    case = root / "cases" / case_id
    (case / "paragraphs").mkdir(parents=True)
    (case / "fragment.txt").write_text(fragment)
    for pid, text in paragraphs.items():
        (case / "paragraphs" / f"{pid}.txt").write_text(text)


def test_task2_dir_load_and_stats(tmp_path):
    root = tmp_path / "t2"
    _write_case(root, "c1", "fragment one", {f"p{i:02d}": f"para {i}" for i in range(30)})
    _write_case(root, "c2", "fragment two", {f"p{i:02d}": f"para {i}" for i in range(40)})
    (root / "labels.json").write_text(json.dumps({"c1": ["p00"], "c2": ["p01"]}))
    corpus = load_corpus(root, "coliee-task2-dir")
    assert len(corpus.cases) == 2
    stats = compute_stats(corpus)
    assert stats.candidates_per_case == 35.0
    assert stats.entailments_per_case == 1.0
    assert stats.n_train == 2


def test_task2_gold_must_reference_case_paragraph(tmp_path):
    root = tmp_path / "t2"
    _write_case(root, "c1", "fragment", {"p1": "text"})
    (root / "labels.json").write_text(json.dumps({"c1": ["nope"]}))
    with pytest.raises(IntegrityError):
        load_corpus(root, "coliee-task2-dir")


def test_case_fragment_duplicate_paragraph_ids():
    with pytest.raises(IntegrityError):
        CaseFragment(case_id="c", fragment_text="f", candidates=(("p1", "a"), ("p1", "b")))


def test_statute_xml_adapter(tmp_path):
    xml = """<dataset>
      <pair id="H18-1-1" label="Y" extra="ignored">
        <t1>Article 23  A thing about domicile.</t1>
        <t2>Is the residence deemed the domicile.</t2>
      </pair>
      <pair id="H18-1-2" label="N">
        <t1>Article 94  Collusive manifestations are void. Article 23  A thing about domicile.</t1>
        <t2>Is the manifestation valid.</t2>
      </pair>
    </dataset>"""
    path = tmp_path / "pairs.xml"
    path.write_text(xml)
    corpus = load_corpus(path, "coliee-statute-xml")
    assert {q.id for q in corpus.queries} == {"H18-1-1", "H18-1-2"}
    assert {a.id for a in corpus.articles} == {"23", "94"}
    assert corpus.gold["H18-1-2"] == {"23", "94"}
    assert corpus.answers == {"H18-1-1": "YES", "H18-1-2": "NO"}


# ---------------------------------------------------------------------------
# stats
# ---------------------------------------------------------------------------


def test_stats_empty_corpus_is_error():
    with pytest.raises(EmptyInputError):
        compute_stats(Corpus(queries=[]))


def test_stats_single_case_single_gold(tmp_path):
    root = tmp_path / "t2"
    _write_case(root, "c1", "fragment", {"p1": "a", "p2": "b"})
    (root / "labels.json").write_text(json.dumps({"c1": ["p2"]}))
    stats = compute_stats(load_corpus(root, "coliee-task2-dir"))
    assert stats.entailments_per_case == 1.0


# ---------------------------------------------------------------------------
# sentence splitting
# ---------------------------------------------------------------------------


def test_split_basic():
    assert split_sentences("A. B.") == ["A.", "B."]


def test_split_abbreviation_guard():
    assert split_sentences("Mr. X sold.") == ["Mr. X sold."]
    assert split_sentences("See Art. 5. Next point.") == ["See Art. 5.", "Next point."]
    assert split_sentences("Fruits (e.g. apples) are goods. Yes.") == [
        "Fruits (e.g. apples) are goods.",
        "Yes.",
    ]


def test_split_article_23_yields_two_sentences(synthetic_corpus):
    art = synthetic_corpus.article_by_id("23")
    sentences = split_sentences(art.text)
    assert len(sentences) == 2
    assert sentences[0].startswith("(1)")
    assert sentences[1].startswith("(2)")


def test_split_whitespace_only():
    assert split_sentences("   \n ") == []


def test_split_japanese_terminal():
    assert split_sentences("前段である。後段である。", lang="ja") == ["前段である。", "後段である。"]


@given(st.text(max_size=200))
def test_split_separator_round_trip(text):
    segments = split_with_separators(text)
    assert "".join(seg + sep for seg, sep in segments) == text


@given(st.text(max_size=200))
def test_split_idempotent(text):
    for sentence in split_sentences(text):
        assert split_sentences(sentence) == [sentence]


# ---------------------------------------------------------------------------
# record validation
# ---------------------------------------------------------------------------


def test_article_requires_nonempty_text():
    with pytest.raises(ValidationError):
        Article(id="1", number="1", caption="", text="")


def test_query_validates_split():
    with pytest.raises(ValidationError):
        Query(id="q", text="t", split="dev")
