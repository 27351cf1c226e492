"""Build the bundled synthetic corpus.

A tiny statute-flavored dataset exercising every pipeline stage: eight
articles, six queries across train/validation/test splits, gold labels,
two synthetic "checkpoint" score sets, query embeddings, SRL annotations
for the two-sentence deeming article, and a small YES/NO training file for
the SVM. Everything is derived from fixed seeds, so rebuilding produces
byte-identical files.

Usage: python demos/01_build_synthetic_corpus.py [out_dir]
"""

import json
import sys
from pathlib import Path

from lexkit.corpus import Article, Corpus, Query, save_corpus
from lexkit.entail import stable_seed
from lexkit.scores import (
    ScoreMatrix,
    SrlAnnotation,
    SrlArgument,
    SrlPredicate,
    save_scores,
    save_srl,
)

ARTICLE_23 = (
    "(1) If a person's domicile is unknown, the person's residence is deemed to be "
    "the person's domicile. "
    "(2) If a person does not have a domicile in Japan, the person's residence is "
    "deemed to be the person's domicile, regardless of whether the person is a "
    "Japanese national or a foreign national; provided, however, that this does not "
    "apply if the law of domicile is to be applied in accordance with the provisions "
    "of the laws that establish the governing law."
)

ARTICLES = {
    "23": ARTICLE_23,
    "94": (
        "A false manifestation of intention made in collusion with another person is void. "
        "The nullity of such manifestation may not be asserted against a third party acting "
        "in good faith."
    ),
    "121": (
        "A mandate is a contract by which a mandator entrusts a juridical act to a mandatary. "
        "A mandatary may not demand remuneration unless remuneration is agreed. "
        "The mandatary must manage the mandated business with the care of a prudent manager."
    ),
    "166": (
        "An obligee in possession of a thing belonging to another person may retain that thing "
        "until the obligation regarding the thing is performed. "
        "The right of retention is extinguished when possession is lost."
    ),
    "206": (
        "An owner has the rights to freely use, profit from and dispose of the thing owned, "
        "within the limits of laws and regulations. "
        "Ownership of immovables is transferred by agreement and delivery of the thing."
    ),
    "295": (
        "If performance of an obligation becomes impossible due to grounds attributable to "
        "the obligor, the obligee may demand compensation for loss or damage arising from "
        "the impossibility."
    ),
    "349": (
        "A pledgee may not allow the pledgor to possess the pledged thing on behalf of the "
        "pledgee. A pledge of movables may not be asserted against a third party unless the "
        "pledgee is in continuous possession of the thing."
    ),
    "415": (
        "If a guarantor performs the obligation on behalf of the principal obligor, the "
        "guarantor acquires a right to reimbursement from the principal obligor. "
        "The guarantor may not demand reimbursement beyond the amount performed."
    ),
}

QUERIES = {
    "q01": ("train",
            "May an obligee exercise a right of retention over a thing until the obligation "
            "is performed."),
    "q02": ("train",
            "A person who has transferred ownership of immovables must deliver the thing to "
            "the buyer. Is the seller liable for compensation when delivery is impossible."),
    "q03": ("train",
            "If a person's domicile is unknown. The person's residence is deemed to be the "
            "person's domicile."),
    "q04": ("validation",
            "A mandate contract is gratuitous unless remuneration is agreed. May the "
            "mandatary demand remuneration."),
    "q05": ("validation",
            "If a person's domicile is unknown. The person's residence is not deemed to be "
            "the person's domicile."),
    "q06": ("test",
            "When a guarantor performs the obligation, does the guarantor acquire a right to "
            "reimbursement from the principal obligor."),
}

GOLD = {
    "q01": ["166"],
    "q02": ["206", "295"],
    "q03": ["23"],
    "q04": ["121"],
    "q05": ["23"],
    "q06": ["415"],
}

GOLD_ANSWERS = {"q03": "YES", "q05": "NO"}

# Checkpoint score bias: ck1 nails the first validation query, ck2 the
# second, so weight search has something real to trade off.
GOLD_BOOST = {
    ("ck1", "q04"): 0.50, ("ck1", "q05"): 0.00,
    ("ck2", "q04"): 0.00, ("ck2", "q05"): 0.50,
}


def _unit(*parts) -> float:
    """Deterministic pseudo-uniform value in [0, 1)."""
    return (stable_seed(*parts) % 10_000) / 10_000.0


def build_scores() -> ScoreMatrix:
    entries = {}
    for ckpt in ("ck1", "ck2"):
        for qid, gold_docs in GOLD.items():
            for did in ARTICLES:
                base = 0.5 * _unit("score", ckpt, qid, did)
                if did in gold_docs:
                    base += GOLD_BOOST.get((ckpt, qid), 0.45)
                entries[(ckpt, qid, did)] = round(base, 6)
    return ScoreMatrix(checkpoints=("ck1", "ck2"), entries=entries)


def build_embeddings() -> dict[str, list[float]]:
    return {
        qid: [round(_unit("emb", qid, i) - 0.5, 6) for i in range(8)]
        for qid in QUERIES
    }


def article23_srl() -> dict[str, SrlAnnotation]:
    t1 = ["If", "a", "person", "'s", "domicile", "is", "unknown", ",", "the", "person",
          "'s", "residence", "is", "deemed", "to", "be", "the", "person", "'s",
          "domicile", "."]
    t2 = ["If", "a", "person", "does", "not", "have", "a", "domicile", "in", "Japan",
          ",", "the", "person", "'s", "residence", "is", "deemed", "to", "be", "the",
          "person", "'s", "domicile", ",", "regardless", "of", "whether", "the",
          "person", "is", "a", "Japanese", "national", "or", "a", "foreign",
          "national", ";", "provided", ",", "however", ",", "that", "this", "does",
          "not", "apply", "if", "the", "law", "of", "domicile", "is", "to", "be",
          "applied", "in", "accordance", "with", "the", "provisions", "of", "the",
          "laws", "that", "establish", "the", "governing", "law", "."]
    return {
        "23:0": SrlAnnotation(
            sentence_id="23:0",
            tokens=tuple(t1),
            predicates=(
                SrlPredicate(verb_span=(5, 6), arguments=(
                    SrlArgument("ARG1", (1, 5)), SrlArgument("ARG2", (6, 7)))),
                SrlPredicate(verb_span=(13, 14), arguments=(
                    SrlArgument("ARGM-ADV", (0, 7)),
                    SrlArgument("ARG1", (8, 12)),
                    SrlArgument("ARG2", (14, 20)))),
            ),
        ),
        "23:1": SrlAnnotation(
            sentence_id="23:1",
            tokens=tuple(t2),
            predicates=(
                SrlPredicate(verb_span=(5, 6), arguments=(
                    SrlArgument("ARG0", (1, 3)), SrlArgument("ARGM-NEG", (4, 5)),
                    SrlArgument("ARG1", (6, 8)), SrlArgument("ARGM-LOC", (8, 10)))),
                SrlPredicate(verb_span=(16, 17), arguments=(
                    SrlArgument("ARGM-ADV", (0, 10)),
                    SrlArgument("ARG1", (11, 15)),
                    SrlArgument("ARG2", (17, 23)),
                    SrlArgument("ARGM-ADV", (24, 37)))),
                SrlPredicate(verb_span=(29, 30), arguments=(
                    SrlArgument("ARG1", (27, 29)), SrlArgument("ARG2", (30, 37)))),
            ),
        ),
    }


SVM_TRAIN = [
    {"query": "A sold a watch to B. Is the sale void.",
     "article": ARTICLES["94"], "label": "NO"},
    {"query": "A made a false manifestation in collusion with B. Is the manifestation void.",
     "article": ARTICLES["94"], "label": "YES"},
    {"query": "A retains the thing of B until B performs. May A retain the thing.",
     "article": ARTICLES["166"], "label": "YES"},
    {"query": "A lost possession of the thing of B. Does the right of retention survive.",
     "article": ARTICLES["166"], "label": "NO"},
    {"query": "A performed the obligation of B as guarantor. May A demand reimbursement.",
     "article": ARTICLES["415"], "label": "YES"},
    {"query": "A demands reimbursement beyond the amount performed. May A demand it.",
     "article": ARTICLES["415"], "label": "NO"},
]


def main(out_dir: str) -> None:
    root = Path(out_dir)
    root.mkdir(parents=True, exist_ok=True)

    articles = [Article(id=k, number=k, caption="", text=v, lang="en")
                for k, v in sorted(ARTICLES.items())]
    queries = [Query(id=qid, text=text, lang="en", split=split)
               for qid, (split, text) in sorted(QUERIES.items())]
    corpus = Corpus(queries=queries, articles=articles,
                    gold={qid: set(docs) for qid, docs in GOLD.items()})
    save_corpus(corpus, root)

    (root / "gold_answers.json").write_text(
        json.dumps(GOLD_ANSWERS, sort_keys=True, indent=2) + "\n", encoding="utf-8")

    save_scores(build_scores(), root / "scores.tsv")

    with open(root / "embeddings.jsonl", "w", encoding="utf-8") as fh:
        for qid, vec in sorted(build_embeddings().items()):
            fh.write(json.dumps({"id": qid, "vector": vec}) + "\n")

    save_srl(article23_srl(), root / "srl.jsonl")

    with open(root / "svm_train.jsonl", "w", encoding="utf-8") as fh:
        for rec in SVM_TRAIN:
            fh.write(json.dumps(rec, sort_keys=True, ensure_ascii=False) + "\n")

    print(f"wrote synthetic corpus to {root}")
    for p in sorted(root.iterdir()):
        print(f"  {p.name}")


if __name__ == "__main__":
    main(sys.argv[1] if len(sys.argv) > 1 else "synthetic_corpus")
