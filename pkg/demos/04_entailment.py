"""The YES/NO entailment engine on a deeming provision.

A legal sentence is decomposed into (condition, statement) pairs using its
predicate-argument annotation; exceptions introduced by "provided, however"
yield an extra pair with the statement negated. A question is answered YES
exactly when its condition matches the closest pair's condition and both
negation parities agree. Queries naming concrete parties (A, B, ...) are
routed to an SVM instead when the two methods disagree.

Usage: python demos/04_entailment.py
"""

import json
from pathlib import Path

from lexkit.corpus import Query, load_corpus
from lexkit.entail import (
    decompose_query,
    detect_query_kind,
    extract_pairs,
    infer_yes_no,
    make_masked_templates,
    negation_parity,
    route_ensemble,
    svm_example_text,
    svm_predict,
    svm_train,
)
from lexkit.lexical import Tokenizer
from lexkit.scores import load_srl

DATA = Path(__file__).parent.parent / "tests" / "data" / "synthetic"

corpus = load_corpus(DATA, "canonical-jsonl")
tok = Tokenizer(mode="word")
article = corpus.article_by_id("23")
annotations = load_srl(DATA / "srl.jsonl")

pairs = extract_pairs(article, annotations)
print("extracted pairs:")
for p in pairs:
    print(f"  [{p.source_id}]")
    print(f"    condition: {p.condition}")
    print(f"    statement: {p.statement}")

for qid in ("q03", "q05"):
    query = corpus.query_by_id(qid)
    dec = decompose_query(query)
    answer, matched = infer_yes_no(dec, pairs, tok)
    parity = negation_parity(dec.statement)
    print(f"\n{qid}: statement parity {parity} -> {answer} (matched {matched})")

# SVM side: train on the bundled YES/NO pairs, then route by query kind.
examples = [
    (svm_example_text(rec["query"], rec["article"]), rec["label"])
    for rec in map(json.loads, open(DATA / "svm_train.jsonl", encoding="utf-8"))
]
model = svm_train(examples, tok, lam=0.01, epochs=30, seed=13)

scenario = Query(id="demo", text="A retains the thing of B until B performs. May A retain the thing.")
kind = detect_query_kind(scenario)
svm_answer, margin = svm_predict(model, scenario.text, corpus.article_by_id("166").text)
cs_answer = "NO"  # pretend the rule engine disagreed
final = route_ensemble(cs_answer, svm_answer, kind)
print(f"\nscenario query kind: {kind.kind} (evidence {list(kind.evidence)})")
print(f"svm says {svm_answer} (margin {margin:+.3f}), rules say {cs_answer} "
      f"-> routed answer {final}")

template = make_masked_templates(corpus.query_by_id("q03"), mask_ratio=0.15, seed=13)
print(f"\nmasked template for augmentation:\n  {' '.join(template.tokens)}")
