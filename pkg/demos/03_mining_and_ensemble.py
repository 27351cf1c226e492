"""Hard-negative mining, checkpoint ensembling, and prediction, end to end.

Round-1 mining ranks candidates lexically and keeps the hardest non-gold
ones next to the gold positives. With externally produced checkpoint
scores, round-2 re-mines against the model's own ranking, a weight grid
search finds the best checkpoint blend on validation, and the top-k +
margin rule turns blended scores into final prediction sets. Missed-query
recovery then unions auxiliary predictions into queries the main model
left empty.

Usage: python demos/03_mining_and_ensemble.py
"""

from pathlib import Path

from lexkit.corpus import load_corpus
from lexkit.ensemble import (
    EnsembleConfig,
    grid_search_weights,
    main_auxiliary_merge,
    weighted_scores,
)
from lexkit.lexical import Tokenizer, build_index
from lexkit.metrics import build_report, format_report
from lexkit.mining import find_missed_queries, mine_negatives_round1, mine_negatives_round2
from lexkit.predict import SelectionRule, rank_scores, select_threshold
from lexkit.scores import load_scores

DATA = Path(__file__).parent.parent / "tests" / "data" / "synthetic"

corpus = load_corpus(DATA, "canonical-jsonl")
tok = Tokenizer(mode="word")
index = build_index([(a.id, a.text) for a in corpus.articles], tok)
train = [q for q in corpus.queries if q.split == "train"]

round1 = mine_negatives_round1(train, corpus.gold, index, n_neg=3)
print(f"round-1 mining: {len(round1.pairs)} pairs")
for p in round1.pairs[:4]:
    print(f"  {p.query_id} {p.doc_id:>4} {p.label:<8} via {p.provenance}")

matrix = load_scores(DATA / "scores.tsv")
round2 = mine_negatives_round2([q.id for q in train], corpus.gold, matrix, "ck1", n_neg=3)
changed = set(round1.keys()) ^ set(round2.keys())
print(f"round-2 re-mining against ck1 changes {len(changed)} pairs")

# Blend the two checkpoints; the step-0.25 grid has 24 candidate points.
validation = {q.id: corpus.gold[q.id] for q in corpus.queries if q.split == "validation"}
rule = SelectionRule(kind="topk-margin", k=2, m=0.05)
cfg = EnsembleConfig(grid_step=0.25, metric="macro-f2", h=len(matrix.checkpoints))
weights, value = grid_search_weights(matrix, validation, cfg, rule)
print(f"\ngrid search: best macro-F2 {value:.4f} at raw weights {weights.raw}")

ranked = rank_scores(weighted_scores(matrix, weights))
predictions = {qid: rule.apply(rows) for qid, rows in sorted(ranked.items())}
report = build_report(predictions, corpus.gold,
                      {qid: [d for d, _ in rows] for qid, rows in ranked.items()})
print("\nensembled predictions, all six queries:")
print(format_report(report))

# Make the main model miss a few queries on purpose (absolute threshold),
# then recover them from an auxiliary model's predictions.
main_preds = {qid: select_threshold(rows, t=0.6) for qid, rows in sorted(ranked.items())}
aux_preds = predictions
missed = find_missed_queries(main_preds)
merged = main_auxiliary_merge(main_preds, [aux_preds], missed)
print(f"\nthreshold model missed {sorted(missed.query_ids)}")
for qid in sorted(missed.query_ids):
    print(f"  {qid}: {main_preds[qid]} -> {merged[qid]}")
