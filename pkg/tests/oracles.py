"""Independent brute-force oracles.

Each function recomputes a result straight from its definition, sharing no
code with the library: BM25 from raw document texts, selection rules by
enumeration, metrics by literal counting, grid searches by exhaustive
evaluation. Tests compare library outputs against these.
"""

import itertools
import math
import re
from collections import Counter


def oracle_tokenize(text):
    return re.findall(r"[^\W_]+", text.lower(), re.UNICODE)


def oracle_bm25(docs, query_tokens, doc_id, k1=0.9, b=0.4):
    """Direct evaluation of the Lucene BM25 formula from raw (id, text) docs."""
    tokenized = {did: oracle_tokenize(text) for did, text in docs}
    n = len(docs)
    avgdl = sum(len(t) for t in tokenized.values()) / n
    dl = len(tokenized[doc_id])
    counts = Counter(tokenized[doc_id])
    score = 0.0
    for term in query_tokens:
        tf = counts.get(term, 0)
        if tf == 0:
            continue
        df = sum(1 for t in tokenized.values() if term in t)
        idf = math.log(1.0 + (n - df + 0.5) / (df + 0.5))
        score += idf * (tf / (tf + k1 * (1.0 - b + b * dl / avgdl)))
    return score


def oracle_tfidf_cosine(a, b, doc_texts):
    """Cosine of smoothed tf.idf vectors with idf statistics from doc_texts."""
    docs = [set(oracle_tokenize(t)) for t in doc_texts]
    n = len(docs)

    def vec(text):
        counts = Counter(oracle_tokenize(text))
        out = {}
        for term, tf in counts.items():
            df = sum(1 for d in docs if term in d)
            out[term] = tf * (math.log((n + 1.0) / (df + 1.0)) + 1.0)
        norm = math.sqrt(sum(w * w for w in out.values()))
        return {t: w / norm for t, w in out.items()} if norm else {}

    va, vb = vec(a), vec(b)
    return sum(w * vb.get(t, 0.0) for t, w in va.items())


def oracle_topk_margin(ranked, k, m):
    """Literal enumeration of the top-k + margin definition."""
    top_id, top_score = ranked[0]
    selected = [top_id]
    for rank, (did, score) in enumerate(ranked, 1):
        if rank == 1:
            continue
        if rank <= k and (top_score - score) < m:
            selected.append(did)
    return selected


def oracle_threshold(ranked, t):
    return [did for did, score in ranked if score >= t]


def oracle_micro_prf(predictions, gold):
    tp = sum(len(set(predictions[q]) & gold[q]) for q in gold)
    retrieved = sum(len(predictions[q]) for q in gold)
    relevant = sum(len(gold[q]) for q in gold)
    p = tp / retrieved if retrieved else 0.0
    r = tp / relevant if relevant else 0.0
    f1 = 2 * p * r / (p + r) if p + r else 0.0
    return p, r, f1


def oracle_macro_f2(predictions, gold):
    f2s = []
    for q in gold:
        pred, g = set(predictions[q]), gold[q]
        tp = len(pred & g)
        p = tp / len(pred) if pred else 0.0
        r = tp / len(g) if g else 0.0
        f2s.append(5 * p * r / (4 * p + r) if (4 * p + r) else 0.0)
    return sum(f2s) / len(f2s)


def oracle_ap(ranked_docs, gold_set):
    hits = 0
    acc = 0.0
    for rank, did in enumerate(ranked_docs, 1):
        if did in gold_set:
            hits += 1
            acc += hits / rank
    return acc / len(gold_set)


def oracle_recall_at_k(ranked_docs, gold_set, k):
    return len(set(ranked_docs[:k]) & gold_set) / len(gold_set)


def oracle_grid_values(step):
    vals = []
    i = 0
    while i * step <= 1.0 + 1e-9:
        vals.append(round(min(i * step, 1.0), 12))
        i += 1
    if vals[-1] < 1.0 - 1e-9:
        vals.append(1.0)
    return vals


def oracle_grid_search_weights(checkpoints, entries, gold, step, k, m):
    """Exhaustively evaluate every weight grid point with micro-F1 selection.

    entries: (ckpt, qid, did) -> score. Returns (best_raw_tuple, best_value).
    """
    queries = sorted({qid for _, qid, _ in entries})
    pools = {qid: sorted({d for _, q, d in entries if q == qid}) for qid in queries}
    best = None
    for point in itertools.product(oracle_grid_values(step), repeat=len(checkpoints)):
        if not any(x > 0 for x in point):
            continue
        total = sum(point)
        preds = {}
        for qid in queries:
            scored = []
            for did in pools[qid]:
                s = sum(w / total * entries[(c, qid, did)] for w, c in zip(point, checkpoints))
                scored.append((did, s))
            scored.sort(key=lambda x: (-x[1], x[0]))
            preds[qid] = oracle_topk_margin(scored, k, m)
        value = oracle_micro_prf(preds, gold)[2]
        if best is None or value > best[1]:
            best = (point, value)
    return best


def oracle_search_k_m(ranked_by_query, gold, k_range, m_grid):
    best = None
    for k in sorted(k_range):
        for m in sorted(m_grid):
            preds = {q: oracle_topk_margin(ranked_by_query[q], k, m) for q in gold}
            value = oracle_micro_prf(preds, gold)[2]
            if best is None or value > best[2]:
                best = (k, m, value)
    return best


def oracle_mine(ranked_doc_ids, gold_set, n_neg):
    """Filtered-sort oracle: positives from gold, negatives = first n_neg
    ranked ids outside gold."""
    positives = sorted(gold_set)
    negatives = [d for d in ranked_doc_ids if d not in gold_set][:n_neg]
    return positives, negatives
