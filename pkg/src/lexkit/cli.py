"""Command-line entry point orchestrating the pipelines.

Every subcommand reads a declarative TOML config (overridable with
`--set key=value` and dedicated flags), writes its module's artifact files
into --out-dir, and drops a run-manifest.json recording the config hash and
the SHA-256 of every input, so identical runs are verifiably identical.

Exit codes: 0 success, 1 validation/data error, 2 usage error.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import sys
from pathlib import Path

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib

from . import corpus as corpus_mod
from . import ensemble as ensemble_mod
from . import entail
from . import lexical
from . import metrics as metrics_mod
from . import mining
from . import predict as predict_mod
from . import scores as scores_mod
from .errors import ConfigError, LexkitError

DEFAULTS = {
    "tokenizer.mode": "word",
    "bm25.k1": 0.9,
    "bm25.b": 0.4,
    "retrieve.k": 150,
    "mining.n_neg": 10,
    "mining.n_near": 10,
    "ensemble.grid_step": 0.25,
    "ensemble.metric": "micro-f1",
    "predict.k": 3,
    "predict.m": 0.05,
    "predict.t": 0.5,
    "predict.k_range": [1, 2, 3, 4, 5],
    "predict.m_grid": [round(0.01 * i, 2) for i in range(0, 21)],
    "entail.mask_ratio": 0.15,
    "entail.top_k_fill": 5,
    "entail.svm_lambda": 0.01,
    "entail.svm_epochs": 20,
    "seeds.svm": 13,
    "seeds.augment": 13,
    "seeds.realize": 13,
}


class RunContext:
    """Tracks config, inputs, and outputs for the run manifest."""

    def __init__(self, args):
        self.out_dir = Path(getattr(args, "out_dir", "."))
        self.out_dir.mkdir(parents=True, exist_ok=True)
        self.config: dict = {}
        path = getattr(args, "config", None)
        if path:
            with open(path, "rb") as fh:
                self.config = tomllib.load(fh)
        for item in getattr(args, "set", None) or []:
            if "=" not in item:
                raise ConfigError(f"--set expects key=value, got {item!r}")
            key, raw = item.split("=", 1)
            try:
                value = json.loads(raw)
            except json.JSONDecodeError:
                value = raw
            self._set_dotted(key.strip(), value)
        self.inputs: dict[str, str] = {}
        self.outputs: list[str] = []
        self.jobs = getattr(args, "jobs", 1) or 1

    def _set_dotted(self, key: str, value):
        node = self.config
        parts = key.split(".")
        for part in parts[:-1]:
            node = node.setdefault(part, {})
        node[parts[-1]] = value

    def get(self, dotted: str, override=None):
        """Resolution order: CLI flag, config file, built-in default."""
        if override is not None:
            return override
        node = self.config
        for part in dotted.split("."):
            if not isinstance(node, dict) or part not in node:
                return DEFAULTS.get(dotted)
            node = node[part]
        return node

    def track_input(self, path) -> Path:
        p = Path(path)
        self.inputs[str(p)] = hashlib.sha256(p.read_bytes()).hexdigest() if p.is_file() else "dir"
        return p

    def out_path(self, name: str) -> Path:
        self.outputs.append(name)
        return self.out_dir / name

    def write_manifest(self, subcommand: str):
        blob = json.dumps(self.config, sort_keys=True).encode("utf-8")
        manifest = {
            "subcommand": subcommand,
            "config_hash": hashlib.sha256(blob).hexdigest(),
            "config": self.config,
            "inputs": dict(sorted(self.inputs.items())),
            "outputs": sorted(self.outputs),
        }
        (self.out_dir / "run-manifest.json").write_text(
            json.dumps(manifest, sort_keys=True, indent=2) + "\n", encoding="utf-8"
        )


def _load_corpus(ctx: RunContext, args) -> corpus_mod.Corpus:
    path = ctx.track_input(args.corpus)
    return corpus_mod.load_corpus(path, args.format)


def _tokenizer(ctx: RunContext, args) -> lexical.Tokenizer:
    mode = ctx.get("tokenizer.mode", getattr(args, "tokenizer", None))
    return lexical.Tokenizer(mode=mode)


def _bm25_params(ctx: RunContext, args) -> lexical.Bm25Params:
    return lexical.Bm25Params(
        k1=float(ctx.get("bm25.k1", getattr(args, "k1", None))),
        b=float(ctx.get("bm25.b", getattr(args, "b", None))),
    )


def _split_queries(corpus: corpus_mod.Corpus, split: str | None) -> list[corpus_mod.Query]:
    if split in (None, "all"):
        return list(corpus.queries)
    return [q for q in corpus.queries if q.split == split]


def _gold_for(corpus: corpus_mod.Corpus, queries) -> dict[str, set[str]]:
    ids = {q.id for q in queries}
    return {qid: set(docs) for qid, docs in corpus.gold.items() if qid in ids}


def _case_indexes(corpus: corpus_mod.Corpus, tok) -> dict[str, lexical.InvertedIndex]:
    return {
        case.case_id: lexical.build_index(list(case.candidates), tok)
        for case in corpus.cases
    }


def _selection_rule(ctx: RunContext, args) -> predict_mod.SelectionRule:
    kind = getattr(args, "rule", None) or "topk-margin"
    if kind == "topk-margin":
        return predict_mod.SelectionRule(
            kind=kind,
            k=int(ctx.get("predict.k", getattr(args, "k", None))),
            m=float(ctx.get("predict.m", getattr(args, "m", None))),
        )
    return predict_mod.SelectionRule(
        kind="threshold", t=float(ctx.get("predict.t", getattr(args, "t", None)))
    )


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------


def cmd_index(ctx: RunContext, args) -> int:
    corpus = _load_corpus(ctx, args)
    tok = _tokenizer(ctx, args)
    if not corpus.articles:
        raise ConfigError("index subcommand needs a corpus with articles")
    index = lexical.build_index([(a.id, a.text) for a in corpus.articles], tok)
    lexical.save_index(index, ctx.out_path(args.out))
    print(f"indexed {index.N} documents (avg length {index.avg_doc_len:.2f})")
    return 0


def cmd_retrieve(ctx: RunContext, args) -> int:
    corpus = _load_corpus(ctx, args)
    tok = _tokenizer(ctx, args)
    params = _bm25_params(ctx, args)
    if args.index:
        index = lexical.load_index(ctx.track_input(args.index))
    else:
        index = lexical.build_index([(a.id, a.text) for a in corpus.articles], tok)
    queries = _split_queries(corpus, args.split)
    k = int(ctx.get("retrieve.k", args.k))
    texts = {a.id: a.text for a in corpus.articles}
    rows: dict[tuple[str, str, str], float] = {}
    for q in sorted(queries, key=lambda q: q.id):
        if args.scorer == "bm25":
            ranked = lexical.retrieve_top_k(index, q.text, k, params)
        else:
            sims = [
                (aid, lexical.tfidf_cosine(q.text, text, index.tokenizer, index))
                for aid, text in texts.items()
            ]
            sims.sort(key=lambda x: (-x[1], x[0]))
            ranked = sims[: min(k, len(sims))]
        for did, score in ranked:
            rows[(args.run_id, q.id, did)] = score
    matrix = scores_mod.ScoreMatrix(checkpoints=(args.run_id,), entries=rows)
    scores_mod.save_scores(matrix, ctx.out_path(args.out))
    print(f"retrieved top-{k} for {len(queries)} queries with {args.scorer}")
    return 0


def cmd_mine(ctx: RunContext, args) -> int:
    corpus = _load_corpus(ctx, args)
    tok = _tokenizer(ctx, args)
    n_neg = int(ctx.get("mining.n_neg", args.n_neg))
    strategy = args.strategy or (f"round{args.round}" if args.round else "round1")
    queries = _split_queries(corpus, args.split)
    gold = corpus.gold

    if strategy in ("round1", "datflt-q"):
        if corpus.cases:
            index = _case_indexes(corpus, tok)
        else:
            index = lexical.build_index([(a.id, a.text) for a in corpus.articles], tok)

    if strategy in ("round2", "datflt-a") and not (args.scores and args.checkpoint):
        raise ConfigError(f"{strategy} mining needs --scores and --checkpoint")
    if strategy == "datflt-q" and not (args.embeddings and args.predictions):
        raise ConfigError("datflt-q mining needs --embeddings and --predictions")

    if strategy == "round1":
        pairs = mining.mine_negatives_round1(queries, gold, index, n_neg, _bm25_params(ctx, args))
    elif strategy == "round2":
        matrix = scores_mod.load_scores(ctx.track_input(args.scores))
        pairs = mining.mine_negatives_round2(
            [q.id for q in queries], gold, matrix, args.checkpoint, n_neg
        )
    elif strategy == "datflt-a":
        matrix = scores_mod.load_scores(ctx.track_input(args.scores))
        pairs = mining.build_datflt_a([q.id for q in queries], gold, matrix, args.checkpoint, n_neg)
    elif strategy == "datflt-q":
        embeddings = scores_mod.load_embeddings(ctx.track_input(args.embeddings))
        preds = predict_mod.load_predictions(ctx.track_input(args.predictions))
        missed = mining.find_missed_queries(preds, gold if args.gold_based else None)
        train = [q for q in corpus.queries if q.split == "train"]
        pairs = mining.build_datflt_q(
            missed, embeddings, train, gold, index,
            n_near=int(ctx.get("mining.n_near", args.n_near)), n_neg=n_neg,
        )
    else:
        raise ConfigError(f"unknown mining strategy {strategy!r}")

    mining.check_label_consistency(pairs, gold)
    mining.save_pairs(pairs, ctx.out_path(args.out))
    for record in pairs.skipped:
        print(f"warning: skipped {record}", file=sys.stderr)
    print(f"mined {len(pairs.pairs)} pairs ({strategy})")
    return 0


def cmd_ensemble_search(ctx: RunContext, args) -> int:
    corpus = _load_corpus(ctx, args)
    matrix = scores_mod.load_scores(ctx.track_input(args.scores))
    queries = _split_queries(corpus, args.split)
    gold = _gold_for(corpus, queries)
    cfg = ensemble_mod.EnsembleConfig(
        grid_step=float(ctx.get("ensemble.grid_step", args.grid_step)),
        metric=ctx.get("ensemble.metric", args.metric),
        h=len(matrix.checkpoints),
    )
    rule = _selection_rule(ctx, args)
    weights, value = ensemble_mod.grid_search_weights(matrix, gold, cfg, rule, jobs=ctx.jobs)
    ensemble_mod.save_ensemble(weights, cfg.metric, value, cfg.grid_step, ctx.out_path(args.out))
    print(f"best {cfg.metric} = {value:.4f} at {weights.raw}")
    return 0


def cmd_predict(ctx: RunContext, args) -> int:
    matrix = scores_mod.load_scores(ctx.track_input(args.scores))
    if args.ensemble:
        weights, _, _, _ = ensemble_mod.load_ensemble(ctx.track_input(args.ensemble))
    elif args.checkpoint:
        weights = ensemble_mod.WeightVector(
            raw={c: (1.0 if c == args.checkpoint else 0.0) for c in matrix.checkpoints}
        )
    elif len(matrix.checkpoints) == 1:
        weights = ensemble_mod.WeightVector(raw={matrix.checkpoints[0]: 1.0})
    else:
        raise ConfigError("predict needs --ensemble or --checkpoint for multi-checkpoint scores")
    ranked = predict_mod.rank_scores(ensemble_mod.weighted_scores(matrix, weights))

    if args.search:
        if not args.corpus:
            raise ConfigError("--search needs --corpus for validation gold")
        corpus = _load_corpus(ctx, args)
        gold = _gold_for(corpus, _split_queries(corpus, args.split))
        metric = (
            metrics_mod.micro_f1 if args.metric == "micro-f1" else metrics_mod.macro_f2_value
        )
        k, m, value = predict_mod.search_k_m(
            ranked, gold,
            list(ctx.get("predict.k_range", _parse_int_list(args.k_range))),
            list(ctx.get("predict.m_grid", _parse_float_list(args.m_grid))),
            metric,
        )
        rule = predict_mod.SelectionRule(kind="topk-margin", k=k, m=m)
        print(f"best {args.metric} = {value:.4f} at k={k}, m={m}")
    else:
        rule = _selection_rule(ctx, args)

    preds = {qid: rule.apply(rows) for qid, rows in sorted(ranked.items())}
    predict_mod.save_predictions(preds, ctx.out_path(args.out))
    predict_mod.save_rule(rule, ctx.out_path(args.rule_out))
    print(f"predicted for {len(preds)} queries with {rule.kind}")
    return 0


def cmd_merge(ctx: RunContext, args) -> int:
    main_preds = predict_mod.load_predictions(ctx.track_input(args.main))
    aux = [predict_mod.load_predictions(ctx.track_input(p)) for p in args.aux]
    gold = None
    if args.gold:
        raw = json.loads(ctx.track_input(args.gold).read_text(encoding="utf-8"))
        gold = {qid: set(docs) for qid, docs in raw.items()}
    missed = mining.find_missed_queries(main_preds, gold)
    merged = ensemble_mod.main_auxiliary_merge(main_preds, aux, missed)
    predict_mod.save_predictions(merged, ctx.out_path(args.out))
    print(f"merged {len(aux)} auxiliaries into {len(missed.query_ids)} missed queries "
          f"({missed.defined_by})")
    return 0


def cmd_entail_extract(ctx: RunContext, args) -> int:
    corpus = _load_corpus(ctx, args)
    annotations = scores_mod.load_srl(ctx.track_input(args.srl))
    pairs: list[entail.CondStatePair] = []
    for article in corpus.articles:
        pairs.extend(entail.extract_pairs(article, annotations))
    entail.save_cond_pairs(pairs, ctx.out_path(args.out))
    degraded = sum(p.degraded for p in pairs)
    print(f"extracted {len(pairs)} condition-statement pairs ({degraded} degraded)")
    return 0


def cmd_entail_infer(ctx: RunContext, args) -> int:
    corpus = _load_corpus(ctx, args)
    pairs = entail.load_cond_pairs(ctx.track_input(args.pairs))
    tok = _tokenizer(ctx, args)
    index = entail.condition_index(pairs, tok)
    by_article: dict[str, list[entail.CondStatePair]] = {}
    for p in pairs:
        by_article.setdefault(p.source[0], []).append(p)
    answers = []
    for q in sorted(_split_queries(corpus, args.split), key=lambda q: q.id):
        if corpus.gold.get(q.id):
            pool = [p for aid in sorted(corpus.gold[q.id]) for p in by_article.get(aid, [])]
        else:
            pool = pairs
        if not pool:
            continue
        dec = entail.decompose_query(q)
        answer, matched = entail.infer_yes_no(dec, pool, tok, index, lang=q.lang)
        answers.append(
            {"query_id": q.id, "answer": answer, "method": "condition-statement",
             "matched_pair": matched}
        )
    entail.save_answers(answers, ctx.out_path(args.out))
    print(f"inferred YES/NO for {len(answers)} queries")
    return 0


def cmd_svm_train(ctx: RunContext, args) -> int:
    examples = []
    path = ctx.track_input(args.data)
    for line in open(path, encoding="utf-8"):
        if not line.strip():
            continue
        obj = json.loads(line)
        examples.append((entail.svm_example_text(obj["query"], obj["article"]), obj["label"]))
    model = entail.svm_train(
        examples,
        _tokenizer(ctx, args),
        lam=float(ctx.get("entail.svm_lambda", args.svm_lambda)),
        epochs=int(ctx.get("entail.svm_epochs", args.svm_epochs)),
        seed=int(ctx.get("seeds.svm", args.seed)),
    )
    entail.save_svm(model, ctx.out_path(args.out))
    acc = entail.svm_training_accuracy(model, examples)
    print(f"trained SVM on {len(examples)} examples (training accuracy {acc:.3f})")
    return 0


def cmd_svm_predict(ctx: RunContext, args) -> int:
    model = entail.load_svm(ctx.track_input(args.model))
    answers = []
    for line in open(ctx.track_input(args.data), encoding="utf-8"):
        if not line.strip():
            continue
        obj = json.loads(line)
        answer, margin = entail.svm_predict(model, obj["query"], obj["article"])
        answers.append(
            {"query_id": obj["query_id"], "answer": answer, "method": "svm",
             "matched_pair": None, "margin": margin}
        )
    entail.save_answers(answers, ctx.out_path(args.out))
    print(f"svm-predicted {len(answers)} answers")
    return 0


def cmd_augment(ctx: RunContext, args) -> int:
    corpus = _load_corpus(ctx, args)
    ratio = float(ctx.get("entail.mask_ratio", args.mask_ratio))
    top_k = int(ctx.get("entail.top_k_fill", args.top_k))
    seed = int(ctx.get("seeds.augment", args.seed))
    queries = sorted(_split_queries(corpus, args.split), key=lambda q: q.id)
    templates = [entail.make_masked_templates(q, ratio, seed, top_k) for q in queries]
    entail.save_templates(templates, ctx.out_path(args.templates_out))
    print(f"wrote {len(templates)} masked templates")
    if args.fills:
        fills = scores_mod.load_fills(ctx.track_input(args.fills))
        texts = {a.id: a.text for a in corpus.articles}
        realize_seed = int(ctx.get("seeds.realize", args.seed))
        examples = []
        for t in templates:
            gold_texts = [texts[aid] for aid in sorted(corpus.gold.get(t.query_id, set()))]
            examples.append(entail.realize_augmented(t, fills, realize_seed, gold_texts))
        entail.save_augmented(examples, ctx.out_path(args.out))
        print(f"realized {len(examples)} augmented examples")
    return 0


def cmd_route(ctx: RunContext, args) -> int:
    corpus = _load_corpus(ctx, args)
    cs = entail.load_answers(ctx.track_input(args.cs))
    svm = entail.load_answers(ctx.track_input(args.svm))
    answers = []
    for q in sorted(corpus.queries, key=lambda q: q.id):
        if q.id not in cs or q.id not in svm:
            continue
        kind = entail.detect_query_kind(q)
        final = entail.route_ensemble(cs[q.id], svm[q.id], kind)
        answers.append(
            {"query_id": q.id, "answer": final, "method": "route",
             "matched_pair": None, "kind": kind.kind}
        )
    entail.save_answers(answers, ctx.out_path(args.out))
    print(f"routed {len(answers)} answers")
    return 0


def cmd_evaluate(ctx: RunContext, args) -> int:
    if args.answers:
        answers = entail.load_answers(ctx.track_input(args.answers))
        gold = json.loads(ctx.track_input(args.gold_answers).read_text(encoding="utf-8"))
        acc = metrics_mod.accuracy(answers, gold)
        report = metrics_mod.MetricReport(accuracy=acc)
        metrics_mod.save_report(report, ctx.out_path(args.out))
        print(metrics_mod.format_report(report))
        return 0
    preds = predict_mod.load_predictions(ctx.track_input(args.pred))
    raw = json.loads(ctx.track_input(args.gold).read_text(encoding="utf-8"))
    gold = {qid: set(docs) for qid, docs in raw.items()}
    ranked = None
    if args.ranked_scores:
        matrix = scores_mod.load_scores(ctx.track_input(args.ranked_scores))
        ckpt = args.checkpoint or matrix.checkpoints[0]
        ranked = {
            qid: [did for did, _ in matrix.ranked(ckpt, qid)] for qid in sorted(gold)
        }
    report = metrics_mod.build_report(preds, gold, ranked)
    metrics_mod.save_report(report, ctx.out_path(args.out))
    print(metrics_mod.format_report(report))
    return 0


def cmd_stats(ctx: RunContext, args) -> int:
    corpus = _load_corpus(ctx, args)
    stats = corpus_mod.compute_stats(corpus)
    payload = {
        "n_train": stats.n_train,
        "n_validation": stats.n_validation,
        "n_test": stats.n_test,
        "candidates_per_case": stats.candidates_per_case,
        "entailments_per_case": stats.entailments_per_case,
    }
    if args.out:
        ctx.out_path(args.out).write_text(
            json.dumps(payload, sort_keys=True, indent=2) + "\n", encoding="utf-8"
        )
    print(json.dumps(payload, sort_keys=True))
    return 0


# ---------------------------------------------------------------------------
# argument parsing
# ---------------------------------------------------------------------------


def _parse_int_list(raw: str | None) -> list[int] | None:
    return [int(x) for x in raw.split(",")] if raw else None


def _parse_float_list(raw: str | None) -> list[float] | None:
    return [float(x) for x in raw.split(",")] if raw else None


def _add_common(sub, corpus=False):
    sub.add_argument("--config", help="TOML config file")
    sub.add_argument("--set", action="append", metavar="KEY=VALUE",
                     help="override a config value (repeatable)")
    sub.add_argument("--out-dir", default=".", help="directory for output artifacts")
    sub.add_argument("--jobs", type=int, default=1, help="worker cap for parallel stages")
    if corpus:
        sub.add_argument("--corpus", required=True, help="corpus path")
        sub.add_argument(
            "--format", default="canonical-jsonl",
            choices=["canonical-jsonl", "coliee-task2-dir", "coliee-statute-xml"],
        )
        sub.add_argument("--split", default="all",
                         choices=["all", "train", "validation", "test"])
    sub.add_argument("--tokenizer", choices=["word", "char-bigram"], default=None)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="lexkit", description=__doc__)
    subs = parser.add_subparsers(dest="subcommand", required=True)

    s = subs.add_parser("index", help="build and persist an inverted index")
    _add_common(s, corpus=True)
    s.add_argument("--out", default="index.lxidx")
    s.set_defaults(func=cmd_index)

    s = subs.add_parser("retrieve", help="lexical top-k retrieval to scores.tsv")
    _add_common(s, corpus=True)
    s.add_argument("--index", help="persisted index file (default: build in memory)")
    s.add_argument("--scorer", default="bm25", choices=["bm25", "tfidf"])
    s.add_argument("--k", type=int, default=None)
    s.add_argument("--k1", type=float, default=None)
    s.add_argument("--b", type=float, default=None)
    s.add_argument("--run-id", default="bm25")
    s.add_argument("--out", default="scores.tsv")
    s.set_defaults(func=cmd_retrieve)

    s = subs.add_parser("mine", help="build training pairs")
    _add_common(s, corpus=True)
    s.add_argument("--strategy", choices=["round1", "round2", "datflt-q", "datflt-a"])
    s.add_argument("--round", type=int, choices=[1, 2])
    s.add_argument("--n-neg", type=int, default=None)
    s.add_argument("--n-near", type=int, default=None)
    s.add_argument("--scores", help="scores.tsv (round2 / datflt-a)")
    s.add_argument("--checkpoint", help="checkpoint id for model-ranked negatives")
    s.add_argument("--embeddings", help="embeddings.jsonl (datflt-q)")
    s.add_argument("--predictions", help="predictions.jsonl to detect missed queries")
    s.add_argument("--gold-based", action="store_true",
                   help="define missed queries against gold instead of empty predictions")
    s.add_argument("--k1", type=float, default=None)
    s.add_argument("--b", type=float, default=None)
    s.add_argument("--out", default="pairs.jsonl")
    s.set_defaults(func=cmd_mine)

    s = subs.add_parser("ensemble-search", help="grid-search checkpoint weights")
    _add_common(s, corpus=True)
    s.add_argument("--scores", required=True)
    s.add_argument("--grid-step", type=float, default=None)
    s.add_argument("--metric", default=None, choices=["micro-f1", "macro-f2"])
    s.add_argument("--rule", default="topk-margin", choices=["topk-margin", "threshold"])
    s.add_argument("--k", type=int, default=None)
    s.add_argument("--m", type=float, default=None)
    s.add_argument("--t", type=float, default=None)
    s.add_argument("--out", default="ensemble.json")
    s.set_defaults(func=cmd_ensemble_search)

    s = subs.add_parser("predict", help="apply a selection rule to scores")
    _add_common(s)
    s.add_argument("--scores", required=True)
    s.add_argument("--ensemble", help="ensemble.json with searched weights")
    s.add_argument("--checkpoint", help="use one checkpoint's scores directly")
    s.add_argument("--rule", default="topk-margin", choices=["topk-margin", "threshold"])
    s.add_argument("--k", type=int, default=None)
    s.add_argument("--m", type=float, default=None)
    s.add_argument("--t", type=float, default=None)
    s.add_argument("--search", action="store_true", help="grid-search k and m first")
    s.add_argument("--corpus", help="corpus path (for --search gold)")
    s.add_argument("--format", default="canonical-jsonl",
                   choices=["canonical-jsonl", "coliee-task2-dir", "coliee-statute-xml"])
    s.add_argument("--split", default="validation",
                   choices=["all", "train", "validation", "test"])
    s.add_argument("--metric", default="micro-f1", choices=["micro-f1", "macro-f2"])
    s.add_argument("--k-range", help="comma-separated k values for --search")
    s.add_argument("--m-grid", help="comma-separated m values for --search")
    s.add_argument("--out", default="predictions.jsonl")
    s.add_argument("--rule-out", default="rule.json")
    s.set_defaults(func=cmd_predict)

    s = subs.add_parser("merge", help="main-auxiliary prediction merge")
    _add_common(s)
    s.add_argument("--main", required=True)
    s.add_argument("--aux", action="append", required=True)
    s.add_argument("--gold", help="labels.json for gold-based missed detection")
    s.add_argument("--out", default="predictions.jsonl")
    s.set_defaults(func=cmd_merge)

    s = subs.add_parser("entail-extract", help="extract condition-statement pairs")
    _add_common(s, corpus=True)
    s.add_argument("--srl", required=True, help="srl.jsonl annotations")
    s.add_argument("--out", default="condstate.jsonl")
    s.set_defaults(func=cmd_entail_extract)

    s = subs.add_parser("entail-infer", help="negation-parity YES/NO inference")
    _add_common(s, corpus=True)
    s.add_argument("--pairs", required=True, help="condstate.jsonl")
    s.add_argument("--out", default="answers.jsonl")
    s.set_defaults(func=cmd_entail_infer)

    s = subs.add_parser("svm-train", help="train the YES/NO SVM")
    _add_common(s)
    s.add_argument("--data", required=True,
                   help='JSONL records {"query","article","label"}')
    s.add_argument("--svm-lambda", type=float, default=None)
    s.add_argument("--svm-epochs", type=int, default=None)
    s.add_argument("--seed", type=int, default=None)
    s.add_argument("--out", default="svm.json")
    s.set_defaults(func=cmd_svm_train)

    s = subs.add_parser("svm-predict", help="predict YES/NO with a trained SVM")
    _add_common(s)
    s.add_argument("--model", required=True)
    s.add_argument("--data", required=True,
                   help='JSONL records {"query_id","query","article"}')
    s.add_argument("--out", default="answers.jsonl")
    s.set_defaults(func=cmd_svm_predict)

    s = subs.add_parser("augment", help="masked templates and realization")
    _add_common(s, corpus=True)
    s.add_argument("--mask-ratio", type=float, default=None)
    s.add_argument("--top-k", type=int, default=None)
    s.add_argument("--seed", type=int, default=None)
    s.add_argument("--fills", help="fills.jsonl from the bridge")
    s.add_argument("--templates-out", default="templates.jsonl")
    s.add_argument("--out", default="augmented.jsonl")
    s.set_defaults(func=cmd_augment)

    s = subs.add_parser("route", help="route condition-statement vs SVM answers")
    _add_common(s, corpus=True)
    s.add_argument("--cs", required=True, help="condition-statement answers.jsonl")
    s.add_argument("--svm", required=True, help="svm answers.jsonl")
    s.add_argument("--out", default="answers.jsonl")
    s.set_defaults(func=cmd_route)

    s = subs.add_parser("evaluate", help="score predictions against gold")
    _add_common(s)
    s.add_argument("--pred", help="predictions.jsonl")
    s.add_argument("--gold", help="labels.json")
    s.add_argument("--ranked-scores", help="scores.tsv for MAP / R@k")
    s.add_argument("--checkpoint", help="checkpoint for --ranked-scores")
    s.add_argument("--answers", help="answers.jsonl (accuracy mode)")
    s.add_argument("--gold-answers", help="gold YES/NO json map (accuracy mode)")
    s.add_argument("--metric", default="all")
    s.add_argument("--out", default="report.json")
    s.set_defaults(func=cmd_evaluate)

    s = subs.add_parser("stats", help="dataset statistics")
    _add_common(s, corpus=True)
    s.add_argument("--out", default=None)
    s.set_defaults(func=cmd_stats)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        ctx = RunContext(args)
        status = args.func(ctx, args)
        ctx.write_manifest(args.subcommand)
        return status
    except LexkitError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (OSError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
