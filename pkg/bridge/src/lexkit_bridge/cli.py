"""Bridge command line: run one model job, emit one canonical file.

    bridge <kind> --model <id> --in <path> --out <path> [options]

Kinds and their file contracts:
  score    pairs-in JSONL {"query_id","doc_id","query","doc"}  -> scores.tsv
  embed    texts JSONL {"id","text"}                           -> embeddings.jsonl
  fill     templates.jsonl (tokens with [MASK])                -> fills.jsonl
  srl      sentences JSONL {"sentence_id","text"}              -> srl.jsonl
  finetune pairs.jsonl + --corpus dir                          -> checkpoint dir

Model ids starting with "dummy" select the deterministic offline backend;
anything else is treated as a transformers id (requires the hf extra).
Outputs are written atomically; a failed job leaves no partial file.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import dummy
from .io import BridgeError, atomic_write_lines, dedup, read_jsonl

MASK = "[MASK]"


def _warn(msg: str):
    print(f"warning: {msg}", file=sys.stderr)


def _is_dummy(model: str) -> bool:
    return model == "dummy" or model.startswith("dummy:")


def _hf():
    from . import hf

    return hf


def cmd_score(args) -> int:
    rows = dedup(read_jsonl(args.infile), ("query_id", "doc_id"), _warn)
    for row in rows:
        for field in ("query_id", "doc_id", "query", "doc"):
            if field not in row:
                raise BridgeError(f"score input record missing {field!r}")
    if _is_dummy(args.model):
        scores = [dummy.score_pair(args.model, r["query"], r["doc"]) for r in rows]
    else:
        scores = _hf().score_pairs(args.model, rows, args.max_tokens,
                                   args.batch_size, args.device)
    for s in scores:
        if not 0.0 <= s <= 1.0:
            raise BridgeError(f"score {s} outside [0, 1]")
    n = atomic_write_lines(
        args.out,
        (f"{args.model}\t{r['query_id']}\t{r['doc_id']}\t{s!r}"
         for r, s in zip(rows, scores)),
    )
    print(f"scored {n} pairs with {args.model}")
    return 0


def cmd_embed(args) -> int:
    rows = dedup(read_jsonl(args.infile), ("id",), _warn)
    for row in rows:
        if "id" not in row or "text" not in row:
            raise BridgeError("embed input record needs 'id' and 'text'")
    if _is_dummy(args.model):
        vectors = [dummy.embed_text(args.model, r["text"], args.dim) for r in rows]
    else:
        vectors = _hf().embed_texts(args.model, [r["text"] for r in rows],
                                    args.max_tokens, args.batch_size, args.device)
    n = atomic_write_lines(
        args.out,
        (json.dumps({"id": r["id"], "vector": v}) for r, v in zip(rows, vectors)),
    )
    print(f"embedded {n} texts with {args.model}")
    return 0


def cmd_fill(args) -> int:
    rows = dedup(read_jsonl(args.infile), ("template_id",), _warn)

    def records():
        for row in rows:
            if "template_id" not in row or "tokens" not in row:
                raise BridgeError("fill input record needs 'template_id' and 'tokens'")
            tokens = list(row["tokens"])
            n_masks = sum(1 for t in tokens if t == MASK)
            if n_masks == 0:
                raise BridgeError(f"template {row['template_id']!r} has no {MASK}")
            if _is_dummy(args.model):
                per_mask = [
                    dummy.fill_candidates(args.model, row["template_id"], i, args.top_k)
                    for i in range(n_masks)
                ]
            else:
                per_mask = _hf().fill_masks(args.model, tokens, args.top_k,
                                            args.max_tokens, args.device)
            for i, cands in enumerate(per_mask):
                if len(cands) != args.top_k:
                    raise BridgeError(
                        f"expected exactly {args.top_k} candidates, got {len(cands)}"
                    )
                yield json.dumps({
                    "template_id": row["template_id"],
                    "mask_index": i,
                    "candidates": [{"token": t, "prob": p} for t, p in cands],
                }, ensure_ascii=False)

    n = atomic_write_lines(args.out, records())
    print(f"filled masks for {n} (template, mask) slots with {args.model}")
    return 0


def cmd_srl(args) -> int:
    rows = dedup(read_jsonl(args.infile), ("sentence_id",), _warn)

    def records():
        for row in rows:
            if "sentence_id" not in row or "text" not in row:
                raise BridgeError("srl input record needs 'sentence_id' and 'text'")
            if _is_dummy(args.model):
                ann = dummy.srl_annotate(row["text"])
            else:
                ann = _hf().srl_annotate(args.model, row["text"])
            yield json.dumps({
                "sentence_id": row["sentence_id"],
                "tokens": ann["tokens"],
                "predicates": ann["predicates"],
            }, ensure_ascii=False)

    n = atomic_write_lines(args.out, records())
    print(f"annotated {n} sentences with {args.model}")
    return 0


def _corpus_texts(corpus_dir: Path) -> dict[str, str]:
    texts: dict[str, str] = {}
    for name, id_key, text_key in (("articles.jsonl", "id", "text"),
                                   ("queries.jsonl", "id", "text")):
        path = corpus_dir / name
        if path.exists():
            for row in read_jsonl(path):
                texts[row[id_key]] = row[text_key]
    if not texts:
        raise BridgeError(f"no articles.jsonl or queries.jsonl under {corpus_dir}")
    return texts


def cmd_finetune(args) -> int:
    if not args.corpus:
        raise BridgeError("finetune needs --corpus with the document texts")
    if not _is_dummy(args.model):
        _hf().finetune(args.model)  # raises with guidance
    pairs = read_jsonl(args.infile)
    for row in pairs:
        for field in ("query_id", "doc_id", "label"):
            if field not in row:
                raise BridgeError(f"pair record missing {field!r}")
    texts = _corpus_texts(Path(args.corpus))
    checkpoint = dummy.finetune(args.model, pairs, texts)

    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    atomic_write_lines(out_dir / "model.json",
                       [json.dumps(checkpoint, sort_keys=True, ensure_ascii=False)])
    seen = set()
    lines = []
    ckpt_id = f"{args.model}-ft"
    for row in pairs:
        key = (row["query_id"], row["doc_id"])
        if key in seen:
            continue
        seen.add(key)
        query_text = texts.get(row["query_id"], row["query_id"])
        doc_text = texts[row["doc_id"]]
        score = dummy.finetuned_score(checkpoint, query_text, doc_text)
        lines.append(f"{ckpt_id}\t{row['query_id']}\t{row['doc_id']}\t{score!r}")
    atomic_write_lines(out_dir / "scores.tsv", lines)
    print(f"fine-tuned {ckpt_id}: checkpoint + {len(lines)} validation scores")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="bridge", description=__doc__)
    subs = parser.add_subparsers(dest="kind", required=True)
    handlers = {
        "score": cmd_score,
        "embed": cmd_embed,
        "fill": cmd_fill,
        "srl": cmd_srl,
        "finetune": cmd_finetune,
    }
    for kind, handler in handlers.items():
        sub = subs.add_parser(kind)
        sub.add_argument("--model", required=True, help="model id; 'dummy' runs offline")
        sub.add_argument("--in", dest="infile", required=True)
        sub.add_argument("--out", required=True)
        sub.add_argument("--max-tokens", type=int, default=512)
        sub.add_argument("--batch-size", type=int, default=8)
        sub.add_argument("--device", default="cpu")
        if kind == "embed":
            sub.add_argument("--dim", type=int, default=32)
        if kind == "fill":
            sub.add_argument("--top-k", type=int, default=5)
        if kind == "finetune":
            sub.add_argument("--corpus", help="directory with articles/queries JSONL")
        sub.set_defaults(func=handler)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except BridgeError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
