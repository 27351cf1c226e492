"""Optional transformers-backed implementations.

Model availability is environment-dependent; every loader failure surfaces
as a BridgeError so the CLI exits nonzero without writing partial output.
Ids are passed to transformers verbatim: scoring expects a monoT5-style
seq-to-seq ranker (true/false token softmax), filling any masked LM.
"""

from __future__ import annotations

from .io import BridgeError


def _import_transformers():
    try:
        import torch  # noqa: F401
        import transformers
    except ImportError as exc:
        raise BridgeError(
            f"transformers backend requested but not importable: {exc}"
        ) from exc
    return transformers


def _load(loader, model_id: str):
    try:
        return loader(model_id)
    except Exception as exc:  # model resolution is environment-dependent
        raise BridgeError(f"cannot load model {model_id!r}: {exc}") from exc


def score_pairs(model_id: str, rows: list[dict], max_tokens: int, batch_size: int,
                device: str) -> list[float]:
    """Seq-to-seq pointwise ranking: softmax over the true/false token logits."""
    import torch

    transformers = _import_transformers()
    tokenizer = _load(transformers.AutoTokenizer.from_pretrained, model_id)
    model = _load(transformers.AutoModelForSeq2SeqLM.from_pretrained, model_id)
    model.to(device).eval()
    true_id = tokenizer.encode("true", add_special_tokens=False)[0]
    false_id = tokenizer.encode("false", add_special_tokens=False)[0]
    scores: list[float] = []
    with torch.no_grad():
        for i in range(0, len(rows), batch_size):
            batch = rows[i : i + batch_size]
            prompts = [
                f"Query: {r['query']} Document: {r['doc']} Relevant:" for r in batch
            ]
            enc = tokenizer(prompts, return_tensors="pt", padding=True,
                            truncation=True, max_length=max_tokens).to(device)
            start = torch.full((len(batch), 1), model.config.decoder_start_token_id,
                               device=device)
            logits = model(**enc, decoder_input_ids=start).logits[:, 0, :]
            pair = torch.softmax(logits[:, [true_id, false_id]], dim=-1)
            scores.extend(float(p) for p in pair[:, 0])
    return scores


def embed_texts(model_id: str, texts: list[str], max_tokens: int, batch_size: int,
                device: str) -> list[list[float]]:
    """First-token (CLS) hidden state per text."""
    import torch

    transformers = _import_transformers()
    tokenizer = _load(transformers.AutoTokenizer.from_pretrained, model_id)
    model = _load(transformers.AutoModel.from_pretrained, model_id)
    model.to(device).eval()
    out: list[list[float]] = []
    with torch.no_grad():
        for i in range(0, len(texts), batch_size):
            enc = tokenizer(texts[i : i + batch_size], return_tensors="pt",
                            padding=True, truncation=True, max_length=max_tokens).to(device)
            hidden = model(**enc).last_hidden_state[:, 0, :]
            out.extend([float(x) for x in row] for row in hidden)
    return out


def fill_masks(model_id: str, tokens_with_masks: list[str], k: int, max_tokens: int,
               device: str) -> list[list[tuple[str, float]]]:
    """Top-k candidates per [MASK], probability descending."""
    import torch

    transformers = _import_transformers()
    tokenizer = _load(transformers.AutoTokenizer.from_pretrained, model_id)
    model = _load(transformers.AutoModelForMaskedLM.from_pretrained, model_id)
    model.to(device).eval()
    text = " ".join(
        tokenizer.mask_token if t == "[MASK]" else t for t in tokens_with_masks
    )
    enc = tokenizer(text, return_tensors="pt", truncation=True,
                    max_length=max_tokens).to(device)
    with torch.no_grad():
        logits = model(**enc).logits[0]
    positions = (enc["input_ids"][0] == tokenizer.mask_token_id).nonzero().flatten()
    results = []
    for pos in positions:
        probs = torch.softmax(logits[pos], dim=-1)
        top = torch.topk(probs, k)
        results.append([
            (tokenizer.decode([idx]).strip(), float(p))
            for idx, p in zip(top.indices, top.values)
        ])
    return results


def srl_annotate(model_id: str, text: str):
    raise BridgeError(
        "no transformers SRL head is bundled; run an external tagger and freeze "
        "its output, or use the dummy backend"
    )


def finetune(model_id: str, *args, **kwargs):
    raise BridgeError(
        "transformer fine-tuning is out of scope for the bridge driver; "
        "consume pairs.jsonl with your training stack and export scores.tsv"
    )
