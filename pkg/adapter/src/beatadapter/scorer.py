"""Coherence scorer child process.

Speaks the evaluator's line protocol: one JSON request per stdin line with
"verse", "span_start_char", "span_end_char"; answers each with one
non-negative decimal on stdout. The score is the model's per-token mean
cross-entropy of the span under teacher forcing, with the span replaced by
the mask marker in the input. Lower is better.
"""

from __future__ import annotations

import json
import sys
from pathlib import Path

import torch

from .codec import Codec
from .modeling import Variant, make_batch
from .training import load_checkpoint

# stands in for the hidden pattern between the mask markers; a checkpoint
# trained with pattern attention zeroed provably ignores its content
PATTERN_PLACEHOLDER = "0"


def span_cross_entropy(model, codec: Codec, saved: dict, verse: str,
                       start: int, end: int) -> float:
    span = verse[start:end]
    mask_open, mask_close, target_prefix = codec.markers
    record = {
        "input": verse[:start] + mask_open + f" {PATTERN_PLACEHOLDER} " + mask_close + verse[end:],
        "target": target_prefix + " " + span,
    }
    batch = make_batch(
        [record], codec, Variant(saved["variant"]),
        max_input_len=saved["max_input_len"],
        max_target_len=saved["max_target_len"],
    )
    labels = batch["labels"]
    # labels stay intact for the forward pass (the decoder inputs are the
    # shifted labels); the span-only slice is taken from the logits after
    with torch.no_grad():
        logits = model(
            input_ids=batch["input_ids"],
            attention_mask=batch["attention_mask"],
            labels=labels,
        ).logits[0]
    # score the span bytes and eos only, not the constant prefix marker
    prefix_tokens = len(codec.encode(target_prefix + " ", add_eos=False))
    span_logits = logits[prefix_tokens:]
    span_labels = labels[0, prefix_tokens:]
    loss = torch.nn.functional.cross_entropy(span_logits, span_labels)
    return float(loss)


def serve(checkpoint_dir: Path, stdin=None, stdout=None, stderr=None) -> int:
    """Load the model, then answer requests until stdin closes."""
    stdin = stdin if stdin is not None else sys.stdin
    stdout = stdout if stdout is not None else sys.stdout
    stderr = stderr if stderr is not None else sys.stderr
    try:
        model, codec, saved = load_checkpoint(checkpoint_dir)
    except Exception as exc:
        print(f"beatadapter: cannot load scorer model: {exc}", file=stderr)
        return 3
    # header goes to stderr; stdout carries nothing but answers
    print(
        "beatadapter coherence scorer: per-token mean cross-entropy over the "
        "infilled span (not per-span sum); lower is more coherent",
        file=stderr,
        flush=True,
    )
    for line in stdin:
        line = line.strip()
        if not line:
            continue
        request = json.loads(line)
        value = span_cross_entropy(
            model, codec, saved,
            request["verse"],
            int(request["span_start_char"]),
            int(request["span_end_char"]),
        )
        print(f"{value:.6f}", file=stdout, flush=True)
    return 0
