"""Model construction and batch preparation.

Baseline variants zero the encoder attention mask over the pattern character
positions of each input, so no query (and no decoder cross-attention) can
read the pattern; everything else about the batch is unchanged.
"""

from __future__ import annotations

from enum import Enum

import torch
from transformers import T5Config, T5ForConditionalGeneration

from .codec import PAD_ID, VOCAB_SIZE, Codec, pattern_position_mask


class Variant(Enum):
    BEAT = "beat"
    CV = "cv"
    BASELINE_BEAT = "baseline-beat"
    BASELINE_CV = "baseline-cv"

    @property
    def is_baseline(self) -> bool:
        return self in (Variant.BASELINE_BEAT, Variant.BASELINE_CV)

    @property
    def dataset_kind(self) -> str:
        """The pattern kind this variant trains on ("beat" or "cv")."""
        return "cv" if self in (Variant.CV, Variant.BASELINE_CV) else "beat"


MODEL_SIZES = {
    # tiny fits a CPU-only run; full mirrors a ~300M byte-level setup and
    # exists for completeness, not for the test suite
    "tiny": dict(d_model=64, d_kv=16, d_ff=128, num_layers=2,
                 num_decoder_layers=2, num_heads=4),
    "small": dict(d_model=128, d_kv=32, d_ff=256, num_layers=3,
                  num_decoder_layers=3, num_heads=4),
    "full": dict(d_model=1472, d_kv=64, d_ff=3584, num_layers=12,
                 num_decoder_layers=4, num_heads=6),
}


def build_model(size: str = "tiny", seed: int = 0) -> T5ForConditionalGeneration:
    if size not in MODEL_SIZES:
        raise ValueError(f"unknown model size {size!r}; choose from {sorted(MODEL_SIZES)}")
    config = T5Config(
        vocab_size=VOCAB_SIZE,
        decoder_start_token_id=PAD_ID,
        pad_token_id=PAD_ID,
        eos_token_id=1,
        **MODEL_SIZES[size],
    )
    torch.manual_seed(seed)
    return T5ForConditionalGeneration(config)


def make_batch(
    records: list[dict],
    codec: Codec,
    variant: Variant,
    with_labels: bool = True,
    max_input_len: int = 256,
    max_target_len: int = 64,
) -> dict[str, torch.Tensor]:
    """Tensors for one batch of masked-infilling records.

    attention_mask is 1 over real tokens, 0 over padding, and additionally 0
    over pattern positions for baseline variants.
    """
    inputs = [codec.encode(r["input"])[:max_input_len] for r in records]
    input_len = max(len(ids) for ids in inputs)
    input_ids = torch.full((len(inputs), input_len), PAD_ID, dtype=torch.long)
    attention_mask = torch.zeros((len(inputs), input_len), dtype=torch.long)
    for row, ids in enumerate(inputs):
        input_ids[row, : len(ids)] = torch.tensor(ids)
        attention_mask[row, : len(ids)] = 1
        if variant.is_baseline:
            for position, flagged in enumerate(pattern_position_mask(ids)):
                if flagged:
                    attention_mask[row, position] = 0

    batch = {"input_ids": input_ids, "attention_mask": attention_mask}
    if with_labels:
        targets = [codec.encode(r["target"])[:max_target_len] for r in records]
        target_len = max(len(ids) for ids in targets)
        labels = torch.full((len(targets), target_len), -100, dtype=torch.long)
        for row, ids in enumerate(targets):
            labels[row, : len(ids)] = torch.tensor(ids)
        batch["labels"] = labels
    return batch
