"""Greedy inference over a masked-infilling dataset, emitting evaluator rows."""

from __future__ import annotations

import json
from pathlib import Path

import torch

from .codec import Codec
from .modeling import Variant, make_batch
from .training import TrainConfig, load_checkpoint, load_records


def generate_span(model, codec: Codec, saved: dict, record: dict) -> str:
    """The model's infill for one record, with the target prefix stripped."""
    return generate_spans(model, codec, saved, [record])[0]


def generate_spans(model, codec: Codec, saved: dict, records: list[dict]) -> list[str]:
    variant = Variant(saved["variant"])
    batch = make_batch(
        records, codec, variant, with_labels=False,
        max_input_len=saved["max_input_len"],
    )
    with torch.no_grad():
        output = model.generate(
            input_ids=batch["input_ids"],
            attention_mask=batch["attention_mask"],
            max_new_tokens=saved["max_target_len"],
            do_sample=False,
            num_beams=1,
        )
    spans = []
    for row in output:
        text = codec.decode(row.tolist())
        # markers are structure, not span text; drop any the model emits
        for marker in codec.markers:
            text = text.replace(marker, "")
        spans.append(text.strip())
    return spans


def infer(checkpoint_dir: Path, dataset_path: Path, output_path: Path,
          batch_size: int = 16) -> int:
    """Write one evaluator row per dataset record; returns the row count.

    Rows carry expected_pattern/generated_text plus the masked input and the
    record's kind and mode, so the core evaluator can score alignment and
    rebuild the verse for coherence scoring.
    """
    model, codec, saved = load_checkpoint(checkpoint_dir)
    config = TrainConfig(
        train_path=dataset_path, eval_path=dataset_path,
        output_dir=Path(checkpoint_dir),
        variant=Variant(saved["variant"]),
        markers=tuple(saved["markers"]),
        max_input_len=saved["max_input_len"],
        max_target_len=saved["max_target_len"],
    )
    records = load_records(dataset_path, config)
    written = 0
    with open(output_path, "w", encoding="utf-8") as handle:
        for start in range(0, len(records), batch_size):
            chunk = records[start : start + batch_size]
            for record, span in zip(chunk, generate_spans(model, codec, saved, chunk)):
                handle.write(json.dumps({
                    "expected_pattern": record["pattern"],
                    "generated_text": span,
                    "input": record["input"],
                    "kind": record["kind"],
                    "mode": record["mode"],
                }, ensure_ascii=False) + "\n")
                written += 1
    return written
