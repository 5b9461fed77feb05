"""Training loop: AdamW, cosine schedule, per-epoch loss log, checkpoint."""

from __future__ import annotations

import json
import logging
import random
from dataclasses import dataclass, field
from pathlib import Path

import torch
from transformers import get_cosine_schedule_with_warmup

from .codec import DEFAULT_MARKERS, Codec
from .modeling import Variant, build_model, make_batch

log = logging.getLogger(__name__)

REQUIRED_FIELDS = {"input", "target", "pattern", "kind", "mode"}


class SchemaError(Exception):
    pass


@dataclass
class TrainConfig:
    train_path: Path
    eval_path: Path
    output_dir: Path
    variant: Variant = Variant.BEAT
    epochs: int = 4
    learning_rate: float = 3e-4
    weight_decay: float = 0.1
    train_batch: int = 128
    eval_batch: int = 16
    markers: tuple[str, str, str] = DEFAULT_MARKERS
    model_size: str = "tiny"
    seed: int = 0
    max_input_len: int = 256
    max_target_len: int = 64
    warmup_steps: int = 0

    def to_dict(self) -> dict:
        return {
            "variant": self.variant.value,
            "epochs": self.epochs,
            "learning_rate": self.learning_rate,
            "weight_decay": self.weight_decay,
            "train_batch": self.train_batch,
            "eval_batch": self.eval_batch,
            "markers": list(self.markers),
            "model_size": self.model_size,
            "seed": self.seed,
            "max_input_len": self.max_input_len,
            "max_target_len": self.max_target_len,
            "warmup_steps": self.warmup_steps,
        }


def load_records(path: Path, config: TrainConfig) -> list[dict]:
    """Read one dataset file, checking it is usable for config's variant."""
    records = []
    mask_open, mask_close, target_prefix = config.markers
    with open(path, encoding="utf-8") as handle:
        for lineno, line in enumerate(handle, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                record = json.loads(line)
            except json.JSONDecodeError as exc:
                raise SchemaError(f"{path}:{lineno}: not JSON ({exc})") from exc
            missing = REQUIRED_FIELDS - set(record)
            if missing:
                raise SchemaError(f"{path}:{lineno}: missing fields {sorted(missing)}")
            if record["kind"] != config.variant.dataset_kind:
                raise SchemaError(
                    f"{path}:{lineno}: kind {record['kind']!r} does not match "
                    f"variant {config.variant.value!r}"
                )
            # exactly one masked span per example; a marker string occurring
            # in the verse itself would corrupt the sentinel mapping
            if record["input"].count(mask_open) != 1 or record["input"].count(mask_close) != 1:
                raise SchemaError(f"{path}:{lineno}: marker collision in input")
            if not record["target"].startswith(target_prefix):
                raise SchemaError(f"{path}:{lineno}: target lacks the prefix marker")
            records.append(record)
    if not records:
        raise SchemaError(f"{path}: no records")
    return records


def _batches(records: list[dict], size: int):
    for start in range(0, len(records), size):
        yield records[start : start + size]


def eval_loss(model, records: list[dict], codec: Codec, config: TrainConfig) -> float:
    model.eval()
    total = 0.0
    seen = 0
    with torch.no_grad():
        for chunk in _batches(records, config.eval_batch):
            batch = make_batch(
                chunk, codec, config.variant,
                max_input_len=config.max_input_len,
                max_target_len=config.max_target_len,
            )
            loss = model(**batch).loss
            total += float(loss) * len(chunk)
            seen += len(chunk)
    return total / seen


def train(config: TrainConfig) -> dict:
    """Run the fine-tune and save checkpoint plus training log.

    Returns the log dict: per-epoch mean train loss, eval loss, and the
    config echo. Written to output_dir/training_log.json alongside the
    checkpoint.
    """
    codec = Codec(config.markers)
    train_records = load_records(config.train_path, config)
    eval_records = load_records(config.eval_path, config)

    torch.manual_seed(config.seed)
    model = build_model(config.model_size, seed=config.seed)
    optimizer = torch.optim.AdamW(
        model.parameters(), lr=config.learning_rate, weight_decay=config.weight_decay
    )
    steps_per_epoch = (len(train_records) + config.train_batch - 1) // config.train_batch
    scheduler = get_cosine_schedule_with_warmup(
        optimizer, config.warmup_steps, steps_per_epoch * config.epochs
    )

    shuffler = random.Random(config.seed)
    order = list(range(len(train_records)))
    epoch_losses: list[float] = []
    for epoch in range(config.epochs):
        model.train()
        shuffler.shuffle(order)
        total = 0.0
        for chunk_index in _batches(order, config.train_batch):
            batch = make_batch(
                [train_records[i] for i in chunk_index], codec, config.variant,
                max_input_len=config.max_input_len,
                max_target_len=config.max_target_len,
            )
            loss = model(**batch).loss
            optimizer.zero_grad()
            loss.backward()
            optimizer.step()
            scheduler.step()
            total += float(loss.detach()) * len(chunk_index)
        epoch_losses.append(total / len(train_records))
        log.info("epoch %d/%d train loss %.4f", epoch + 1, config.epochs, epoch_losses[-1])

    final_eval = eval_loss(model, eval_records, codec, config)

    config.output_dir.mkdir(parents=True, exist_ok=True)
    model.save_pretrained(config.output_dir)
    training_log = {
        "config": config.to_dict(),
        "train_records": len(train_records),
        "eval_records": len(eval_records),
        "epoch_train_loss": epoch_losses,
        "final_eval_loss": final_eval,
    }
    (config.output_dir / "training_log.json").write_text(
        json.dumps(training_log, indent=2) + "\n", encoding="utf-8"
    )
    (config.output_dir / "adapter_config.json").write_text(
        json.dumps(config.to_dict(), indent=2) + "\n", encoding="utf-8"
    )
    return training_log


def load_checkpoint(checkpoint_dir: Path):
    """Model, codec, and saved config from a train() output directory."""
    from transformers import T5ForConditionalGeneration

    saved = json.loads((Path(checkpoint_dir) / "adapter_config.json").read_text("utf-8"))
    model = T5ForConditionalGeneration.from_pretrained(checkpoint_dir)
    model.eval()
    codec = Codec(tuple(saved["markers"]))
    return model, codec, saved
