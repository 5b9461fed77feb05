"""Masked-infilling example construction and dataset builds.

One example per verse: a contiguous word span is replaced in the input by a
mask-open marker, the span's serialized pattern, and a mask-close marker; the
target restates the masked words verbatim behind a target marker. Span length
is drawn from a truncated geometric distribution, span position uniformly.
"""

from __future__ import annotations

import json
import logging
import math
import random
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

from . import __version__
from .corpus import Verse, split, token_spans
from .patterns import BeatMode, PatternKind, SpanPattern, span_pattern
from .phonolex import Lexicon, OutOfVocabularyError

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class Markers:
    """Sentinel strings around the pattern and in front of the target."""

    mask_open: str = "⟦E0⟧"
    mask_close: str = "⟦E1⟧"
    target_prefix: str = "⟦E2⟧"

    @classmethod
    def from_csv(cls, value: str) -> "Markers":
        parts = [p for p in value.split(",")]
        if len(parts) != 3 or not all(parts):
            raise ValueError(
                f"markers must be three comma-separated strings, got {value!r}"
            )
        return cls(mask_open=parts[0], mask_close=parts[1], target_prefix=parts[2])

    def as_tuple(self) -> tuple[str, str, str]:
        return (self.mask_open, self.mask_close, self.target_prefix)


@dataclass(frozen=True)
class SpanChoice:
    start_word: int
    length_words: int


def span_cap(word_count: int) -> int:
    """Longest maskable span: a quarter of the verse, but at least one word."""
    return max(1, word_count // 4)


def sample_span_length(word_count: int, rng: random.Random, p: float = 0.2) -> int:
    """Geometric(p) span length, resampled until it fits under the cap."""
    cap = span_cap(word_count)
    log_q = math.log(1.0 - p)
    while True:
        # inverse-CDF draw: support {1, 2, ...}
        k = 1 + int(math.log(1.0 - rng.random()) / log_q)
        if k <= cap:
            return k


@dataclass(frozen=True)
class MaskedExample:
    verse: Verse
    span: SpanChoice
    kind: PatternKind
    mode: BeatMode
    pattern: SpanPattern
    input_text: str
    target_text: str

    def to_record(self) -> dict:
        return {
            "input": self.input_text,
            "target": self.target_text,
            "pattern": self.pattern.stripped,
            "kind": self.kind.value,
            "mode": self.mode.value,
            "span_start": self.span.start_word,
            "span_len": self.span.length_words,
            "source_index": self.verse.source_index,
        }


def make_example(
    lexicon: Lexicon,
    verse: Verse,
    span: SpanChoice,
    kind: PatternKind = PatternKind.BEAT,
    mode: BeatMode = BeatMode.ONSET,
    markers: Markers = Markers(),
    allow_fallback: bool = True,
) -> MaskedExample:
    """Mask one word span of a verse.

    The masked substring is taken by character offsets, so whitespace and
    punctuation inside the span survive verbatim in the target and
    prefix + span + suffix reassembles the exact verse text.
    """
    spans = token_spans(verse.text)
    end_word = span.start_word + span.length_words
    if span.start_word < 0 or span.length_words < 1 or end_word > len(spans):
        raise ValueError(
            f"span {span} out of bounds for a {len(spans)}-token verse"
        )
    words = [tok for tok, _, _ in spans[span.start_word : end_word]]
    pattern = span_pattern(lexicon, words, kind=kind, mode=mode, allow_fallback=allow_fallback)
    start_char = spans[span.start_word][1]
    end_char = spans[end_word - 1][2]
    prefix = verse.text[:start_char]
    suffix = verse.text[end_char:]
    masked = verse.text[start_char:end_char]
    input_text = f"{prefix}{markers.mask_open} {pattern.serialized} {markers.mask_close}{suffix}"
    target_text = f"{markers.target_prefix} {masked}"
    return MaskedExample(
        verse=verse,
        span=span,
        kind=kind,
        mode=mode,
        pattern=pattern,
        input_text=input_text,
        target_text=target_text,
    )


@dataclass
class DatasetConfig:
    output_dir: Path
    kind: PatternKind = PatternKind.BEAT
    mode: BeatMode = BeatMode.ONSET
    markers: Markers = field(default_factory=Markers)
    seed: int = 0
    eval_fraction: float = 0.005
    allow_fallback: bool = True
    # workers only changes wall time, never output bytes
    workers: int = 1

    def manifest_dict(self) -> dict:
        return {
            "kind": self.kind.value,
            "mode": self.mode.value,
            "markers": list(self.markers.as_tuple()),
            "seed": self.seed,
            "eval_fraction": self.eval_fraction,
            "allow_fallback": self.allow_fallback,
        }


@dataclass
class BuildResult:
    train_path: Path
    eval_path: Path
    manifest_path: Path
    train_count: int
    eval_count: int
    skipped: int


def _build_one(
    lexicon: Lexicon, verse: Verse, config: DatasetConfig
) -> MaskedExample | None:
    """Choose a span and build the example; None when the verse is unusable."""
    n = verse.word_count()
    if n == 0:
        return None
    # per-verse stream: reordering or sharding verses cannot change draws
    rng = random.Random(config.seed ^ verse.source_index)
    length = sample_span_length(n, rng)
    start = rng.randint(0, n - length)
    try:
        return make_example(
            lexicon,
            verse,
            SpanChoice(start_word=start, length_words=length),
            kind=config.kind,
            mode=config.mode,
            markers=config.markers,
            allow_fallback=config.allow_fallback,
        )
    except (OutOfVocabularyError, ValueError):
        return None


def _build_side(
    lexicon: Lexicon, verses: list[Verse], config: DatasetConfig, path: Path
) -> tuple[int, int]:
    """Write one JSONL file; returns (written, skipped)."""
    if config.workers > 1:
        with ThreadPoolExecutor(max_workers=config.workers) as pool:
            examples = list(pool.map(lambda v: _build_one(lexicon, v, config), verses))
    else:
        examples = [_build_one(lexicon, v, config) for v in verses]
    written = 0
    with open(path, "w", encoding="utf-8") as handle:
        for example in examples:
            if example is None:
                continue
            handle.write(json.dumps(example.to_record(), ensure_ascii=False) + "\n")
            written += 1
    return written, len(examples) - written


def build_dataset(
    lexicon: Lexicon, verses: list[Verse], config: DatasetConfig
) -> BuildResult:
    """Split verses, build one masked example per verse, write train/eval JSONL.

    Output is ordered by source_index and byte-identical for a given corpus
    and config, regardless of worker count.
    """
    train_verses, eval_verses, _ = split(verses, config.seed, config.eval_fraction)
    config.output_dir.mkdir(parents=True, exist_ok=True)
    train_path = config.output_dir / "train.jsonl"
    eval_path = config.output_dir / "eval.jsonl"
    train_count, train_skipped = _build_side(lexicon, train_verses, config, train_path)
    eval_count, eval_skipped = _build_side(lexicon, eval_verses, config, eval_path)
    skipped = train_skipped + eval_skipped
    if skipped:
        log.warning("skipped %d verse(s) that yielded no example", skipped)
    if train_count + eval_count == 0:
        raise ValueError("every verse was skipped; no examples written")
    manifest = {
        "toolkit_version": __version__,
        "config": config.manifest_dict(),
        "input_verses": len(verses),
        "train_count": train_count,
        "eval_count": eval_count,
        "skipped": {"train": train_skipped, "eval": eval_skipped},
    }
    manifest_path = config.output_dir / "manifest.json"
    manifest_path.write_text(
        json.dumps(manifest, indent=2, sort_keys=True) + "\n", encoding="utf-8"
    )
    return BuildResult(
        train_path=train_path,
        eval_path=eval_path,
        manifest_path=manifest_path,
        train_count=train_count,
        eval_count=eval_count,
        skipped=skipped,
    )
