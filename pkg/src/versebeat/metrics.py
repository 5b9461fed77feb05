"""Alignment metrics for generated spans, plus an external coherence hook.

Generated text is re-phonemized and its concatenated pattern compared to the
expected one, both with word boundaries stripped, so tokenization differences
never show up as alignment errors.
"""

from __future__ import annotations

import json
import logging
import shlex
import subprocess
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .patterns import BeatMode, PatternKind, span_pattern
from .phonolex import Lexicon, OutOfVocabularyError

log = logging.getLogger(__name__)


class ScorerProtocolError(Exception):
    """The external coherence scorer broke the line protocol."""


def exact_alignment(expected: str, generated: str) -> int:
    """1 when the space-stripped patterns match exactly, else 0."""
    return int(expected.replace(" ", "") == generated.replace(" ", ""))


def edit_distance(a: str, b: str) -> int:
    """Levenshtein distance, unit costs, iterative two-row table."""
    if len(a) < len(b):
        a, b = b, a
    previous = list(range(len(b) + 1))
    for i, ca in enumerate(a, start=1):
        current = [i]
        for j, cb in enumerate(b, start=1):
            current.append(
                min(
                    previous[j] + 1,  # delete
                    current[j - 1] + 1,  # insert
                    previous[j - 1] + (ca != cb),  # substitute
                )
            )
        previous = current
    return previous[-1]


def lev_similarity(a: str, b: str) -> float:
    """1 - d(a, b) / max(|a|, |b|); two empty strings count as identical."""
    if not a and not b:
        return 1.0
    return 1.0 - edit_distance(a, b) / max(len(a), len(b))


@dataclass
class EvalRecord:
    expected_pattern: str
    generated_text: str
    generated_pattern: str
    exact: int
    lev: float
    coherence: float | None = None
    # the original record rides along so report consumers keep their fields
    source: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        out = dict(self.source)
        out.update(
            {
                "expected_pattern": self.expected_pattern,
                "generated_pattern": self.generated_pattern,
                "exact": self.exact,
                "lev_similarity": self.lev,
            }
        )
        if self.coherence is not None:
            out["coherence"] = self.coherence
        return out


@dataclass
class EvalReport:
    records: list[EvalRecord]
    skipped_malformed: int = 0
    failed_phonemization: int = 0
    coherence_note: str | None = None

    @property
    def n(self) -> int:
        return len(self.records)

    @property
    def exact_accuracy(self) -> float | None:
        if not self.records:
            return None
        return sum(r.exact for r in self.records) / len(self.records)

    @property
    def mean_lev_similarity(self) -> float | None:
        if not self.records:
            return None
        return sum(r.lev for r in self.records) / len(self.records)

    @property
    def mean_coherence(self) -> float | None:
        scored = [r.coherence for r in self.records if r.coherence is not None]
        if not scored:
            return None
        return sum(scored) / len(scored)

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "exact_accuracy": self.exact_accuracy,
            "mean_lev_similarity": self.mean_lev_similarity,
            "mean_coherence": self.mean_coherence,
            "skipped_malformed": self.skipped_malformed,
            "failed_phonemization": self.failed_phonemization,
            "coherence_note": self.coherence_note,
            "records": [r.to_dict() for r in self.records],
        }


def score_outputs(
    lexicon: Lexicon,
    outputs: Iterable[dict],
    kind: PatternKind = PatternKind.BEAT,
    mode: BeatMode = BeatMode.ONSET,
    allow_fallback: bool = True,
) -> EvalReport:
    """Score generator outputs against their expected patterns.

    Each record needs "expected_pattern" (spaces allowed) and
    "generated_text"; records may carry their own "kind"/"mode". Malformed
    records are counted and skipped, as are phonemization failures when
    fallback is disabled; neither aborts the run.
    """
    report = EvalReport(records=[])
    for record in outputs:
        if not isinstance(record, dict):
            report.skipped_malformed += 1
            continue
        expected = record.get("expected_pattern")
        generated = record.get("generated_text")
        if not isinstance(expected, str) or not isinstance(generated, str):
            report.skipped_malformed += 1
            continue
        try:
            record_kind = PatternKind(record["kind"]) if "kind" in record else kind
            record_mode = BeatMode(record["mode"]) if "mode" in record else mode
        except ValueError:
            report.skipped_malformed += 1
            continue
        words = generated.split()
        try:
            produced = span_pattern(
                lexicon, words, kind=record_kind, mode=record_mode,
                allow_fallback=allow_fallback,
            ).stripped
        except (OutOfVocabularyError, ValueError):
            report.failed_phonemization += 1
            continue
        expected_stripped = expected.replace(" ", "")
        report.records.append(
            EvalRecord(
                expected_pattern=expected_stripped,
                generated_text=generated,
                generated_pattern=produced,
                exact=exact_alignment(expected_stripped, produced),
                lev=lev_similarity(expected_stripped, produced),
                source=record,
            )
        )
    return report


def _reassemble(record: dict, markers: tuple[str, str, str]) -> tuple[str, int, int] | None:
    """Rebuild the full verse around the generated span.

    Needs the record's masked "input"; returns (verse, start_char, end_char)
    or None when the markers cannot be located.
    """
    masked_input = record.get("input")
    generated = record.get("generated_text", "")
    if not isinstance(masked_input, str):
        return None
    mask_open, mask_close, _ = markers
    open_at = masked_input.find(mask_open)
    if open_at < 0:
        return None
    close_at = masked_input.find(mask_close, open_at)
    if close_at < 0:
        return None
    prefix = masked_input[:open_at]
    suffix = masked_input[close_at + len(mask_close):]
    verse = prefix + generated + suffix
    return verse, len(prefix), len(prefix) + len(generated)


def attach_coherence(
    report: EvalReport,
    scorer_cmd: str | Sequence[str],
    markers: tuple[str, str, str] = ("⟦E0⟧", "⟦E1⟧", "⟦E2⟧"),
) -> int:
    """Run the external scorer over the report's records, in order.

    Protocol: one JSON object per line on the child's stdin with keys
    "verse", "span_start_char", "span_end_char"; the child answers each with
    one line holding a non-negative decimal. A missing scorer binary leaves
    coherence empty and notes that in the report; a protocol violation raises
    ScorerProtocolError with the offending line number.
    """
    command = shlex.split(scorer_cmd) if isinstance(scorer_cmd, str) else list(scorer_cmd)
    try:
        proc = subprocess.Popen(
            command, stdin=subprocess.PIPE, stdout=subprocess.PIPE, text=True
        )
    except OSError as exc:
        report.coherence_note = f"scorer unavailable: {exc}"
        log.warning("coherence scorer %r unavailable: %s", command, exc)
        return 0

    scored = 0
    try:
        assert proc.stdin is not None and proc.stdout is not None
        for lineno, record in enumerate(report.records, start=1):
            pieces = _reassemble(record.source, markers)
            if pieces is None:
                continue
            verse, start_char, end_char = pieces
            request = {
                "verse": verse,
                "span_start_char": start_char,
                "span_end_char": end_char,
            }
            try:
                proc.stdin.write(json.dumps(request, ensure_ascii=False) + "\n")
                proc.stdin.flush()
                answer = proc.stdout.readline()
            except (BrokenPipeError, OSError) as exc:
                raise ScorerProtocolError(f"scorer pipe broke at line {lineno}: {exc}") from exc
            if not answer:
                raise ScorerProtocolError(f"scorer closed its output at line {lineno}")
            try:
                value = float(answer.strip())
            except ValueError:
                raise ScorerProtocolError(
                    f"scorer line {lineno}: expected a decimal, got {answer.strip()!r}"
                ) from None
            if value < 0 or value != value:  # NaN check
                raise ScorerProtocolError(
                    f"scorer line {lineno}: expected a non-negative real, got {value}"
                )
            record.coherence = value
            scored += 1
    finally:
        if proc.stdin is not None:
            try:
                proc.stdin.close()
            except OSError:
                pass
        try:
            proc.wait(timeout=10)
        except subprocess.TimeoutExpired:
            proc.kill()
    return scored
