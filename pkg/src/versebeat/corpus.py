"""Verse ingestion: line filters, cleaning stats, and deterministic splits."""

from __future__ import annotations

import json
import logging
import random
import re
import shlex
import subprocess
from dataclasses import dataclass, field
from typing import Iterable, Sequence, TypeVar

from .phonolex import normalize

log = logging.getLogger(__name__)

_TOKEN_RE = re.compile(r"\S+")

# Characters the charset filter accepts besides letters and whitespace.
ALLOWED_PUNCT = frozenset(".,;:!?'\"()-‐‑–—‘’“”…")

# Small high-frequency word list used as an English signal. Includes a few
# archaic forms so older verse is not penalized.
STOPWORDS = frozenset(
    """
    a an and are as at be but by for from had has have he her his i if in is
    it its me my no nor not of on or our she so that the thee their them then
    there they thine this thou through thy to was we were what when where
    which while who will with you your
    """.split()
)


@dataclass(frozen=True)
class Verse:
    """One retained corpus line with its whitespace tokens."""

    text: str
    tokens: tuple[str, ...]
    source_index: int

    def word_count(self) -> int:
        return len(self.tokens)


def token_spans(text: str) -> list[tuple[str, int, int]]:
    """Whitespace-delimited tokens with character offsets.

    Tokens that normalize to nothing (bare punctuation) are dropped, so a
    token here is always phonemizable.
    """
    out = []
    for m in _TOKEN_RE.finditer(text):
        if normalize(m.group()):
            out.append((m.group(), m.start(), m.end()))
    return out


class CharsetFilter:
    """Rejects lines with too many characters outside letters, spaces, and
    common punctuation."""

    name = "charset"

    def __init__(self, max_fraction: float = 0.10):
        self.max_fraction = max_fraction

    def accepts(self, text: str, tokens: Sequence[str]) -> bool:
        if not text:
            return True
        bad = sum(
            1
            for ch in text
            if not (ch.isalpha() or ch.isspace() or ch in ALLOWED_PUNCT)
        )
        return bad / len(text) < self.max_fraction


class LengthFilter:
    name = "length"

    def __init__(self, min_tokens: int = 2, max_tokens: int = 30):
        self.min_tokens = min_tokens
        self.max_tokens = max_tokens

    def accepts(self, text: str, tokens: Sequence[str]) -> bool:
        return self.min_tokens <= len(tokens) <= self.max_tokens


class StopwordFilter:
    """Cheap English check: at least one stopword per `window` tokens."""

    name = "english"

    def __init__(self, stopwords: frozenset[str] = STOPWORDS, window: int = 8):
        self.stopwords = stopwords
        self.window = window

    def accepts(self, text: str, tokens: Sequence[str]) -> bool:
        if not tokens:
            return False
        hits = sum(1 for t in tokens if normalize(t) in self.stopwords)
        return hits * self.window >= len(tokens)


class SubprocessFilter:
    """Delegates keep/drop decisions to an external command.

    The child receives one verse per line on stdin and must answer each with
    a single line reading "keep" or "drop" (responses must be flushed per
    line). Unexpected responses or a dead child reject the line rather than
    aborting the run.
    """

    name = "external"

    def __init__(self, command: str | Sequence[str]):
        self.command = shlex.split(command) if isinstance(command, str) else list(command)
        self._proc: subprocess.Popen | None = None
        self._failed = False

    def _ensure_started(self) -> bool:
        if self._failed:
            return False
        if self._proc is None:
            try:
                self._proc = subprocess.Popen(
                    self.command,
                    stdin=subprocess.PIPE,
                    stdout=subprocess.PIPE,
                    text=True,
                )
            except OSError as exc:
                log.warning("classifier %r failed to start: %s", self.command, exc)
                self._failed = True
                return False
        return True

    def accepts(self, text: str, tokens: Sequence[str]) -> bool:
        if not self._ensure_started():
            return False
        proc = self._proc
        assert proc is not None and proc.stdin is not None and proc.stdout is not None
        try:
            proc.stdin.write(text.replace("\n", " ") + "\n")
            proc.stdin.flush()
            answer = proc.stdout.readline()
        except (BrokenPipeError, OSError) as exc:
            log.warning("classifier pipe broke: %s", exc)
            self._failed = True
            return False
        if not answer:
            log.warning("classifier exited early; rejecting remaining lines")
            self._failed = True
            return False
        answer = answer.strip().lower()
        if answer not in ("keep", "drop"):
            log.warning("classifier answered %r (expected keep/drop); rejecting", answer)
            return False
        return answer == "keep"

    def close(self) -> None:
        if self._proc is not None:
            if self._proc.stdin is not None:
                try:
                    self._proc.stdin.close()
                except OSError:
                    pass
            self._proc.wait(timeout=10)
            self._proc = None


def default_filters(
    max_nonallowed: float = 0.10,
    min_tokens: int = 2,
    max_tokens: int = 30,
    stopword_window: int = 8,
    classifier_cmd: str | None = None,
) -> list:
    filters: list = [
        CharsetFilter(max_fraction=max_nonallowed),
        LengthFilter(min_tokens=min_tokens, max_tokens=max_tokens),
        StopwordFilter(window=stopword_window),
    ]
    if classifier_cmd:
        filters.append(SubprocessFilter(classifier_cmd))
    return filters


def clean(lines: Iterable[str], filters: Sequence | None = None) -> tuple[list[Verse], dict[str, int]]:
    """Filter raw lines into verses.

    Returns the retained verses (source_index = position in the input stream)
    and a per-filter count of rejected lines; a line is charged to the first
    filter that rejects it. Filters reject, they never abort the run.
    """
    if filters is None:
        filters = default_filters()
    stats = {f.name: 0 for f in filters}
    verses: list[Verse] = []
    for index, line in enumerate(lines):
        text = line.rstrip("\r\n")
        tokens = [tok for tok, _, _ in token_spans(text)]
        rejected = False
        for f in filters:
            if not f.accepts(text, tokens):
                stats[f.name] += 1
                rejected = True
                break
        if not rejected:
            verses.append(Verse(text=text, tokens=tuple(tokens), source_index=index))
    for f in filters:
        close = getattr(f, "close", None)
        if close:
            close()
    return verses, stats


T = TypeVar("T")


@dataclass
class SplitManifest:
    seed: int
    eval_fraction: float
    total: int
    train_count: int
    eval_count: int
    filter_stats: dict[str, int] = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "seed": self.seed,
            "eval_fraction": self.eval_fraction,
            "total": self.total,
            "train_count": self.train_count,
            "eval_count": self.eval_count,
            "filter_stats": dict(self.filter_stats),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)


def split(
    items: Sequence[T], seed: int, eval_fraction: float
) -> tuple[list[T], list[T], SplitManifest]:
    """Deterministic train/eval partition.

    The eval side gets round(eval_fraction * len(items)) items chosen by a
    seeded shuffle of indices; both sides keep the original corpus order.
    """
    if not 0.0 < eval_fraction < 1.0:
        raise ValueError(f"eval_fraction must be in (0, 1), got {eval_fraction}")
    n = len(items)
    if n < 2:
        raise ValueError(f"need at least 2 items to split, got {n}")
    rng = random.Random(seed)
    indices = list(range(n))
    rng.shuffle(indices)
    eval_count = round(eval_fraction * n)
    eval_indices = sorted(indices[:eval_count])
    train_indices = sorted(indices[eval_count:])
    train = [items[i] for i in train_indices]
    evalset = [items[i] for i in eval_indices]
    manifest = SplitManifest(
        seed=seed,
        eval_fraction=eval_fraction,
        total=n,
        train_count=len(train),
        eval_count=len(evalset),
    )
    return train, evalset, manifest
