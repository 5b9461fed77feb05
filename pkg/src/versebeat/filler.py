"""Exact pattern filling: find word sequences whose concatenated patterns
reproduce a target beat (or CV) string.

The lexicon is inverted into pattern -> words once; queries then run a
feasibility table plus ordered depth-first segmentation, expanding each
segmentation into its highest-frequency word choices.
"""

from __future__ import annotations

import heapq
import logging
import math
from dataclasses import dataclass
from itertools import product

from .patterns import BeatMode, PatternKind, beat_of, cv_of
from .phonolex import Lexicon

log = logging.getLogger(__name__)

# total segmentations explored per query before giving up on completeness
DEFAULT_SEGMENTATION_BOUND = 10_000


@dataclass(frozen=True)
class IndexEntry:
    word: str
    frequency: float
    from_default: bool  # pattern came from the word's first-listed pronunciation


@dataclass
class BeatIndex:
    """Inverted map from pattern string to the words that produce it."""

    by_pattern: dict[str, list[IndexEntry]]
    kind: PatternKind
    mode: BeatMode
    pattern_lengths: tuple[int, ...]

    def __len__(self) -> int:
        return len(self.by_pattern)

    def words_for(self, pattern: str, include_variants: bool = False) -> list[IndexEntry]:
        entries = self.by_pattern.get(pattern, [])
        if include_variants:
            return entries
        return [e for e in entries if e.from_default]


def build_index(
    lexicon: Lexicon,
    freq_table: dict[str, float] | None = None,
    kind: PatternKind = PatternKind.BEAT,
    mode: BeatMode = BeatMode.ONSET,
) -> BeatIndex:
    """Index every lexicon word (and pronunciation variant) with a vowel.

    Unlisted words get frequency 1, so an index without a frequency table
    still ranks deterministically (alphabetically within a pattern).
    """
    freq_table = freq_table or {}
    low = [w for w, f in freq_table.items() if f < 1]
    if low:
        # log frequency must stay non-negative for candidate scores
        raise ValueError(f"frequencies must be >= 1; offending words: {sorted(low)[:5]}")
    by_pattern: dict[str, dict[str, IndexEntry]] = {}
    for word in lexicon.words():
        frequency = float(freq_table.get(word, 1.0))
        for variant_number, seq in enumerate(lexicon.lookup_all(word)):
            if seq.vowel_count() == 0:
                continue
            pattern = cv_of(seq) if kind is PatternKind.CV else beat_of(seq, mode)
            bucket = by_pattern.setdefault(pattern, {})
            existing = bucket.get(word)
            entry = IndexEntry(
                word=word,
                frequency=frequency,
                from_default=(variant_number == 0) or (existing is not None and existing.from_default),
            )
            # variants of a word can share a pattern; keep a single entry and
            # remember whether the default pronunciation is among them
            bucket[word] = entry
    frozen = {
        pattern: sorted(bucket.values(), key=lambda e: (-e.frequency, e.word))
        for pattern, bucket in by_pattern.items()
    }
    pattern_lengths = tuple(sorted({len(p) for p in frozen}))
    return BeatIndex(by_pattern=frozen, kind=kind, mode=mode, pattern_lengths=pattern_lengths)


def _default_max_words(pattern: str, kind: PatternKind) -> int:
    # every indexed word carries at least one vowel, hence at least one beat
    # mark (or one V), so no fill can use more words than this
    if kind is PatternKind.CV:
        return pattern.count("V")
    return pattern.count("1")


def segment(
    pattern: str,
    index: BeatIndex,
    max_words: int | None = None,
    bound: int = DEFAULT_SEGMENTATION_BOUND,
) -> list[tuple[int, ...]]:
    """All ways to cut the pattern into index keys, as chunk-length tuples.

    Ordered by word count, then by cut positions left to right. Enumeration
    stops (with a warning) after `bound` segmentations.
    """
    if not pattern:
        raise ValueError("cannot segment an empty pattern")
    if max_words is None:
        max_words = _default_max_words(pattern, index.kind)
    n = len(pattern)
    lengths = [L for L in index.pattern_lengths if L <= n]

    # feasible[p] = word counts c for which pattern[p:] splits into exactly c keys
    feasible: list[set[int]] = [set() for _ in range(n + 1)]
    feasible[n].add(0)
    for p in range(n - 1, -1, -1):
        for length in lengths:
            if p + length > n:
                break
            if pattern[p : p + length] not in index.by_pattern:
                continue
            for count in feasible[p + length]:
                if count + 1 <= max_words:
                    feasible[p].add(count + 1)

    results: list[tuple[int, ...]] = []
    truncated = False

    def walk(position: int, remaining: int, acc: list[int]) -> None:
        nonlocal truncated
        if truncated:
            return
        if position == n:
            if remaining == 0:
                results.append(tuple(acc))
                if len(results) >= bound:
                    truncated = True
            return
        if remaining == 0:
            return
        for length in lengths:
            if position + length > n:
                break
            if pattern[position : position + length] not in index.by_pattern:
                continue
            if (remaining - 1) not in feasible[position + length]:
                continue
            acc.append(length)
            walk(position + length, remaining - 1, acc)
            acc.pop()
            if truncated:
                return

    for word_count in sorted(feasible[0]):
        walk(0, word_count, [])
        if truncated:
            log.warning(
                "segmentation enumeration for %r truncated at %d results", pattern, bound
            )
            break
    return results


@dataclass(frozen=True)
class FillCandidate:
    words: tuple[str, ...]
    score: float  # sum of per-word log frequencies
    segmentation: tuple[int, ...]

    @property
    def text(self) -> str:
        return " ".join(self.words)


def _expand_segmentation(
    pattern: str,
    chunk_lengths: tuple[int, ...],
    index: BeatIndex,
    k: int | None,
    include_variants: bool,
) -> list[FillCandidate]:
    """Best word choices for one segmentation, highest summed log-freq first."""
    options: list[list[IndexEntry]] = []
    position = 0
    for length in chunk_lengths:
        entries = index.words_for(pattern[position : position + length], include_variants)
        if not entries:
            return []
        options.append(entries)
        position += length

    def score_at(choice: tuple[int, ...]) -> float:
        return sum(math.log(options[i][j].frequency) for i, j in enumerate(choice))

    def words_at(choice: tuple[int, ...]) -> tuple[str, ...]:
        return tuple(options[i][j].word for i, j in enumerate(choice))

    if k is None:
        return [
            FillCandidate(words=words_at(choice), score=score_at(choice), segmentation=chunk_lengths)
            for choice in product(*(range(len(o)) for o in options))
        ]

    # lazy k-best over the choice lattice; entries are pre-sorted by frequency
    start = (0,) * len(options)
    heap = [(-score_at(start), start)]
    seen = {start}
    out: list[FillCandidate] = []
    while heap and len(out) < k:
        negative_score, choice = heapq.heappop(heap)
        out.append(
            FillCandidate(
                words=words_at(choice), score=-negative_score, segmentation=chunk_lengths
            )
        )
        for i in range(len(choice)):
            if choice[i] + 1 < len(options[i]):
                successor = choice[:i] + (choice[i] + 1,) + choice[i + 1 :]
                if successor not in seen:
                    seen.add(successor)
                    heapq.heappush(heap, (-score_at(successor), successor))
    return out


def fill(
    pattern: str,
    index: BeatIndex,
    k: int | None = 10,
    max_words: int | None = None,
    include_variants: bool = False,
    bound: int = DEFAULT_SEGMENTATION_BOUND,
) -> list[FillCandidate]:
    """Word sequences whose concatenated patterns equal the target exactly.

    Spaces in the target are ignored. Results are sorted by score (summed log
    frequency) descending, ties broken by word count then alphabetically; the
    top k are returned (all of them when k is None). With include_variants
    false, every candidate is verified under default pronunciations alone.
    """
    stripped = pattern.replace(" ", "")
    if not stripped:
        raise ValueError("cannot fill an empty pattern")
    candidates: list[FillCandidate] = []
    for chunk_lengths in segment(stripped, index, max_words=max_words, bound=bound):
        candidates.extend(
            _expand_segmentation(stripped, chunk_lengths, index, k, include_variants)
        )
    candidates.sort(key=lambda c: (-c.score, len(c.words), c.words))
    if k is not None:
        return candidates[:k]
    return candidates
