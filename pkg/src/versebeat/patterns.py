"""CV skeletons and beat patterns derived from phoneme sequences.

A CV pattern writes one "C" per consonant, "V" per short vowel, and "VV" per
long vowel or diphthong. A beat pattern is a binary string over the same slot
grid with exactly one "1" per vowel phone; where that "1" lands depends on the
beat mode.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Iterable

from .phonolex import Lexicon, PhoneClass, PhonemeSequence, phonemize


class BeatMode(Enum):
    """Where each vowel's beat mark is placed.

    ONSET puts the mark on the consonant slot immediately before the vowel,
    falling back to the vowel's first slot when no consonant precedes it
    (word-initial vowels and the second vowel of a hiatus). NUCLEUS always
    marks the vowel's first slot.
    """

    ONSET = "onset"
    NUCLEUS = "nucleus"


class PatternKind(Enum):
    BEAT = "beat"
    CV = "cv"


_CV_BY_CLASS = {
    PhoneClass.CONSONANT: "C",
    PhoneClass.SHORT_VOWEL: "V",
    PhoneClass.LONG_VOWEL: "VV",
    PhoneClass.DIPHTHONG: "VV",
}


def cv_of(seq: PhonemeSequence) -> str:
    return "".join(_CV_BY_CLASS[p.phone_class] for p in seq.phones)


def beat_of(seq: PhonemeSequence, mode: BeatMode = BeatMode.ONSET) -> str:
    """Binary beat string, same length as the CV pattern, one 1 per vowel."""
    slots: list[str] = []
    prev_class: PhoneClass | None = None
    for phone in seq.phones:
        width = len(_CV_BY_CLASS[phone.phone_class])
        start = len(slots)
        slots.extend("0" * width)
        if phone.is_vowel:
            if mode is BeatMode.ONSET and prev_class is PhoneClass.CONSONANT:
                slots[start - 1] = "1"
            else:
                slots[start] = "1"
        prev_class = phone.phone_class
    return "".join(slots)


@dataclass(frozen=True)
class SpanPattern:
    """Patterns for a run of words, kept per-word so both the spaced and
    concatenated forms can be produced."""

    per_word: tuple[tuple[str, str, str], ...]  # (word, cv, beat)
    kind: PatternKind

    @property
    def serialized(self) -> str:
        """Space-joined per-word patterns, e.g. "10 101000 10"."""
        field = 1 if self.kind is PatternKind.CV else 2
        return " ".join(entry[field] for entry in self.per_word)

    @property
    def stripped(self) -> str:
        """The serialized form with word boundaries removed."""
        return self.serialized.replace(" ", "")

    def __len__(self) -> int:
        return len(self.per_word)


def span_pattern(
    lexicon: Lexicon,
    words: Iterable[str],
    kind: PatternKind = PatternKind.BEAT,
    mode: BeatMode = BeatMode.ONSET,
    allow_fallback: bool = True,
) -> SpanPattern:
    """Derive per-word patterns for a word span.

    Raises OutOfVocabularyError when allow_fallback is false and a word is
    missing from the lexicon.
    """
    per_word = []
    for word in words:
        seq = phonemize(lexicon, word, allow_fallback=allow_fallback)
        per_word.append((word, cv_of(seq), beat_of(seq, mode)))
    return SpanPattern(per_word=tuple(per_word), kind=kind)
