"""Pronouncing lexicon: loading, word normalization, and phonemization.

Words are mapped to phoneme sequences by lexicon lookup, with a deterministic
orthographic fallback for out-of-vocabulary words. Each phone is classed as a
consonant, short vowel, long vowel, or diphthong via an editable table that
ships next to the dictionary file.
"""

from __future__ import annotations

import logging
import re
from dataclasses import dataclass
from enum import Enum
from functools import lru_cache
from importlib import resources
from pathlib import Path

log = logging.getLogger(__name__)


class PhoneClass(Enum):
    CONSONANT = "C"
    SHORT_VOWEL = "SV"
    LONG_VOWEL = "LV"
    DIPHTHONG = "DIPH"


class Stress(Enum):
    UNSTRESSED = 0
    PRIMARY = 1
    SECONDARY = 2


class Source(Enum):
    LEXICON = "lexicon"
    FALLBACK = "fallback"


class LexiconError(Exception):
    """Raised when a lexicon file cannot be used as loaded."""


class OutOfVocabularyError(LookupError):
    """Raised when a word is not in the lexicon and fallback is disabled."""


@dataclass(frozen=True)
class Phone:
    symbol: str
    phone_class: PhoneClass
    # stress is parsed and stored but never consulted by pattern derivation
    stress: Stress | None = None

    @property
    def is_vowel(self) -> bool:
        return self.phone_class is not PhoneClass.CONSONANT


@dataclass(frozen=True)
class PhonemeSequence:
    word: str
    phones: tuple[Phone, ...]
    source: Source

    def vowel_count(self) -> int:
        return sum(1 for p in self.phones if p.is_vowel)


_VARIANT_RE = re.compile(r"^(?P<word>.+)\((?P<n>\d+)\)$")
_PHONE_RE = re.compile(r"^(?P<symbol>[A-Z]+)(?P<stress>[012])?$")

_STRESS_BY_DIGIT = {
    "0": Stress.UNSTRESSED,
    "1": Stress.PRIMARY,
    "2": Stress.SECONDARY,
}

VOWEL_LETTERS = frozenset("aeiou")

# Symbol used for every vowel the orthographic fallback emits. Keeping a single
# generic vowel symbol means a symbol's class never depends on context, even
# for "y" (vowel only between consonants).
FALLBACK_VOWEL_SYMBOL = "AH"


def normalize(word: str) -> str:
    """Lowercase and strip leading/trailing punctuation.

    Internal characters (apostrophes, hyphens) are kept. Punctuation-only
    tokens normalize to the empty string.
    """
    chars = word.lower()
    start, end = 0, len(chars)
    while start < end and not chars[start].isalnum():
        start += 1
    while end > start and not chars[end - 1].isalnum():
        end -= 1
    return chars[start:end]


class Lexicon:
    """Immutable after load; lookups are read-only and shareable."""

    def __init__(
        self,
        entries: dict[str, tuple[PhonemeSequence, ...]],
        classification_table: dict[str, PhoneClass],
        skipped_lines: int = 0,
    ):
        self._entries = entries
        self.classification_table = classification_table
        self.skipped_lines = skipped_lines

    def lookup(self, word: str) -> PhonemeSequence | None:
        """Default (first-listed) pronunciation, or None if absent."""
        seqs = self._entries.get(normalize(word))
        return seqs[0] if seqs else None

    def lookup_all(self, word: str) -> tuple[PhonemeSequence, ...]:
        """All pronunciation variants, default first; empty if absent."""
        return self._entries.get(normalize(word), ())

    def words(self):
        return self._entries.keys()

    def __contains__(self, word: str) -> bool:
        return normalize(word) in self._entries

    def __len__(self) -> int:
        return len(self._entries)


def load_classification_table(table_path: str | Path) -> dict[str, PhoneClass]:
    """Read a `SYMBOL CLASS` table, CLASS one of C/SV/LV/DIPH."""
    table: dict[str, PhoneClass] = {}
    with open(table_path, encoding="utf-8") as handle:
        for lineno, line in enumerate(handle, start=1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            parts = line.split()
            if len(parts) != 2:
                raise LexiconError(
                    f"{table_path}:{lineno}: expected 'SYMBOL CLASS', got {line!r}"
                )
            symbol, class_code = parts
            try:
                table[symbol.upper()] = PhoneClass(class_code.upper())
            except ValueError:
                raise LexiconError(
                    f"{table_path}:{lineno}: unknown class {class_code!r} "
                    f"(expected one of C, SV, LV, DIPH)"
                ) from None
    if not table:
        raise LexiconError(f"{table_path}: classification table is empty")
    return table


def _parse_phones(
    tokens: list[str], table: dict[str, PhoneClass], missing: set[str]
) -> tuple[Phone, ...] | None:
    """Return phones for one entry, None if any token is malformed."""
    phones = []
    for token in tokens:
        m = _PHONE_RE.match(token.upper())
        if not m:
            return None
        symbol = m.group("symbol")
        phone_class = table.get(symbol)
        if phone_class is None:
            missing.add(symbol)
            # placeholder class; the load fails afterwards anyway
            phone_class = PhoneClass.CONSONANT
        stress = None
        if phone_class is not PhoneClass.CONSONANT and m.group("stress"):
            stress = _STRESS_BY_DIGIT[m.group("stress")]
        phones.append(Phone(symbol=symbol, phone_class=phone_class, stress=stress))
    return tuple(phones)


def load_lexicon(path: str | Path, table_path: str | Path) -> Lexicon:
    """Load a pronouncing dictionary plus its phone classification table.

    Malformed lines are skipped and counted, never fatal. A phone symbol used
    by any entry but absent from the table is fatal and reported by name.
    """
    table = load_classification_table(table_path)
    entries: dict[str, list[PhonemeSequence]] = {}
    missing_symbols: set[str] = set()
    skipped = 0

    with open(path, encoding="utf-8") as handle:
        for line in handle:
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            parts = line.split()
            if len(parts) < 2:
                skipped += 1
                continue
            raw_word, phone_tokens = parts[0], parts[1:]
            variant_match = _VARIANT_RE.match(raw_word)
            if variant_match:
                raw_word = variant_match.group("word")
            word = normalize(raw_word)
            phones = _parse_phones(phone_tokens, table, missing_symbols)
            if not word or phones is None:
                skipped += 1
                continue
            seq = PhonemeSequence(word=word, phones=phones, source=Source.LEXICON)
            entries.setdefault(word, []).append(seq)

    if missing_symbols:
        raise LexiconError(
            "classification table is missing symbols used by entries: "
            + ", ".join(sorted(missing_symbols))
        )
    if skipped:
        log.warning("skipped %d malformed line(s) while loading %s", skipped, path)

    frozen = {word: tuple(seqs) for word, seqs in entries.items()}
    return Lexicon(frozen, table, skipped_lines=skipped)


def fallback_phonemize(word: str) -> PhonemeSequence:
    """Deterministic orthographic phonemization for out-of-vocabulary words.

    Doubled letters are collapsed first; a/e/i/o/u (and y strictly between
    two consonant letters) become short vowels, every other character a
    consonant.
    """
    key = normalize(word)
    if not key:
        raise ValueError(f"cannot phonemize empty or punctuation-only token {word!r}")
    letters = [c for i, c in enumerate(key) if i == 0 or c != key[i - 1]]
    phones = []
    for i, c in enumerate(letters):
        is_vowel = c in VOWEL_LETTERS
        if c == "y" and 0 < i < len(letters) - 1:
            is_vowel = (
                letters[i - 1] not in VOWEL_LETTERS
                and letters[i + 1] not in VOWEL_LETTERS
            )
        if is_vowel:
            phones.append(Phone(FALLBACK_VOWEL_SYMBOL, PhoneClass.SHORT_VOWEL))
        else:
            phones.append(Phone(c.upper(), PhoneClass.CONSONANT))
    return PhonemeSequence(word=key, phones=tuple(phones), source=Source.FALLBACK)


def phonemize(lexicon: Lexicon, word: str, allow_fallback: bool = True) -> PhonemeSequence:
    """Look the word up in the lexicon, falling back to orthography when absent."""
    key = normalize(word)
    if not key:
        raise ValueError(f"cannot phonemize empty or punctuation-only token {word!r}")
    seqs = lexicon.lookup_all(key)
    if seqs:
        return seqs[0]
    if not allow_fallback:
        raise OutOfVocabularyError(key)
    return fallback_phonemize(key)


def default_lexicon_path() -> Path:
    return Path(str(resources.files("versebeat").joinpath("data/lexicon.dict")))


def default_classes_path() -> Path:
    return Path(str(resources.files("versebeat").joinpath("data/phone_classes.txt")))


@lru_cache(maxsize=1)
def load_default_lexicon() -> Lexicon:
    """The bundled dictionary, loaded once per process."""
    return load_lexicon(default_lexicon_path(), default_classes_path())
