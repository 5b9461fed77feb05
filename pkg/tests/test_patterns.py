"""CV and beat pattern derivation, checked against hand-derived values and
an independent slot-position oracle."""

import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import MINI_PATTERNS
from versebeat.patterns import BeatMode, PatternKind, beat_of, cv_of, span_pattern
from versebeat.phonolex import (
    OutOfVocabularyError,
    Phone,
    PhoneClass,
    PhonemeSequence,
    Source,
    phonemize,
)


def _seq(classes: list[PhoneClass]) -> PhonemeSequence:
    symbols = {
        PhoneClass.CONSONANT: "K",
        PhoneClass.SHORT_VOWEL: "IH",
        PhoneClass.LONG_VOWEL: "IY",
        PhoneClass.DIPHTHONG: "AY",
    }
    phones = tuple(Phone(symbols[c], c) for c in classes)
    return PhonemeSequence(word="synthetic", phones=phones, source=Source.LEXICON)


def oracle_beats(classes: list[PhoneClass], mode: BeatMode) -> str:
    """Independent derivation: compute slot offsets, then mark positions."""
    widths = [1 if c in (PhoneClass.CONSONANT, PhoneClass.SHORT_VOWEL) else 2 for c in classes]
    starts = [sum(widths[:i]) for i in range(len(classes))]
    total = sum(widths)
    marks = set()
    for i, c in enumerate(classes):
        if c is PhoneClass.CONSONANT:
            continue
        if mode is BeatMode.NUCLEUS:
            marks.add(starts[i])
        elif i > 0 and classes[i - 1] is PhoneClass.CONSONANT:
            marks.add(starts[i] - 1)
        else:
            marks.add(starts[i])
    return "".join("1" if i in marks else "0" for i in range(total))


class TestHandDerived:
    def test_believe(self, mini_lexicon):
        seq = phonemize(mini_lexicon, "believe")
        assert cv_of(seq) == "CVCVVC"
        assert beat_of(seq, BeatMode.ONSET) == "101000"
        assert beat_of(seq, BeatMode.NUCLEUS) == "010100"

    def test_in_beats_word_initial_vowel(self, mini_lexicon):
        seq = phonemize(mini_lexicon, "in")
        assert cv_of(seq) == "VC"
        assert beat_of(seq, BeatMode.ONSET) == "10"
        assert beat_of(seq, BeatMode.NUCLEUS) == "10"

    def test_single_diphthong_word(self, mini_lexicon):
        seq = phonemize(mini_lexicon, "I")
        assert cv_of(seq) == "VV"
        assert beat_of(seq, BeatMode.ONSET) == "10"

    def test_hiatus_beats_both_nuclei(self, mini_lexicon):
        seq = phonemize(mini_lexicon, "poem")
        assert cv_of(seq) == "CVVVC"
        assert beat_of(seq, BeatMode.ONSET) == "10010"
        assert beat_of(seq, BeatMode.NUCLEUS) == "01010"

    def test_empty_sequence(self):
        empty = PhonemeSequence(word="", phones=(), source=Source.LEXICON)
        assert cv_of(empty) == ""
        assert beat_of(empty) == ""

    def test_whole_mini_lexicon(self, mini_lexicon):
        for word, (cv, onset, nucleus) in MINI_PATTERNS.items():
            seq = phonemize(mini_lexicon, word)
            assert cv_of(seq) == cv, word
            assert beat_of(seq, BeatMode.ONSET) == onset, word
            assert beat_of(seq, BeatMode.NUCLEUS) == nucleus, word


class TestSpanPattern:
    def test_fig1_phrase_beat(self, mini_lexicon):
        sp = span_pattern(mini_lexicon, ["I", "believe", "in"])
        assert sp.serialized == "10 101000 10"
        assert sp.stripped == "1010100010"

    def test_fig1_phrase_cv(self, mini_lexicon):
        sp = span_pattern(mini_lexicon, ["I", "believe", "in"], kind=PatternKind.CV)
        assert sp.serialized == "VV CVCVVC VC"

    def test_single_word(self, mini_lexicon):
        assert span_pattern(mini_lexicon, ["in"]).serialized == "10"

    def test_stripped_is_concatenation(self, mini_lexicon):
        sp = span_pattern(mini_lexicon, ["the", "moon", "of", "stone"])
        assert sp.stripped == "".join(beat for _, _, beat in sp.per_word)

    def test_oov_propagates_when_fallback_disabled(self, mini_lexicon):
        with pytest.raises(OutOfVocabularyError):
            span_pattern(mini_lexicon, ["the", "zzqx"], allow_fallback=False)

    def test_oov_fallback_allowed_by_default(self, mini_lexicon):
        sp = span_pattern(mini_lexicon, ["the", "zzqx"])
        assert len(sp.per_word) == 2


classes_strategy = st.lists(
    st.sampled_from(list(PhoneClass)), min_size=0, max_size=12
)


class TestInvariants:
    @given(classes_strategy)
    def test_lengths_match(self, classes):
        seq = _seq(classes)
        cv = cv_of(seq)
        for mode in BeatMode:
            assert len(beat_of(seq, mode)) == len(cv)

    @given(classes_strategy)
    def test_one_beat_per_vowel(self, classes):
        seq = _seq(classes)
        vowels = sum(1 for c in classes if c is not PhoneClass.CONSONANT)
        for mode in BeatMode:
            assert beat_of(seq, mode).count("1") == vowels

    @given(classes_strategy)
    def test_against_position_oracle(self, classes):
        seq = _seq(classes)
        for mode in BeatMode:
            assert beat_of(seq, mode) == oracle_beats(classes, mode)

    @given(classes_strategy)
    def test_modes_same_character_multiset(self, classes):
        seq = _seq(classes)
        assert sorted(beat_of(seq, BeatMode.ONSET)) == sorted(
            beat_of(seq, BeatMode.NUCLEUS)
        )

    @given(classes_strategy)
    def test_beat_slot_legality(self, classes):
        seq = _seq(classes)
        cv = cv_of(seq)
        nucleus = beat_of(seq, BeatMode.NUCLEUS)
        for i, mark in enumerate(nucleus):
            if mark == "1":
                assert cv[i] == "V"
        onset = beat_of(seq, BeatMode.ONSET)
        for i, mark in enumerate(onset):
            if mark == "1" and cv[i] == "C":
                # an onset-consonant beat must be followed by a vowel slot
                assert i + 1 < len(cv) and cv[i + 1] == "V"

    def test_zero_vowel_word_gets_all_zeros(self):
        seq = _seq([PhoneClass.CONSONANT, PhoneClass.CONSONANT])
        assert beat_of(seq) == "00"
