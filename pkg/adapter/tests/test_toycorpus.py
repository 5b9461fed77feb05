"""Slot grammar: verse shape, distinct beats per slot, sampling behavior."""

import pytest

from beatadapter.toycorpus import SLOTS, check_slot_beats, generate_verses

from conftest import require_versebeat


def test_five_slots_of_eight():
    assert len(SLOTS) == 5
    assert all(len(words) == 8 for _, words in SLOTS)
    every_word = [w for _, words in SLOTS for w in words]
    assert len(set(every_word)) == len(every_word)


def test_verses_are_five_known_words():
    verses = generate_verses(50, seed=1)
    vocabulary = [set(words) for _, words in SLOTS]
    for verse in verses:
        words = verse.split(" ")
        assert len(words) == 5
        for word, slot in zip(words, vocabulary):
            assert word in slot


def test_verses_distinct_and_seeded():
    verses = generate_verses(500, seed=9)
    assert len(set(verses)) == 500
    assert generate_verses(500, seed=9) == verses
    assert generate_verses(500, seed=10) != verses


def test_count_above_capacity_rejected():
    with pytest.raises(ValueError, match="32768"):
        generate_verses(32769, seed=0)


def test_full_capacity_reachable():
    verses = generate_verses(8 ** 5, seed=0)
    assert len(set(verses)) == 8 ** 5


def test_slot_beats_distinct_within_each_slot():
    require_versebeat()
    beats = check_slot_beats()
    for slot_name, words in SLOTS:
        slot_beats = [beats[w] for w in words]
        assert len(set(slot_beats)) == len(words), slot_name
    # beats are the core toolkit's binary patterns
    assert all(set(b) <= {"0", "1"} for b in beats.values())
