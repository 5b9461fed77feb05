"""Pattern index, segmentation, and exact filling, checked against brute force."""

import itertools
import random

import pytest

from versebeat.filler import build_index, fill, segment
from versebeat.metrics import score_outputs
from versebeat.patterns import BeatMode, PatternKind, beat_of, span_pattern


@pytest.fixture(scope="module")
def index(mini_lexicon):
    return build_index(mini_lexicon)


def brute_force_fill(lexicon, target: str, max_words: int) -> set[tuple[str, ...]]:
    """Reference solver: try every word sequence up to max_words."""
    words = sorted(lexicon.words())
    patterns = {w: beat_of(lexicon.lookup(w)) for w in words}
    found = set()
    for count in range(1, max_words + 1):
        for combo in itertools.product(words, repeat=count):
            if "".join(patterns[w] for w in combo) == target:
                found.add(combo)
    return found


class TestBuildIndex:
    def test_shared_key(self, index):
        words = {e.word for e in index.by_pattern["10"]}
        # every mini-lexicon word whose onset pattern is "10"
        assert words == {"a", "an", "i", "in", "of", "the"}

    def test_default_frequency_is_one(self, index):
        assert all(e.frequency == 1.0 for e in index.by_pattern["10"])

    def test_variant_indexed_under_both_keys(self, index):
        wind_keys = {p for p, entries in index.by_pattern.items()
                     if any(e.word == "wind" for e in entries)}
        assert wind_keys == {"1000", "10000"}

    def test_variant_default_flag(self, index):
        by_word = {e.word: e for e in index.by_pattern["10"]}
        assert by_word["in"].from_default
        # "a" reaches "10" only through its second pronunciation
        assert not by_word["a"].from_default

    def test_frequency_table_applied(self, mini_lexicon):
        idx = build_index(mini_lexicon, {"in": 100.0, "i": 50.0})
        ranked = [e.word for e in idx.by_pattern["10"]]
        assert ranked[:2] == ["in", "i"]

    def test_frequency_below_one_rejected(self, mini_lexicon):
        with pytest.raises(ValueError):
            build_index(mini_lexicon, {"in": 0.5})

    def test_nucleus_mode_changes_keys(self, mini_lexicon):
        idx = build_index(mini_lexicon, mode=BeatMode.NUCLEUS)
        assert "01" in idx.by_pattern  # "the" under nucleus placement
        the_entries = [e.word for e in idx.by_pattern["01"]]
        assert "the" in the_entries

    def test_every_key_matches_its_words(self, mini_lexicon, index):
        for pattern, entries in index.by_pattern.items():
            for entry in entries:
                variants = mini_lexicon.lookup_all(entry.word)
                assert any(beat_of(v) == pattern for v in variants)

    def test_pattern_lengths_sorted_and_complete(self, index):
        assert list(index.pattern_lengths) == sorted(set(index.pattern_lengths))
        assert set(index.pattern_lengths) == {len(p) for p in index.by_pattern}


class TestSegment:
    def test_single_key_first(self, index):
        cuts = segment("101000", index)
        assert cuts[0] == (6,)

    def test_known_cut_present(self, index):
        cuts = segment("1010010", index)
        assert (2, 3, 2) in cuts  # 10 | 100 | 10

    def test_unsatisfiable(self, index):
        assert segment("001", index) == []

    def test_ordering_fewest_words_then_cuts(self, index):
        # 10|10010 and 10100|10 tie on word count; earlier first cut wins
        assert segment("1010010", index) == [(2, 5), (5, 2), (2, 3, 2)]

    def test_max_words_limits(self, index):
        assert segment("1010", index, max_words=1) == []
        assert segment("1010", index, max_words=2) == [(2, 2)]

    def test_bound_truncates(self, index):
        full = segment("10010", index)
        assert full == [(5,), (3, 2)]
        assert segment("10010", index, bound=1) == full[:1]

    def test_empty_pattern_rejected(self, index):
        with pytest.raises(ValueError):
            segment("", index)

    def test_brute_force_cut_equivalence(self, index):
        # every way of slicing the string into index keys, found independently
        target = "101000"
        expected = set()
        n = len(target)
        for cut_mask in range(2 ** (n - 1)):
            cuts = [0] + [i + 1 for i in range(n - 1) if cut_mask >> i & 1] + [n]
            chunks = [target[a:b] for a, b in zip(cuts, cuts[1:])]
            if all(c in index.by_pattern for c in chunks):
                expected.add(tuple(len(c) for c in chunks))
        assert set(segment(target, index)) == expected


class TestFill:
    def test_soundness(self, mini_lexicon, index):
        for target in ["10", "1010", "101000", "100010", "10010"]:
            for candidate in fill(target, index, k=None):
                derived = span_pattern(mini_lexicon, list(candidate.words))
                assert derived.stripped == target

    def test_completeness_against_brute_force(self, mini_lexicon, index):
        for target in ["10", "1010", "101000", "1000", "10010", "11", "0100"]:
            max_words = max(target.count("1"), 1)
            expected = brute_force_fill(mini_lexicon, target, max_words)
            got = {c.words for c in fill(target, index, k=None)}
            assert got == expected, target

    def test_single_word_fill(self, index):
        candidates = fill("101000", index, k=1)
        assert [c.words for c in candidates] == [("believe",)]

    def test_frequency_orders_candidates(self, mini_lexicon):
        idx = build_index(mini_lexicon, {"in": 100.0, "i": 50.0})
        candidates = fill("10", idx, k=2)
        assert [c.words for c in candidates] == [("in",), ("i",)]

    def test_k_limits_output(self, index):
        assert len(fill("10", index, k=3)) == 3
        assert len(fill("10", index, k=None)) == 5

    def test_scores_are_summed_log_frequencies(self, mini_lexicon):
        import math

        idx = build_index(mini_lexicon, {"in": 100.0, "believe": 2000.0})
        top = fill("10101000", idx, k=1)[0]
        assert top.words == ("in", "believe")
        assert top.score == pytest.approx(math.log(100.0) + math.log(2000.0))

    def test_segmentation_field_matches_words(self, mini_lexicon, index):
        for candidate in fill("101000", index, k=None):
            assert len(candidate.segmentation) == len(candidate.words)
            assert sum(candidate.segmentation) == 6

    def test_unsatisfiable_is_empty(self, index):
        # no entry in the mini lexicon starts with two zero slots
        assert fill("001", index) == []

    def test_include_variants_expands_and_is_marked(self, mini_lexicon, index):
        strict = {c.words for c in fill("10", index, k=None)}
        loose = {c.words for c in fill("10", index, k=None, include_variants=True)}
        assert ("a",) in loose - strict

    def test_deterministic_order(self, index):
        first = [c.words for c in fill("101010", index, k=None)]
        second = [c.words for c in fill("101010", index, k=None)]
        assert first == second

    def test_spaces_in_target_ignored(self, index):
        spaced = [c.words for c in fill("10 1000", index, k=None)]
        dense = [c.words for c in fill("101000", index, k=None)]
        assert spaced == dense

    def test_empty_pattern_rejected(self, index):
        with pytest.raises(ValueError):
            fill("  ", index)

    def test_outputs_score_perfectly(self, mini_lexicon, index):
        rows = [
            {"expected_pattern": target, "generated_text": c.text}
            for target in ["1010", "101000", "10010"]
            for c in fill(target, index, k=5)
        ]
        report = score_outputs(mini_lexicon, rows)
        assert report.n == len(rows) > 0
        assert report.exact_accuracy == 1.0


def test_fill_random_bundled_patterns(bundled_lexicon):
    """Patterns built from real word runs are always fillable, and every
    candidate re-verifies."""
    rng = random.Random(2024)
    words = sorted(bundled_lexicon.words())
    index = build_index(bundled_lexicon)
    for _ in range(25):
        span = [rng.choice(words) for _ in range(rng.randint(1, 3))]
        target = span_pattern(bundled_lexicon, span).stripped
        candidates = fill(target, index, k=5)
        assert candidates, target
        for candidate in candidates:
            assert span_pattern(bundled_lexicon, list(candidate.words)).stripped == target
