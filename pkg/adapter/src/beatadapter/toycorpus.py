"""Slot-grammar corpus for the directional experiments.

Five-word verses, determiner adjective noun verb adverb. Within each slot
every word carries a distinct beat pattern, so the pattern identifies the
masked word exactly while the surrounding words only narrow it to the slot.
Verse texts are sampled without replacement: an eval verse never appears in
training, which keeps the no-pattern baseline at the slot-marginal rate.
"""

from __future__ import annotations

import random
import shutil
import subprocess

SLOTS = (
    ("determiner", ("the", "a", "this", "your", "our", "any", "either", "another")),
    ("adjective", ("quiet", "golden", "silver", "bright", "dark", "silent", "little", "young")),
    ("noun", ("moon", "sun", "river", "echo", "poem", "stone", "garden", "evening")),
    ("verb", ("rises", "falls", "sings", "sleeps", "glows", "whispers", "wanders", "trembles")),
    ("adverb", ("softly", "gently", "slowly", "sweetly", "alone", "away", "tonight", "forever")),
)


def word_beats(words: list[str], cli: str = "versebeat") -> dict[str, str]:
    """Beat pattern per word, straight from the core toolkit's CLI."""
    if shutil.which(cli) is None:
        raise RuntimeError(f"{cli!r} not on PATH; the core toolkit must be installed")
    result = subprocess.run(
        [cli, "phonemize", " ".join(words)],
        capture_output=True, text=True, check=True,
    )
    beats = {}
    for line in result.stdout.splitlines():
        columns = line.split("\t")
        beats[columns[0]] = columns[3]
    return beats


def check_slot_beats(cli: str = "versebeat") -> dict[str, str]:
    """Verify within-slot beat uniqueness; returns beat per word."""
    every_word = [word for _, words in SLOTS for word in words]
    beats = word_beats(every_word, cli)
    for slot_name, words in SLOTS:
        seen: dict[str, str] = {}
        for word in words:
            beat = beats[word]
            if beat in seen:
                raise RuntimeError(
                    f"slot {slot_name}: {word!r} and {seen[beat]!r} share beat {beat}"
                )
            seen[beat] = word
    return beats


def generate_verses(count: int, seed: int) -> list[str]:
    """Distinct grammar sentences, shuffled order. count <= 8^5."""
    capacity = 1
    for _, words in SLOTS:
        capacity *= len(words)
    if count > capacity:
        raise ValueError(f"only {capacity} distinct verses exist, {count} requested")
    rng = random.Random(seed)
    chosen: set[tuple[int, ...]] = set()
    while len(chosen) < count:
        chosen.add(tuple(rng.randrange(len(words)) for _, words in SLOTS))
    verses = [
        " ".join(words[pick] for pick, (_, words) in zip(combo, SLOTS))
        for combo in sorted(chosen)
    ]
    rng.shuffle(verses)
    return verses
