"""Byte-level token codec with sentinel ids for the dataset markers.

The vocabulary is fixed: 0 pad, 1 eos, 2 unused, 3..258 the 256 byte values,
259..261 the three sentinels standing in for the dataset's mask-open,
mask-close, and target-prefix marker strings.
"""

from __future__ import annotations

from dataclasses import dataclass

PAD_ID = 0
EOS_ID = 1
BYTE_OFFSET = 3
SENTINEL_0 = 259  # mask-open
SENTINEL_1 = 260  # mask-close
SENTINEL_2 = 261  # target-prefix
VOCAB_SIZE = 262

DEFAULT_MARKERS = ("⟦E0⟧", "⟦E1⟧", "⟦E2⟧")


@dataclass(frozen=True)
class Codec:
    """Encode/decode text where three marker strings map to single sentinels."""

    markers: tuple[str, str, str] = DEFAULT_MARKERS

    def __post_init__(self):
        if len(set(self.markers)) != 3 or not all(self.markers):
            raise ValueError("markers must be three distinct non-empty strings")

    def encode(self, text: str, add_eos: bool = True) -> list[int]:
        ids: list[int] = []
        sentinel_by_marker = dict(zip(self.markers, (SENTINEL_0, SENTINEL_1, SENTINEL_2)))
        # longest marker first so one marker being a prefix of another is safe
        ordered = sorted(self.markers, key=len, reverse=True)
        position = 0
        while position < len(text):
            for marker in ordered:
                if text.startswith(marker, position):
                    ids.append(sentinel_by_marker[marker])
                    position += len(marker)
                    break
            else:
                char = text[position]
                ids.extend(BYTE_OFFSET + b for b in char.encode("utf-8"))
                position += 1
        if add_eos:
            ids.append(EOS_ID)
        return ids

    def decode(self, ids: list[int]) -> str:
        pieces: list[str] = []
        buffer = bytearray()

        def flush():
            if buffer:
                pieces.append(buffer.decode("utf-8", errors="replace"))
                buffer.clear()

        for token in ids:
            if BYTE_OFFSET <= token < BYTE_OFFSET + 256:
                buffer.append(token - BYTE_OFFSET)
            elif token in (SENTINEL_0, SENTINEL_1, SENTINEL_2):
                flush()
                pieces.append(self.markers[token - SENTINEL_0])
            elif token in (PAD_ID, EOS_ID):
                flush()
            else:
                flush()
        flush()
        return "".join(pieces)


def pattern_position_mask(ids: list[int]) -> list[int]:
    """1 for token positions strictly between the first SENTINEL_0..SENTINEL_1
    pair, 0 elsewhere. Those are the pattern characters of a masked input."""
    mask = [0] * len(ids)
    try:
        open_at = ids.index(SENTINEL_0)
        close_at = ids.index(SENTINEL_1, open_at + 1)
    except ValueError:
        return mask
    for position in range(open_at + 1, close_at):
        mask[position] = 1
    return mask
