"""Shared fixtures: a small hand-checked lexicon and the bundled one."""

import pytest

from versebeat import load_default_lexicon, load_lexicon
from versebeat.phonolex import default_classes_path

# 19 words (21 entries with variants), every pattern hand-derivable.
MINI_DICT = """\
# test pronouncing dictionary
A  AH0
A(1)  EY1
AN  AH0 N
I  AY1
IN  IH0 N
BELIEVE  B IH0 L IY1 V
THE  DH AH0
SUN  S AH1 N
MOON  M UW1 N
POEM  P OW1 AH0 M
SONG  S AO1 NG
OF  AH1 V
GO  G OW1
STONE  S T OW1 N
RIVER  R IH1 V ER0
ECHO  EH1 K OW0
WIND  W IH1 N D
WIND(1)  W AY1 N D
TO  T UW1
DUSK  D AH1 S K
"""

# hand-derived (word, cv, onset beat, nucleus beat); variants listed too
MINI_PATTERNS = {
    "a": ("V", "1", "1"),
    "an": ("VC", "10", "10"),
    "i": ("VV", "10", "10"),
    "in": ("VC", "10", "10"),
    "believe": ("CVCVVC", "101000", "010100"),
    "the": ("CV", "10", "01"),
    "sun": ("CVC", "100", "010"),
    "moon": ("CVVC", "1000", "0100"),
    "poem": ("CVVVC", "10010", "01010"),
    "song": ("CVVC", "1000", "0100"),
    "of": ("VC", "10", "10"),
    "go": ("CVV", "100", "010"),
    "stone": ("CCVVC", "01000", "00100"),
    "river": ("CVCVV", "10100", "01010"),
    "echo": ("VCVV", "1100", "1010"),
    "wind": ("CVCC", "1000", "0100"),
    "to": ("CVV", "100", "010"),
    "dusk": ("CVCC", "1000", "0100"),
}


@pytest.fixture(scope="session")
def mini_lexicon(tmp_path_factory):
    path = tmp_path_factory.mktemp("lex") / "mini.dict"
    path.write_text(MINI_DICT, encoding="utf-8")
    return load_lexicon(path, default_classes_path())


@pytest.fixture(scope="session")
def bundled_lexicon():
    return load_default_lexicon()
