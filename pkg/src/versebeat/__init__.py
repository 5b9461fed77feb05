"""Beat patterns for English verse.

Derive CV skeletons and binary beat patterns from words via a pronouncing
lexicon, build masked-infilling datasets from verse corpora, fill beat
patterns exactly with lexicon search, and score generated spans for beat
alignment.
"""

__version__ = "0.1.0"

from .corpus import Verse, clean, default_filters, split, token_spans
from .filler import BeatIndex, FillCandidate, build_index, fill, segment
from .masker import (
    DatasetConfig,
    MaskedExample,
    Markers,
    SpanChoice,
    build_dataset,
    make_example,
    sample_span_length,
    span_cap,
)
from .metrics import (
    EvalReport,
    attach_coherence,
    edit_distance,
    exact_alignment,
    lev_similarity,
    score_outputs,
)
from .patterns import BeatMode, PatternKind, SpanPattern, beat_of, cv_of, span_pattern
from .phonolex import (
    Lexicon,
    LexiconError,
    OutOfVocabularyError,
    Phone,
    PhoneClass,
    PhonemeSequence,
    Source,
    Stress,
    fallback_phonemize,
    load_default_lexicon,
    load_lexicon,
    normalize,
    phonemize,
)

__all__ = [
    "__version__",
    "BeatIndex",
    "BeatMode",
    "DatasetConfig",
    "EvalReport",
    "FillCandidate",
    "Lexicon",
    "LexiconError",
    "MaskedExample",
    "Markers",
    "OutOfVocabularyError",
    "PatternKind",
    "Phone",
    "PhoneClass",
    "PhonemeSequence",
    "Source",
    "SpanChoice",
    "SpanPattern",
    "Stress",
    "Verse",
    "attach_coherence",
    "beat_of",
    "build_dataset",
    "build_index",
    "clean",
    "cv_of",
    "default_filters",
    "edit_distance",
    "exact_alignment",
    "fallback_phonemize",
    "fill",
    "lev_similarity",
    "load_default_lexicon",
    "load_lexicon",
    "make_example",
    "normalize",
    "phonemize",
    "sample_span_length",
    "score_outputs",
    "segment",
    "span_cap",
    "span_pattern",
    "split",
    "token_spans",
]
