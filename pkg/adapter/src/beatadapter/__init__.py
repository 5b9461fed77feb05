"""Neural fine-tuning adapter for beat-conditioned masked infilling.

Trains small encoder-decoder models on datasets produced by the core
toolkit's dataset builder, generates infills in the evaluator's output
schema, and serves the evaluator's coherence-scorer line protocol.
"""

from .codec import Codec, DEFAULT_MARKERS
from .modeling import Variant, build_model, make_batch
from .training import SchemaError, TrainConfig, load_checkpoint, train

__version__ = "0.1.0"

__all__ = [
    "Codec",
    "DEFAULT_MARKERS",
    "SchemaError",
    "TrainConfig",
    "Variant",
    "build_model",
    "load_checkpoint",
    "make_batch",
    "train",
    "__version__",
]
