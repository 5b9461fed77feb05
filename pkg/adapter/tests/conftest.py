"""Shared fixtures: a toy corpus, a built dataset, and a quick checkpoint.

The dataset is produced by the core toolkit's CLI, never by importing it:
the adapter consumes the core strictly through its command line and file
schemas.
"""

import shutil
import subprocess

import pytest

from beatadapter.toycorpus import generate_verses
from beatadapter.training import TrainConfig, train
from beatadapter.modeling import Variant

VERSEBEAT = "versebeat"


def require_versebeat():
    if shutil.which(VERSEBEAT) is None:
        pytest.skip("core toolkit CLI not installed")


def build_dataset(verses, out_dir, seed=29, eval_fraction=0.05):
    """Run the core dataset builder over verse lines; returns out_dir."""
    require_versebeat()
    verses_file = out_dir / "verses.txt"
    out_dir.mkdir(parents=True, exist_ok=True)
    verses_file.write_text("".join(v + "\n" for v in verses), encoding="utf-8")
    subprocess.run(
        [VERSEBEAT, "build-dataset", "--input", str(verses_file),
         "--output-dir", str(out_dir), "--seed", str(seed),
         "--eval-fraction", str(eval_fraction)],
        check=True, capture_output=True, text=True,
    )
    return out_dir


@pytest.fixture(scope="session")
def dataset_dir(tmp_path_factory):
    """2,400 toy verses through the core builder: train.jsonl + eval.jsonl."""
    return build_dataset(
        generate_verses(2400, seed=17),
        tmp_path_factory.mktemp("toyds"),
    )


@pytest.fixture(scope="session")
def mini_checkpoint(tmp_path_factory, dataset_dir):
    """A quickly trained beat-variant model for protocol-level tests."""
    out = tmp_path_factory.mktemp("ck") / "mini-beat"
    train(TrainConfig(
        train_path=dataset_dir / "train.jsonl",
        eval_path=dataset_dir / "eval.jsonl",
        output_dir=out,
        variant=Variant.BEAT,
        epochs=2,
        train_batch=32,
        seed=3,
    ))
    return out
