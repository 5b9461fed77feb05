"""Command line front end.

Options resolve in layers: built-in defaults, then a JSON config file, then
VERSEBEAT_* environment variables, then explicit flags. Exit codes: 0 success,
1 usage, 2 bad data, 3 environment (missing or unreadable resources).
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from pathlib import Path

from . import __version__
from .corpus import Verse, clean, default_filters, token_spans
from .filler import build_index, fill
from .masker import DatasetConfig, Markers, build_dataset
from .metrics import ScorerProtocolError, attach_coherence, score_outputs
from .patterns import BeatMode, PatternKind, beat_of, cv_of
from .phonolex import (
    LexiconError,
    default_classes_path,
    default_lexicon_path,
    load_lexicon,
    normalize,
    phonemize,
)

log = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DATA = 2
EXIT_ENV = 3

ENV_PREFIX = "VERSEBEAT_"


class UsageError(Exception):
    pass


class DataError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    # argparse exits with 2 on bad usage; this toolkit reserves 2 for data
    def error(self, message):
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _load_config_file(path: str | None) -> dict:
    if not path:
        return {}
    try:
        with open(path, encoding="utf-8") as handle:
            data = json.load(handle)
    except json.JSONDecodeError as exc:
        raise DataError(f"config file {path}: {exc}") from exc
    if not isinstance(data, dict):
        raise DataError(f"config file {path}: expected a JSON object")
    return data


class Settings:
    """Layered option lookup for one invocation."""

    def __init__(self, args: argparse.Namespace):
        self.args = args
        config_path = getattr(args, "config", None) or os.environ.get(ENV_PREFIX + "CONFIG")
        self.file_values = _load_config_file(config_path)
        self.effective: dict = {}

    def get(self, name: str, default=None, cast=None):
        value = getattr(self.args, name, None)
        if value is None:
            env = os.environ.get(ENV_PREFIX + name.upper())
            if env is not None:
                value = env
            elif name in self.file_values:
                value = self.file_values[name]
        if value is None:
            value = default
        if value is not None and cast is not None:
            try:
                value = cast(value)
            except (TypeError, ValueError) as exc:
                raise UsageError(f"bad value for {name}: {value!r} ({exc})") from exc
        self.effective[name] = (
            value.value if hasattr(value, "value") else
            str(value) if isinstance(value, Path) else value
        )
        return value

    def get_bool(self, name: str, default: bool) -> bool:
        value = getattr(self.args, name, None)
        if value is None:
            env = os.environ.get(ENV_PREFIX + name.upper())
            if env is not None:
                value = env.strip().lower() in ("1", "true", "yes", "on")
            elif name in self.file_values:
                value = bool(self.file_values[name])
        if value is None:
            value = default
        self.effective[name] = value
        return value


def _load_lexicon(settings: Settings):
    lexicon_path = settings.get("lexicon", default_lexicon_path(), cast=Path)
    classes_path = settings.get("classes", default_classes_path(), cast=Path)
    return load_lexicon(lexicon_path, classes_path)


def _mode(settings: Settings) -> BeatMode:
    return settings.get("mode", BeatMode.ONSET, cast=BeatMode)


def _kind(settings: Settings) -> PatternKind:
    return settings.get("kind", PatternKind.BEAT, cast=PatternKind)


def _markers(settings: Settings) -> Markers:
    raw = settings.get("markers", None)
    if raw is None:
        return Markers()
    if isinstance(raw, (list, tuple)):
        raw = ",".join(raw)
    try:
        return Markers.from_csv(raw)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc


def _open_input(path: str):
    if path == "-":
        return sys.stdin
    return open(path, encoding="utf-8")


# ---------------------------------------------------------------- phonemize


def cmd_phonemize(args: argparse.Namespace) -> int:
    settings = Settings(args)
    lexicon = _load_lexicon(settings)
    mode = _mode(settings)
    if args.words:
        chunks = args.words
    else:
        chunks = (line for line in sys.stdin)
    wrote = False
    for chunk in chunks:
        for token in chunk.split():
            if not normalize(token):
                continue
            seq = phonemize(lexicon, token)
            phones = " ".join(
                p.symbol + ("" if p.stress is None else str(p.stress.value))
                for p in seq.phones
            )
            print(
                f"{normalize(token)}\t{phones}\t{cv_of(seq)}\t{beat_of(seq, mode)}\t{seq.source.value}"
            )
            wrote = True
    if not wrote:
        log.info("no phonemizable tokens in input")
    return EXIT_OK


# ------------------------------------------------------------------- ingest


def cmd_ingest(args: argparse.Namespace) -> int:
    settings = Settings(args)
    filters = default_filters(
        max_nonallowed=settings.get("max_nonallowed", 0.10, cast=float),
        min_tokens=settings.get("min_tokens", 2, cast=int),
        max_tokens=settings.get("max_tokens", 30, cast=int),
        stopword_window=settings.get("stopword_window", 8, cast=int),
        classifier_cmd=settings.get("classifier_cmd", None),
    )
    with _open_input(args.input) as handle:
        verses, stats = clean(handle, filters)

    out_path = settings.get("output", "-")
    if out_path == "-":
        for verse in verses:
            print(verse.text)
    else:
        with open(out_path, "w", encoding="utf-8") as handle:
            for verse in verses:
                handle.write(verse.text + "\n")

    manifest = {
        "toolkit_version": __version__,
        "config": settings.effective,
        "kept": len(verses),
        "rejected": stats,
    }
    manifest_path = settings.get("manifest", None)
    if manifest_path is None and out_path != "-":
        manifest_path = str(out_path) + ".manifest.json"
    if manifest_path:
        Path(manifest_path).write_text(
            json.dumps(manifest, indent=2, sort_keys=True) + "\n", encoding="utf-8"
        )
    dropped = sum(stats.values())
    print(
        f"kept {len(verses)} verse(s), rejected {dropped} "
        f"({', '.join(f'{k}={v}' for k, v in stats.items())})",
        file=sys.stderr,
    )
    return EXIT_OK


# ------------------------------------------------------------ build-dataset


def cmd_build_dataset(args: argparse.Namespace) -> int:
    settings = Settings(args)
    lexicon = _load_lexicon(settings)
    output_dir = settings.get("output_dir", None, cast=Path)
    if output_dir is None:
        raise UsageError("--output-dir is required")
    config = DatasetConfig(
        output_dir=output_dir,
        kind=_kind(settings),
        mode=_mode(settings),
        markers=_markers(settings),
        seed=settings.get("seed", 0, cast=int),
        eval_fraction=settings.get("eval_fraction", 0.005, cast=float),
        allow_fallback=settings.get_bool("fallback", True),
        workers=settings.get("workers", 1, cast=int),
    )
    with _open_input(args.input) as handle:
        verses = []
        for index, line in enumerate(handle):
            text = line.rstrip("\r\n")
            tokens = tuple(tok for tok, _, _ in token_spans(text))
            verses.append(Verse(text=text, tokens=tokens, source_index=index))
    try:
        result = build_dataset(lexicon, verses, config)
    except ValueError as exc:
        raise DataError(str(exc)) from exc
    print(
        f"wrote {result.train_count} train / {result.eval_count} eval example(s) "
        f"to {config.output_dir} (skipped {result.skipped})",
        file=sys.stderr,
    )
    return EXIT_OK


# --------------------------------------------------------------------- fill


def _load_freq_table(path: str | None) -> dict[str, float] | None:
    """`word<TAB>count` lines; blank lines and # comments skipped."""
    if not path:
        return None
    table: dict[str, float] = {}
    with open(path, encoding="utf-8") as handle:
        for lineno, line in enumerate(handle, start=1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            parts = line.split()
            if len(parts) != 2:
                raise DataError(f"frequency table {path}:{lineno}: expected 'word<TAB>count'")
            word, raw_count = parts
            try:
                count = float(raw_count)
            except ValueError:
                raise DataError(
                    f"frequency table {path}:{lineno}: bad count {raw_count!r}"
                ) from None
            if count < 1:
                raise DataError(f"frequency table {path}:{lineno}: counts must be >= 1")
            table[normalize(word)] = count
    return table


def cmd_fill(args: argparse.Namespace) -> int:
    settings = Settings(args)
    lexicon = _load_lexicon(settings)
    freq_table = _load_freq_table(settings.get("freq_table", None))
    index = build_index(lexicon, freq_table, kind=_kind(settings), mode=_mode(settings))
    pattern = args.pattern.replace(" ", "")
    alphabet = set("CV") if index.kind is PatternKind.CV else set("01")
    if not pattern or set(pattern) - alphabet:
        raise UsageError(f"pattern must be a non-empty string over {sorted(alphabet)}")
    candidates = fill(
        pattern,
        index,
        k=settings.get("k", 10, cast=int),
        max_words=settings.get("max_words", None, cast=int),
        include_variants=settings.get_bool("include_variants", False),
    )
    for candidate in candidates:
        print(
            json.dumps(
                {
                    "text": candidate.text,
                    "words": list(candidate.words),
                    "score": candidate.score,
                    "segmentation": list(candidate.segmentation),
                },
                ensure_ascii=False,
            )
        )
    print(f"{len(candidates)} candidate(s) for {pattern}", file=sys.stderr)
    return EXIT_OK


# --------------------------------------------------------------------- eval


def cmd_eval(args: argparse.Namespace) -> int:
    settings = Settings(args)
    lexicon = _load_lexicon(settings)
    markers = _markers(settings)
    records = []
    bad_json = 0
    with _open_input(args.outputs) as handle:
        for line in handle:
            line = line.strip()
            if not line:
                continue
            try:
                records.append(json.loads(line))
            except json.JSONDecodeError:
                bad_json += 1
    report = score_outputs(
        lexicon,
        records,
        kind=_kind(settings),
        mode=_mode(settings),
        allow_fallback=settings.get_bool("fallback", True),
    )
    report.skipped_malformed += bad_json
    scorer_cmd = settings.get("scorer_cmd", None)
    if scorer_cmd:
        try:
            attach_coherence(report, scorer_cmd, markers.as_tuple())
        except ScorerProtocolError as exc:
            raise DataError(str(exc)) from exc
    payload = report.to_dict()
    payload["config"] = settings.effective
    text = json.dumps(payload, indent=2, sort_keys=True, ensure_ascii=False) + "\n"
    report_path = settings.get("report", None)
    if report_path:
        Path(report_path).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
    exact = report.exact_accuracy
    lev = report.mean_lev_similarity
    coherence = report.mean_coherence
    print(
        f"n={report.n} exact={'n/a' if exact is None else f'{exact:.4f}'} "
        f"lev={'n/a' if lev is None else f'{lev:.4f}'} "
        f"coherence={'n/a' if coherence is None else f'{coherence:.4f}'} "
        f"skipped={report.skipped_malformed} failed={report.failed_phonemization}",
        file=sys.stderr,
    )
    return EXIT_OK


# ------------------------------------------------------------------ parser


def build_parser() -> _Parser:
    common = _Parser(add_help=False)
    common.add_argument("--lexicon", help="pronouncing dictionary path (default: bundled)")
    common.add_argument("--classes", help="phone classification table path (default: bundled)")
    common.add_argument("--config", help="JSON config file with option defaults")
    common.add_argument("--log-level", default=None, help="logging level (default WARNING)")

    parser = _Parser(prog="versebeat", description=__doc__)
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", metavar="COMMAND")

    p = sub.add_parser("phonemize", parents=[common], help="phones, CV, and beat patterns per word")
    p.add_argument("words", nargs="*", help="words or phrases (stdin when omitted)")
    p.add_argument("--mode", choices=[m.value for m in BeatMode], dest="mode")
    p.set_defaults(func=cmd_phonemize)

    p = sub.add_parser("ingest", parents=[common], help="filter a raw corpus into verses")
    p.add_argument("--input", required=True, help="raw text, one verse per line ('-' for stdin)")
    p.add_argument("--output", help="retained verses, one per line ('-' for stdout)")
    p.add_argument("--manifest", help="manifest path (default OUTPUT.manifest.json)")
    p.add_argument("--max-nonallowed", type=float, dest="max_nonallowed",
                   help="max fraction of off-charset characters (default 0.10)")
    p.add_argument("--min-tokens", type=int, dest="min_tokens")
    p.add_argument("--max-tokens", type=int, dest="max_tokens")
    p.add_argument("--stopword-window", type=int, dest="stopword_window",
                   help="require one stopword per this many tokens (default 8)")
    p.add_argument("--classifier-cmd", dest="classifier_cmd",
                   help="external keep/drop classifier command")
    p.set_defaults(func=cmd_ingest)

    p = sub.add_parser("build-dataset", parents=[common],
                       help="masked infilling examples from clean verses")
    p.add_argument("--input", required=True, help="clean verses ('-' for stdin)")
    p.add_argument("--output-dir", dest="output_dir", help="directory for train/eval/manifest")
    p.add_argument("--kind", choices=[k.value for k in PatternKind], dest="kind")
    p.add_argument("--mode", choices=[m.value for m in BeatMode], dest="mode")
    p.add_argument("--seed", type=int, dest="seed")
    p.add_argument("--eval-fraction", type=float, dest="eval_fraction")
    p.add_argument("--markers", dest="markers", help="mask-open,mask-close,target-prefix")
    p.add_argument("--fallback", action=argparse.BooleanOptionalAction, default=None,
                   help="phonemize out-of-vocabulary words orthographically (default on)")
    p.add_argument("--workers", type=int, dest="workers")
    p.set_defaults(func=cmd_build_dataset)

    p = sub.add_parser("fill", parents=[common], help="words matching a beat pattern exactly")
    p.add_argument("pattern", help="target pattern; spaces allowed")
    p.add_argument("--k", type=int, dest="k", help="max candidates (default 10)")
    p.add_argument("--max-words", type=int, dest="max_words")
    p.add_argument("--kind", choices=[k.value for k in PatternKind], dest="kind")
    p.add_argument("--mode", choices=[m.value for m in BeatMode], dest="mode")
    p.add_argument("--freq-table", dest="freq_table", help="word<TAB>count frequency table")
    p.add_argument("--include-variants", action=argparse.BooleanOptionalAction,
                   dest="include_variants", default=None,
                   help="also use non-default pronunciations (default off)")
    p.set_defaults(func=cmd_fill)

    p = sub.add_parser("eval", parents=[common], help="score generator outputs")
    p.add_argument("--outputs", required=True, help="JSONL with pattern/generated ('-' for stdin)")
    p.add_argument("--report", help="write the JSON report here instead of stdout")
    p.add_argument("--kind", choices=[k.value for k in PatternKind], dest="kind")
    p.add_argument("--mode", choices=[m.value for m in BeatMode], dest="mode")
    p.add_argument("--markers", dest="markers", help="mask-open,mask-close,target-prefix")
    p.add_argument("--scorer-cmd", dest="scorer_cmd", help="external coherence scorer command")
    p.add_argument("--fallback", action=argparse.BooleanOptionalAction, default=None)
    p.set_defaults(func=cmd_eval)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(
        level=(args.log_level or os.environ.get(ENV_PREFIX + "LOG_LEVEL") or "WARNING").upper()
        if hasattr(args, "log_level")
        else "WARNING",
        format="%(levelname)s %(name)s: %(message)s",
    )
    if not getattr(args, "func", None):
        parser.print_help(file=sys.stderr)
        return EXIT_USAGE
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"versebeat: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (DataError, LexiconError) as exc:
        print(f"versebeat: {exc}", file=sys.stderr)
        return EXIT_DATA
    except ValueError as exc:
        print(f"versebeat: {exc}", file=sys.stderr)
        return EXIT_DATA
    except OSError as exc:
        print(f"versebeat: {exc}", file=sys.stderr)
        return EXIT_ENV
    except KeyboardInterrupt:
        return EXIT_ENV


if __name__ == "__main__":
    sys.exit(main())
