"""Command line front end for the adapter."""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

from .codec import DEFAULT_MARKERS
from .modeling import MODEL_SIZES, Variant


def cmd_make_corpus(args: argparse.Namespace) -> int:
    from .toycorpus import check_slot_beats, generate_verses

    check_slot_beats(cli=args.versebeat_cmd)
    verses = generate_verses(args.count, args.seed)
    output = Path(args.output)
    output.write_text("".join(v + "\n" for v in verses), encoding="utf-8")
    print(f"wrote {len(verses)} verse(s) to {output}", file=sys.stderr)
    return 0


def cmd_train(args: argparse.Namespace) -> int:
    from .training import SchemaError, TrainConfig, train

    config = TrainConfig(
        train_path=Path(args.train),
        eval_path=Path(args.eval),
        output_dir=Path(args.output_dir),
        variant=Variant(args.variant),
        epochs=args.epochs,
        learning_rate=args.learning_rate,
        weight_decay=args.weight_decay,
        train_batch=args.train_batch,
        eval_batch=args.eval_batch,
        markers=tuple(args.markers.split(",")) if args.markers else DEFAULT_MARKERS,
        model_size=args.size,
        seed=args.seed,
    )
    try:
        training_log = train(config)
    except SchemaError as exc:
        print(f"beatadapter: {exc}", file=sys.stderr)
        return 2
    losses = " ".join(f"{x:.4f}" for x in training_log["epoch_train_loss"])
    print(
        f"trained {config.variant.value} for {config.epochs} epoch(s); "
        f"train loss per epoch: {losses}; eval loss {training_log['final_eval_loss']:.4f}",
        file=sys.stderr,
    )
    return 0


def cmd_infer(args: argparse.Namespace) -> int:
    from .inference import infer
    from .training import SchemaError

    try:
        written = infer(
            Path(args.checkpoint), Path(args.dataset), Path(args.output),
            batch_size=args.batch,
        )
    except SchemaError as exc:
        print(f"beatadapter: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"beatadapter: {exc}", file=sys.stderr)
        return 3
    print(f"wrote {written} output row(s) to {args.output}", file=sys.stderr)
    return 0


def cmd_coherence_scorer(args: argparse.Namespace) -> int:
    from .scorer import serve

    return serve(Path(args.checkpoint))


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="beatadapter", description=__doc__)
    sub = parser.add_subparsers(dest="command", metavar="COMMAND")

    p = sub.add_parser("make-corpus", help="slot-grammar verses for the toy experiments")
    p.add_argument("--output", required=True)
    p.add_argument("--count", type=int, default=6000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--versebeat-cmd", default="versebeat",
                   help="core toolkit CLI used to validate slot beats")
    p.set_defaults(func=cmd_make_corpus)

    p = sub.add_parser("train", help="fine-tune one variant on a masked-infilling dataset")
    p.add_argument("--train", required=True, help="train JSONL (dataset-builder schema)")
    p.add_argument("--eval", required=True, help="eval JSONL")
    p.add_argument("--output-dir", required=True)
    p.add_argument("--variant", choices=[v.value for v in Variant], default="beat")
    p.add_argument("--epochs", type=int, default=4)
    p.add_argument("--learning-rate", type=float, default=3e-4)
    p.add_argument("--weight-decay", type=float, default=0.1)
    p.add_argument("--train-batch", type=int, default=128)
    p.add_argument("--eval-batch", type=int, default=16)
    p.add_argument("--markers", help="mask-open,mask-close,target-prefix")
    p.add_argument("--size", choices=sorted(MODEL_SIZES), default="tiny")
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("infer", help="greedy infills for a dataset, in the evaluator schema")
    p.add_argument("--checkpoint", required=True)
    p.add_argument("--dataset", required=True)
    p.add_argument("--output", required=True)
    p.add_argument("--batch", type=int, default=16)
    p.set_defaults(func=cmd_infer)

    p = sub.add_parser("coherence-scorer",
                       help="line-protocol span scorer child (JSON in, decimal out)")
    p.add_argument("--checkpoint", required=True)
    p.set_defaults(func=cmd_coherence_scorer)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level="INFO", format="%(levelname)s %(name)s: %(message)s")
    if not getattr(args, "func", None):
        build_parser().print_help(file=sys.stderr)
        return 1
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
