"""Command-line entry points: train a model on a tensor file, then emit a
prediction CSV from a checkpoint."""

from __future__ import annotations

import argparse
import sys

from .cten import read_tensors
from .errors import FormatError, ShapeError, SplitError
from .model import ModelSpec
from .predict import predict, write_predictions
from .train import (TrainSpec, load_checkpoint, save_checkpoint, save_log,
                    train)


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="cnn-harness")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("train", help="train on a CTEN tensor file")
    p.add_argument("--tensors", required=True)
    p.add_argument("--kernel", type=int, default=3, choices=(3, 5))
    p.add_argument("--epochs", type=int, default=500)
    p.add_argument("--batch-size", type=int, default=32)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--checkpoint", required=True)
    p.add_argument("--log", default=None)

    p = sub.add_parser("predict", help="write a prediction CSV")
    p.add_argument("--tensors", required=True)
    p.add_argument("--checkpoint", required=True)
    p.add_argument("--out", required=True)
    return parser


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        if args.command == "train":
            records = read_tensors(args.tensors)
            spec = TrainSpec(max_epochs=args.epochs,
                             batch_size=args.batch_size)
            checkpoint, log = train(records, ModelSpec(args.kernel), spec,
                                    seed=args.seed)
            save_checkpoint(checkpoint, args.checkpoint)
            if args.log:
                save_log(log, args.log)
            print(f"best epoch {checkpoint.best_epoch} "
                  f"val acc {checkpoint.best_val_acc:.4f}")
        else:
            records = read_tensors(args.tensors)
            rows = predict(load_checkpoint(args.checkpoint), records)
            write_predictions(rows, args.out)
            print(f"wrote {len(rows)} predictions to {args.out}")
    except (FileNotFoundError, FormatError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (ShapeError, SplitError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    return 0


if __name__ == "__main__":
    sys.exit(main())
