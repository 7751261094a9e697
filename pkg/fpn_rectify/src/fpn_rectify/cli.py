"""Command-line front-end: fpn-train <train|predict>.

Exit codes: 0 success, 2 usage or I/O failure.
"""

from __future__ import annotations

import argparse
import sys

from .losses import DEFAULT_SCALE_S
from .predict import predict
from .train import TrainConfig, train

EXIT_OK = 0
EXIT_USAGE = 2


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="fpn-train",
        description="Train and run the pyramid depth rectifier on "
                    "raw/ground-truth dataset pairs")
    sub = parser.add_subparsers(dest="command", required=True)

    p_train = sub.add_parser("train", help="fit a model to a dataset manifest")
    p_train.add_argument("--manifest", required=True,
                         help="manifest.jsonl written by the dataset builder")
    p_train.add_argument("--checkpoint", required=True,
                         help="where to write the trained model")
    p_train.add_argument("--epochs", type=int, default=30)
    p_train.add_argument("--batch-size", type=int, default=8, dest="batch_size")
    p_train.add_argument("--lr", type=float, default=1e-3)
    p_train.add_argument("--scale-s", type=float, default=DEFAULT_SCALE_S,
                         dest="scale_s", help="combined-loss scale factor")
    p_train.add_argument("--max-depth", type=int, default=10000,
                         dest="max_depth",
                         help="depth units mapped to 1.0 at the network input")
    p_train.add_argument("--seed", type=int, default=0)
    p_train.add_argument("--limit", type=int, default=None,
                         help="train on only the first N pairs")

    p_pred = sub.add_parser("predict", help="run a checkpoint over a frame dir")
    p_pred.add_argument("--checkpoint", required=True)
    p_pred.add_argument("--input", required=True)
    p_pred.add_argument("--output", required=True)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "train":
            cfg = TrainConfig(
                manifest=args.manifest, checkpoint=args.checkpoint,
                epochs=args.epochs, batch_size=args.batch_size,
                learning_rate=args.lr, scale_s=args.scale_s,
                max_depth=args.max_depth, seed=args.seed, limit=args.limit)
            summary = train(cfg)
            print(f"trained on {summary['pairs']} pairs -> "
                  f"{summary['checkpoint']}")
        else:
            names = predict(args.checkpoint, args.input, args.output)
            print(f"predicted {len(names)} frames -> {args.output}")
        return EXIT_OK
    except (OSError, ValueError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
