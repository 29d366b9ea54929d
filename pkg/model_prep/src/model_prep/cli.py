"""CLI: ``model-prep train`` and ``model-prep export``."""

from __future__ import annotations

import argparse
import sys

from .data import DatasetLayoutError
from .export import ExportError, export, verify_export
from .train import TrainConfig, train


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="model-prep")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("train", help="fit the classifier on a frame dataset")
    p.add_argument("--dataset", required=True, help="class-per-directory frame layout")
    p.add_argument("--out", required=True, help="checkpoint directory")
    p.add_argument("--backbone", default="xception", choices=("xception", "tiny"))
    p.add_argument("--pretrained", action="store_true",
                   help="start from imagenet weights (needs network access)")
    p.add_argument("--input-size", type=int, default=244)
    p.add_argument("--batch-size", type=int, default=32)
    p.add_argument("--epochs", type=int, default=100)
    p.add_argument("--learning-rate", type=float, default=0.01)
    p.add_argument("--tiny-subset", action="store_true",
                   help="cap at 10 classes / 50 clips for smoke runs")

    p = sub.add_parser("export", help="convert a checkpoint to tflite + references")
    p.add_argument("--checkpoint", required=True)
    p.add_argument("--out")
    p.add_argument("--reference-count", type=int, default=128)
    p.add_argument("--verify", action="store_true", help="replay references after export")

    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "train":
            config = TrainConfig(
                input_size=args.input_size, backbone=args.backbone,
                pretrained=args.pretrained, batch_size=args.batch_size,
                epochs=args.epochs, learning_rate=args.learning_rate,
                tiny_subset=args.tiny_subset,
            )
            out = train(args.dataset, args.out, config)
            print(f"checkpoint -> {out}")
        else:
            artifacts = export(args.checkpoint, args.out,
                               reference_count=args.reference_count)
            print(f"model -> {artifacts.model_path}")
            print(f"labels -> {artifacts.labels_path}")
            print(f"references -> {artifacts.reference_path}")
            if args.verify:
                worst = verify_export(artifacts)
                print(f"verified: max probability drift {worst:.2e}")
    except (DatasetLayoutError, ExportError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return 0


def entrypoint() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entrypoint()
