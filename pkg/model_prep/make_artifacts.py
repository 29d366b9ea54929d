#!/usr/bin/env python3
"""Build the demo classifier artifacts consumed by the client package.

Synthesizes a tiny ten-event frame dataset, runs a short tiny-backbone
training, and exports ``artifacts/`` (model.tflite, labels.txt,
reference_predictions.jsonl). Desk-scale stand-in for a real training run:

    python3 make_artifacts.py [--out artifacts]

For a real model, point ``model-prep train`` at a full frame dataset with the
xception backbone instead.
"""

import argparse
import sys
import tempfile
from pathlib import Path

import numpy as np
from PIL import Image

from model_prep.export import export, verify_export
from model_prep.train import TrainConfig, train

EVENTS = (
    "basketball",
    "basketball_dunk",
    "boxing_punching_bag",
    "boxing_speed_bag",
    "cricket_bowling",
    "cricket_shot",
    "punch",
    "soccer_juggling",
    "soccer_penalty",
    "tennis_swing",
)


def synthesize_dataset(root: Path, size: int = 64) -> Path:
    rng = np.random.default_rng(2022)
    for ci, name in enumerate(EVENTS):
        base = np.array([
            (ci * 83) % 256, (ci * 157) % 256, (ci * 211) % 256
        ], float)
        for clip in range(3):
            clip_dir = root / name / f"clip{clip:02d}"
            clip_dir.mkdir(parents=True)
            for frame in range(6):
                noise = rng.normal(0, 20, (size, size, 3))
                img = np.clip(base + noise, 0, 255).astype(np.uint8)
                Image.fromarray(img).save(clip_dir / f"frame{frame:03d}.jpg")
    return root


def main() -> int:
    parser = argparse.ArgumentParser()
    parser.add_argument("--out", default=str(Path(__file__).parent / "artifacts"))
    parser.add_argument("--epochs", type=int, default=6)
    args = parser.parse_args()

    with tempfile.TemporaryDirectory(prefix="model-prep-demo-") as tmp:
        tmp = Path(tmp)
        dataset = synthesize_dataset(tmp / "frames")
        config = TrainConfig(input_size=64, backbone="tiny", epochs=args.epochs,
                             tiny_subset=True, seed=2022)
        checkpoint = train(dataset, tmp / "checkpoint", config)
        artifacts = export(checkpoint, args.out, reference_count=128)
        worst = verify_export(artifacts)

    print(f"model      -> {artifacts.model_path}")
    print(f"labels     -> {artifacts.labels_path}")
    print(f"references -> {artifacts.reference_path}")
    print(f"max framework-vs-flatbuffer probability drift: {worst:.2e}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
