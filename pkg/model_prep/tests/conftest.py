"""Tiny synthetic frame dataset and a session-scoped smoke checkpoint."""

import os

os.environ.setdefault("TF_CPP_MIN_LOG_LEVEL", "3")

import numpy as np
import pytest
from PIL import Image

from model_prep.train import TrainConfig, train

CLASSES = ("cricket_shot", "punch", "tennis_swing")
SMOKE_CONFIG = TrainConfig(
    input_size=64, backbone="tiny", epochs=2, tiny_subset=True,
    early_stop_patience=10, seed=7,
)


def make_dataset(root, classes=CLASSES, clips_per_class=4, frames_per_clip=8):
    """Class-colored noisy frames: trivially learnable, clearly laid out."""
    rng = np.random.default_rng(99)
    for ci, name in enumerate(classes):
        base = np.zeros(3)
        base[ci % 3] = 200.0
        for clip in range(clips_per_class):
            clip_dir = root / name / f"clip{clip:02d}"
            clip_dir.mkdir(parents=True)
            for frame in range(frames_per_clip):
                noise = rng.normal(0, 25, (64, 64, 3))
                img = np.clip(base + noise, 0, 255).astype(np.uint8)
                Image.fromarray(img).save(clip_dir / f"frame{frame:03d}.jpg")
    return root


@pytest.fixture(scope="session")
def dataset_dir(tmp_path_factory):
    return make_dataset(tmp_path_factory.mktemp("frames"))


@pytest.fixture(scope="session")
def checkpoint_dir(dataset_dir, tmp_path_factory):
    out = tmp_path_factory.mktemp("checkpoint")
    return train(dataset_dir, out, SMOKE_CONFIG)
