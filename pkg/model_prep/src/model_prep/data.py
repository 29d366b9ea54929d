"""Dataset handling for the class-per-directory frame layout.

Expected layout::

    dataset_dir/
      <class_name>/
        <clip_name>/frame*.jpg     (or loose frames directly under the class)

Clips are subsampled to at most ``max_frames_per_clip`` evenly spaced frames
before training.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass
from pathlib import Path

os.environ.setdefault("TF_CPP_MIN_LOG_LEVEL", "3")

FRAME_SUFFIXES = {".jpg", ".jpeg", ".png"}


class DatasetLayoutError(ValueError):
    """Raised with one message line per problematic class directory."""


@dataclass(frozen=True)
class FrameIndex:
    classes: tuple[str, ...]
    frames: tuple[tuple[str, int], ...]  # (path, class index)
    clip_count: int


def _clip_frames(clip_dir: Path) -> list[Path]:
    return sorted(p for p in clip_dir.iterdir()
                  if p.is_file() and p.suffix.lower() in FRAME_SUFFIXES)


def subsample(frames: list[Path], limit: int) -> list[Path]:
    """At most ``limit`` frames, evenly spaced across the clip."""
    if len(frames) <= limit:
        return frames
    step = len(frames) / limit
    return [frames[min(int(math.floor(i * step)), len(frames) - 1)] for i in range(limit)]


def index_dataset(dataset_dir: str | Path, max_frames_per_clip: int = 40,
                  max_classes: int | None = None,
                  max_clips_per_class: int | None = None) -> FrameIndex:
    """Walk the layout, validate it, and collect (frame, label) pairs."""
    root = Path(dataset_dir)
    if not root.is_dir():
        raise DatasetLayoutError(f"dataset directory {root} does not exist")
    class_dirs = sorted(p for p in root.iterdir() if p.is_dir())
    if max_classes is not None:
        class_dirs = class_dirs[:max_classes]
    if not class_dirs:
        raise DatasetLayoutError(f"dataset directory {root} has no class directories")

    problems: list[str] = []
    classes: list[str] = []
    frames: list[tuple[str, int]] = []
    clip_count = 0
    for class_idx, class_dir in enumerate(class_dirs):
        classes.append(class_dir.name)
        clip_dirs = sorted(p for p in class_dir.iterdir() if p.is_dir())
        loose = _clip_frames(class_dir)
        if loose:
            clip_dirs = clip_dirs + [class_dir]
        if max_clips_per_class is not None:
            clip_dirs = clip_dirs[:max_clips_per_class]
        if not clip_dirs:
            problems.append(f"{class_dir.name}: no clips or frames")
            continue
        class_frames = 0
        for clip_dir in clip_dirs:
            clip = subsample(_clip_frames(clip_dir), max_frames_per_clip)
            if not clip and clip_dir is not class_dir:
                problems.append(f"{class_dir.name}/{clip_dir.name}: no frames")
                continue
            clip_count += 1
            class_frames += len(clip)
            frames.extend((str(p), class_idx) for p in clip)
        if class_frames == 0:
            problems.append(f"{class_dir.name}: no readable frames")
    if problems:
        raise DatasetLayoutError(
            "dataset layout problems:\n  " + "\n  ".join(problems)
        )
    return FrameIndex(tuple(classes), tuple(frames), clip_count)


def build_training_datasets(index: FrameIndex, input_size: int, batch_size: int,
                            validation_fraction: float = 0.2, seed: int = 1337,
                            shear_degrees: float = 20.0, rotation_degrees: float = 10.0,
                            shift_fraction: float = 0.2, augment: bool = True):
    """tf.data train/val pipelines: decode, center-crop, resize, augment."""
    import numpy as np
    import tensorflow as tf
    import keras

    paths = np.array([p for p, _ in index.frames])
    labels = np.array([c for _, c in index.frames], np.int32)
    rng = np.random.default_rng(seed)
    order = rng.permutation(len(paths))
    paths, labels = paths[order], labels[order]
    n_val = max(1, int(len(paths) * validation_fraction)) if len(paths) > 1 else 0

    def load(path, label):
        data = tf.io.read_file(path)
        img = tf.io.decode_image(data, channels=3, expand_animations=False)
        shape = tf.shape(img)
        side = tf.minimum(shape[0], shape[1])
        img = tf.image.crop_to_bounding_box(
            img, (shape[0] - side) // 2, (shape[1] - side) // 2, side, side)
        img = tf.image.resize(img, (input_size, input_size))
        return img, label

    augmenter = keras.Sequential([
        keras.layers.RandomShear(x_factor=math.tan(math.radians(shear_degrees)), seed=seed),
        keras.layers.RandomRotation(rotation_degrees / 360.0, seed=seed),
        keras.layers.RandomTranslation(shift_fraction, shift_fraction, seed=seed),
        keras.layers.RandomFlip("horizontal", seed=seed),
    ], name="augment")

    def make(split_paths, split_labels, training):
        ds = tf.data.Dataset.from_tensor_slices((split_paths, split_labels))
        if training:
            ds = ds.shuffle(len(split_paths), seed=seed, reshuffle_each_iteration=True)
        ds = ds.map(load, num_parallel_calls=tf.data.AUTOTUNE)
        ds = ds.batch(batch_size)
        if training and augment:
            ds = ds.map(lambda x, y: (augmenter(x, training=True), y),
                        num_parallel_calls=tf.data.AUTOTUNE)
        return ds.prefetch(tf.data.AUTOTUNE)

    train_ds = make(paths[n_val:], labels[n_val:], training=True)
    val_ds = make(paths[:n_val], labels[:n_val], training=False) if n_val else None
    return train_ds, val_ds
