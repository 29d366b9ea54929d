"""Training entry point.

Defaults follow the recipe the classifier was designed with: SGD with
decoupled weight decay (lr 0.01, momentum 0.9), mini-batches of 32, shear
20 / rotation 10 / shift 0.2 / horizontal-flip augmentation, clips subsampled
to at most 40 frames, early stopping with patience 10. ``tiny_subset`` bounds
the run to <= 10 classes and <= 50 clips for desk-scale smoke checks.
"""

from __future__ import annotations

import json
import os
import time
from dataclasses import asdict, dataclass, field
from pathlib import Path

os.environ.setdefault("TF_CPP_MIN_LOG_LEVEL", "3")

from .data import build_training_datasets, index_dataset
from .model import build_classifier

TINY_MAX_CLASSES = 10
TINY_MAX_CLIPS = 50


@dataclass(frozen=True)
class TrainConfig:
    input_size: int = 244
    backbone: str = "xception"
    pretrained: bool = False
    attention: bool = True
    vortex_rates: tuple[int, int, int] = (3, 9, 27)
    batch_size: int = 32
    epochs: int = 100
    learning_rate: float = 0.01
    momentum: float = 0.9
    weight_decay: float = 1e-4
    early_stop_patience: int = 10
    max_frames_per_clip: int = 40
    shear_degrees: float = 20.0
    rotation_degrees: float = 10.0
    shift_fraction: float = 0.2
    augment: bool = True
    validation_fraction: float = 0.2
    seed: int = 1337
    tiny_subset: bool = False


def train(dataset_dir: str | Path, out_dir: str | Path,
          config: TrainConfig = TrainConfig()) -> Path:
    """Fit the classifier and write a checkpoint directory.

    The checkpoint directory holds ``model.keras``, ``labels.txt`` (one class
    per line, training order), and ``training_log.json`` (config echo plus
    per-epoch losses).
    """
    import keras

    index = index_dataset(
        dataset_dir,
        max_frames_per_clip=config.max_frames_per_clip,
        max_classes=TINY_MAX_CLASSES if config.tiny_subset else None,
        max_clips_per_class=TINY_MAX_CLIPS if config.tiny_subset else None,
    )
    train_ds, val_ds = build_training_datasets(
        index, config.input_size, config.batch_size,
        validation_fraction=config.validation_fraction, seed=config.seed,
        shear_degrees=config.shear_degrees, rotation_degrees=config.rotation_degrees,
        shift_fraction=config.shift_fraction, augment=config.augment,
    )

    keras.utils.set_random_seed(config.seed)
    model = build_classifier(
        num_classes=len(index.classes), input_size=config.input_size,
        backbone=config.backbone, attention=config.attention,
        vortex_rates=config.vortex_rates, pretrained=config.pretrained,
    )
    model.compile(
        optimizer=keras.optimizers.SGD(
            learning_rate=config.learning_rate, momentum=config.momentum,
            weight_decay=config.weight_decay,
        ),
        loss="sparse_categorical_crossentropy",
        metrics=["accuracy"],
    )

    callbacks = []
    if val_ds is not None:
        callbacks.append(keras.callbacks.EarlyStopping(
            monitor="val_loss", patience=config.early_stop_patience,
            restore_best_weights=True,
        ))
    t0 = time.perf_counter()
    history = model.fit(train_ds, validation_data=val_ds,
                        epochs=config.epochs, verbose=0, callbacks=callbacks)
    elapsed = time.perf_counter() - t0

    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    model.save(out_dir / "model.keras")
    (out_dir / "labels.txt").write_text("\n".join(index.classes) + "\n")
    log = {
        "config": asdict(config),
        "classes": list(index.classes),
        "clip_count": index.clip_count,
        "frame_count": len(index.frames),
        "batch_size": config.batch_size,
        "epochs_run": len(history.history.get("loss", [])),
        "history": {k: [float(v) for v in vs] for k, vs in history.history.items()},
        "train_seconds": elapsed,
    }
    (out_dir / "training_log.json").write_text(json.dumps(log, indent=2) + "\n")
    return out_dir
