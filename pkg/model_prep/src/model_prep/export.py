"""Export a checkpoint to the interchange artifacts the client consumes.

Artifacts written to ``out_dir``:

* ``model.tflite``   float32 TFLite flatbuffer
* ``labels.txt``     one class per line, line order = output index
* ``reference_predictions.jsonl``  backend cross-check data

Reference-predictions format (``ltcgif-refpred-v1``): the first line is a
header declaring a deterministic input generator; each following line holds
one input's index, sha256, and the training framework's probabilities::

    {"format": "ltcgif-refpred-v1", "generator": "numpy-pcg64", "seed": S,
     "count": N, "height": H, "width": W}
    {"index": 0, "sha256": "...", "scores": [...]}

Inputs regenerate as ``rng = numpy.random.default_rng(seed)`` followed by
``count`` sequential draws of ``rng.integers(0, 256, (H, W, 3), dtype=uint8)``;
the hash guards against generator drift.
"""

from __future__ import annotations

import hashlib
import json
import os
from dataclasses import dataclass
from pathlib import Path

os.environ.setdefault("TF_CPP_MIN_LOG_LEVEL", "3")

import numpy as np

REFPRED_FORMAT = "ltcgif-refpred-v1"
REFPRED_GENERATOR = "numpy-pcg64"


class ExportError(RuntimeError):
    pass


@dataclass(frozen=True)
class ExportArtifacts:
    model_path: Path
    labels_path: Path
    reference_path: Path


def reference_inputs(seed: int, count: int, height: int, width: int):
    """Yield the deterministic uint8 reference images, in index order."""
    rng = np.random.default_rng(seed)
    for _ in range(count):
        yield rng.integers(0, 256, (height, width, 3), dtype=np.uint8)


def export(checkpoint_dir: str | Path, out_dir: str | Path | None = None,
           reference_count: int = 128, reference_seed: int = 20220425) -> ExportArtifacts:
    """Convert the checkpoint and write the cross-check reference set."""
    import keras
    import tensorflow as tf

    checkpoint_dir = Path(checkpoint_dir)
    model_file = checkpoint_dir / "model.keras"
    labels_file = checkpoint_dir / "labels.txt"
    if not model_file.exists():
        raise ExportError(f"no checkpoint at {model_file}")
    if not labels_file.exists():
        raise ExportError(f"no label file at {labels_file}")
    if reference_count < 100:
        raise ExportError("reference set must hold at least 100 inputs")
    out_dir = Path(out_dir) if out_dir else checkpoint_dir / "export"
    out_dir.mkdir(parents=True, exist_ok=True)

    model = keras.models.load_model(model_file)
    labels = [line for line in labels_file.read_text().splitlines() if line.strip()]
    width = int(model.output_shape[-1])
    if width != len(labels):
        raise ExportError(
            f"model output width {width} != {len(labels)} labels; "
            f"output tensor: {model.output.name}"
        )
    height_in, width_in = int(model.input_shape[1]), int(model.input_shape[2])

    converter = tf.lite.TFLiteConverter.from_keras_model(model)
    flatbuffer = converter.convert()
    model_path = out_dir / "model.tflite"
    model_path.write_bytes(flatbuffer)
    labels_path = out_dir / "labels.txt"
    labels_path.write_text("\n".join(labels) + "\n")

    reference_path = out_dir / "reference_predictions.jsonl"
    with reference_path.open("w") as fh:
        fh.write(json.dumps({
            "format": REFPRED_FORMAT,
            "generator": REFPRED_GENERATOR,
            "seed": reference_seed,
            "count": reference_count,
            "height": height_in,
            "width": width_in,
        }) + "\n")
        for i, image in enumerate(reference_inputs(reference_seed, reference_count,
                                                   height_in, width_in)):
            scores = model(image[None].astype(np.float32), training=False).numpy()[0]
            fh.write(json.dumps({
                "index": i,
                "sha256": hashlib.sha256(image.tobytes()).hexdigest(),
                "scores": [float(s) for s in scores],
            }) + "\n")
    return ExportArtifacts(model_path, labels_path, reference_path)


def verify_export(artifacts: ExportArtifacts, tolerance: float = 1e-3) -> float:
    """Replay the reference set through the TFLite file; returns the max
    absolute per-class probability difference against the framework scores."""
    import tensorflow as tf

    header, rows = read_reference(artifacts.reference_path)
    interpreter = tf.lite.Interpreter(model_path=str(artifacts.model_path))
    interpreter.allocate_tensors()
    inp = interpreter.get_input_details()[0]
    out = interpreter.get_output_details()[0]

    worst = 0.0
    images = reference_inputs(header["seed"], header["count"],
                              header["height"], header["width"])
    for row, image in zip(rows, images):
        digest = hashlib.sha256(image.tobytes()).hexdigest()
        if digest != row["sha256"]:
            raise ExportError(f"reference input {row['index']} hash mismatch")
        interpreter.set_tensor(inp["index"], image[None].astype(np.float32))
        interpreter.invoke()
        got = interpreter.get_tensor(out["index"])[0]
        worst = max(worst, float(np.abs(got - np.asarray(row["scores"])).max()))
    if worst > tolerance:
        raise ExportError(f"export drift {worst:.2e} exceeds {tolerance:.0e}")
    return worst


def read_reference(path: str | Path) -> tuple[dict, list[dict]]:
    lines = Path(path).read_text().splitlines()
    header = json.loads(lines[0])
    if header.get("format") != REFPRED_FORMAT:
        raise ExportError(f"unknown reference format {header.get('format')!r}")
    return header, [json.loads(line) for line in lines[1:] if line.strip()]
