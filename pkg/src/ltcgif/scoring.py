"""Event scoring: preprocessing, pluggable inference backends, threshold rule.

Two backends ship: a deterministic mock driven by an injected index->score
schedule (hermetic tests, benchmark cost injection) and a loader for models
exported to the TFLite flatbuffer interchange format with a sidecar label
file (one label per line, file order = output index).
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Mapping

import numpy as np
from PIL import Image

from .errors import InferenceError, ParseError
from .sprite import RasterImage, as_image

__all__ = [
    "LabelSet",
    "ScoreVector",
    "PreprocessSpec",
    "EventQuery",
    "preprocess",
    "ScorerBackend",
    "MockBackend",
    "TfliteBackend",
    "matches",
    "load_labels",
    "load_mock_schedule",
    "write_mock_schedule",
]

# The ten sports events used throughout the fixtures and demos.
DEFAULT_EVENT_LABELS = (
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


@dataclass(frozen=True)
class LabelSet:
    """Ordered class names; position equals the model's output index."""

    labels: tuple[str, ...]

    def __post_init__(self) -> None:
        if not self.labels:
            raise ValueError("label set must be non-empty")
        if len(set(self.labels)) != len(self.labels):
            raise ValueError("label names must be unique")
        object.__setattr__(self, "labels", tuple(self.labels))

    def __len__(self) -> int:
        return len(self.labels)

    def __contains__(self, name: str) -> bool:
        return name in self.labels

    def index(self, name: str) -> int:
        try:
            return self.labels.index(name)
        except ValueError:
            raise KeyError(f"unknown label {name!r}") from None


DEFAULT_LABELS = LabelSet(DEFAULT_EVENT_LABELS)


@dataclass(frozen=True)
class ScoreVector:
    """Per-label probabilities, same order as the label set."""

    labels: LabelSet
    scores: np.ndarray

    def __post_init__(self) -> None:
        s = np.asarray(self.scores, np.float64)
        if s.shape != (len(self.labels),):
            raise ValueError(f"scores shape {s.shape} != ({len(self.labels)},)")
        if (s < -1e-9).any() or (s > 1 + 1e-9).any():
            raise ValueError("scores must lie in [0, 1]")
        if abs(float(s.sum()) - 1.0) > 1e-4:
            raise ValueError(f"scores must sum to 1 (got {s.sum():.6f})")
        object.__setattr__(self, "scores", s)

    def score_of(self, label: str) -> float:
        return float(self.scores[self.labels.index(label)])

    def top(self) -> tuple[str, float]:
        i = int(np.argmax(self.scores))
        return self.labels.labels[i], float(self.scores[i])


@dataclass(frozen=True)
class PreprocessSpec:
    """Geometry and normalization applied before inference.

    ``preprocess`` applies the geometry (center crop + resize); backends apply
    ``scale``/``offset`` when building their input tensor, so the raster stays
    uint8 through the pipeline.
    """

    crop: bool = True
    target_width: int = 244
    target_height: int = 244
    scale: float = 1.0
    offset: float = 0.0

    def __post_init__(self) -> None:
        if self.target_width < 1 or self.target_height < 1:
            raise ValueError("target dimensions must be >= 1")


@dataclass(frozen=True)
class EventQuery:
    """The user's selected events plus the acceptance threshold."""

    events: tuple[str, ...]
    threshold: float = 0.80

    def __post_init__(self) -> None:
        if not self.events:
            raise ValueError("query needs at least one event")
        if len(set(self.events)) != len(self.events):
            raise ValueError("duplicate events in query")
        if not 0 <= self.threshold <= 1:
            raise ValueError("threshold must be in [0, 1]")
        object.__setattr__(self, "events", tuple(self.events))

    def validate_against(self, labels: LabelSet) -> None:
        for e in self.events:
            if e not in labels:
                raise KeyError(f"unknown label {e!r}")


def preprocess(image: RasterImage, spec: PreprocessSpec = PreprocessSpec()) -> RasterImage:
    """Center-crop the largest square, then resize to the target dims."""
    img = as_image(image)
    h, w = img.shape[:2]
    if spec.crop and h != w:
        side = min(h, w)
        top = (h - side) // 2
        left = (w - side) // 2
        img = img[top:top + side, left:left + side]
    if img.shape[0] != spec.target_height or img.shape[1] != spec.target_width:
        pil = Image.fromarray(img).resize(
            (spec.target_width, spec.target_height), Image.BILINEAR
        )
        img = np.asarray(pil)
    return img


class ScorerBackend:
    """Inference interface: one image in, one probability vector out."""

    labels: LabelSet
    preprocess_spec: PreprocessSpec = PreprocessSpec()

    def score(self, image: RasterImage, *, index: int | None = None) -> ScoreVector:
        raise NotImplementedError


@dataclass
class MockBackend(ScorerBackend):
    """Deterministic backend driven by an index -> {label: score} schedule.

    Thumbnails whose index has no schedule entry score uniformly. The
    remaining probability mass of a scheduled entry spreads uniformly over
    the unscheduled labels. ``cost_s`` injects a fixed per-inference cost for
    benchmark runs.
    """

    labels: LabelSet = DEFAULT_LABELS
    schedule: Mapping[int, Mapping[str, float]] = field(default_factory=dict)
    cost_s: float = 0.0
    calls: int = 0

    def score(self, image: RasterImage, *, index: int | None = None) -> ScoreVector:
        self.calls += 1
        if self.cost_s > 0:
            time.sleep(self.cost_s)
        n = len(self.labels)
        entry = self.schedule.get(index) if index is not None else None
        if not entry:
            return ScoreVector(self.labels, np.full(n, 1.0 / n))
        scores = np.zeros(n)
        assigned = 0.0
        for label, value in entry.items():
            scores[self.labels.index(label)] = value
            assigned += value
        if assigned > 1.0 + 1e-9:
            raise ValueError(f"schedule for index {index} assigns mass {assigned:.4f} > 1")
        rest = n - len(entry)
        if rest:
            scores[scores == 0] = (1.0 - assigned) / rest
        return ScoreVector(self.labels, scores)


class TfliteBackend(ScorerBackend):
    """Loads a TFLite flatbuffer plus its sidecar label file.

    TensorFlow imports lazily so the rest of the package works without it.
    The preprocessing target is read off the model's input tensor; ``spec``
    only contributes crop behavior and normalization.
    """

    def __init__(self, model_path: str | Path, labels_path: str | Path,
                 spec: PreprocessSpec = PreprocessSpec()):
        try:
            import tensorflow as tf
        except ImportError as exc:
            raise InferenceError(
                "the tflite backend needs tensorflow (pip install ltcgif[tflite])"
            ) from exc
        self.labels = load_labels(labels_path)
        try:
            self._interpreter = tf.lite.Interpreter(model_path=str(model_path))
            self._interpreter.allocate_tensors()
        except Exception as exc:
            raise InferenceError(f"cannot load model {model_path}: {exc}") from exc
        self._input = self._interpreter.get_input_details()[0]
        self._output = self._interpreter.get_output_details()[0]
        width = int(self._output["shape"][-1])
        if width != len(self.labels):
            raise InferenceError(
                f"model outputs {width} classes but label file "
                f"{labels_path} has {len(self.labels)} lines"
            )
        in_shape = self._input["shape"]
        self.preprocess_spec = PreprocessSpec(
            crop=spec.crop,
            target_width=int(in_shape[2]),
            target_height=int(in_shape[1]),
            scale=spec.scale,
            offset=spec.offset,
        )

    def score(self, image: RasterImage, *, index: int | None = None) -> ScoreVector:
        x = as_image(image).astype(np.float32)
        spec = self.preprocess_spec
        if spec.scale != 1.0 or spec.offset != 0.0:
            x = x * spec.scale + spec.offset
        self._interpreter.set_tensor(self._input["index"], x[None, ...])
        self._interpreter.invoke()
        probs = self._interpreter.get_tensor(self._output["index"])[0]
        return ScoreVector(self.labels, probs.astype(np.float64))


def matches(sv: ScoreVector, query: EventQuery) -> tuple[str, float] | None:
    """Best queried event iff its score strictly exceeds the threshold.

    Exact score ties resolve to the label earlier in the label set.
    """
    best: tuple[int, str, float] | None = None
    for event in query.events:
        i = sv.labels.index(event)
        s = float(sv.scores[i])
        if best is None or s > best[2] or (s == best[2] and i < best[0]):
            best = (i, event, s)
    assert best is not None
    if best[2] > query.threshold:
        return best[1], best[2]
    return None


def load_labels(path: str | Path) -> LabelSet:
    lines = Path(path).read_text().splitlines()
    labels = [line.strip() for line in lines if line.strip()]
    if not labels:
        raise ParseError(f"label file {path} is empty")
    return LabelSet(tuple(labels))


def load_mock_schedule(path: str | Path) -> dict[int, dict[str, float]]:
    """Parse a schedule file: ``<index> <label>:<score>[,<label>:<score>...]``."""
    schedule: dict[int, dict[str, float]] = {}
    for lineno, raw in enumerate(Path(path).read_text().splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        try:
            key, rest = line.split(None, 1)
            entry = {}
            for pair in rest.split(","):
                label, score = pair.strip().rsplit(":", 1)
                entry[label] = float(score)
            schedule[int(key)] = entry
        except (ValueError, IndexError) as exc:
            raise ParseError(f"bad schedule entry {raw!r}: {exc}", line=lineno) from exc
    return schedule


def write_mock_schedule(schedule: Mapping[int, Mapping[str, float]],
                        path: str | Path) -> None:
    lines = []
    for index in sorted(schedule):
        pairs = ",".join(f"{label}:{score}" for label, score in schedule[index].items())
        lines.append(f"{index} {pairs}")
    Path(path).write_text("\n".join(lines) + "\n")
