"""Classifier architecture: 2D CNN backbone with a vortex-pooling attention gate.

The attention block aggregates context through parallel average-pool +
dilated-convolution branches at geometrically spaced rates, fuses them, and
gates the backbone features with a sigmoid map before global pooling. Its
attachment point (right after the last backbone feature map) and the dilation
rates are configurable.
"""

from __future__ import annotations

import os

os.environ.setdefault("TF_CPP_MIN_LOG_LEVEL", "3")

import keras
from keras import layers


def vortex_pooling(features, rates: tuple[int, int, int] = (3, 9, 27),
                   name: str = "vortex"):
    """Multi-branch contextual attention over a (h, w, c) feature map."""
    h = int(features.shape[1])
    channels = int(features.shape[-1])
    mid = max(channels // 2, 8)

    # global context branch, broadcast back to the feature grid
    g = layers.GlobalAveragePooling2D(keepdims=True, name=f"{name}_gap")(features)
    g = layers.Conv2D(mid, 1, padding="same", activation="relu", name=f"{name}_gconv")(g)
    g = layers.UpSampling2D(size=h, interpolation="nearest", name=f"{name}_gup")(g)

    branches = [
        layers.Conv2D(mid, 1, padding="same", activation="relu", name=f"{name}_b0")(features),
        g,
    ]
    for i, rate in enumerate(rates, start=1):
        pooled = layers.AveragePooling2D(pool_size=3, strides=1, padding="same",
                                         name=f"{name}_pool{i}")(features)
        branches.append(
            layers.Conv2D(mid, 3, padding="same", dilation_rate=min(rate, max(h - 1, 1)),
                          activation="relu", name=f"{name}_b{i}")(pooled)
        )

    fused = layers.Concatenate(name=f"{name}_cat")(branches)
    gate = layers.Conv2D(channels, 1, padding="same", activation="sigmoid",
                         name=f"{name}_gate")(fused)
    return layers.Multiply(name=f"{name}_apply")([features, gate])


def _tiny_backbone(x):
    """Small conv stack for desk-scale smoke runs; same interface as xception."""
    for i, width in enumerate((16, 32, 64)):
        x = layers.Conv2D(width, 3, strides=2, padding="same", activation="relu",
                          name=f"tiny_conv{i}")(x)
    return x


def build_classifier(num_classes: int, input_size: int = 244,
                     backbone: str = "xception", attention: bool = True,
                     vortex_rates: tuple[int, int, int] = (3, 9, 27),
                     pretrained: bool = False) -> keras.Model:
    """Assemble the classifier; inputs are raw RGB uint8-range float tensors."""
    inputs = keras.Input((input_size, input_size, 3), name="image")
    x = layers.Rescaling(1 / 127.5, offset=-1.0, name="rescale")(inputs)

    if backbone == "xception":
        base = keras.applications.Xception(
            include_top=False,
            weights="imagenet" if pretrained else None,
            input_shape=(input_size, input_size, 3),
        )
        x = base(x)
    elif backbone == "tiny":
        x = _tiny_backbone(x)
    else:
        raise ValueError(f"unknown backbone {backbone!r}")

    if attention:
        x = vortex_pooling(x, rates=vortex_rates)

    x = layers.GlobalAveragePooling2D(name="head_pool")(x)
    outputs = layers.Dense(num_classes, activation="softmax", name="events")(x)
    return keras.Model(inputs, outputs, name=f"event_classifier_{backbone}")
