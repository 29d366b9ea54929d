"""Native GIF89a encoder: frame sampling, median-cut palettes, LZW, framing.

The emitted stream uses one global color table per file, full-coverage frames
(no delta regions), and the NETSCAPE2.0 extension for looping. Output is
deterministic: identical frames and spec always produce identical bytes.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from PIL import Image

from .errors import TruncationError
from .sprite import RasterImage, as_image

__all__ = [
    "GifSpec",
    "Palette",
    "sample_frames",
    "scale_frames",
    "quantize",
    "lzw_encode",
    "encode_gif",
]

GIF_TRAILER = 0x3B
MAX_CODE_WIDTH = 12


@dataclass(frozen=True)
class GifSpec:
    """Animated-GIF output parameters."""

    duration: float = 3.0
    output_fps: int = 10
    max_colors: int = 256
    loop: bool = True
    scale_width: int | None = 480

    def __post_init__(self) -> None:
        if self.duration <= 0:
            raise ValueError("duration must be positive")
        if not 1 <= self.output_fps <= 50:
            raise ValueError("output_fps must be in 1..50")
        if not 2 <= self.max_colors <= 256:
            raise ValueError("max_colors must be in 2..256")
        if self.scale_width is not None and self.scale_width < 1:
            raise ValueError("scale_width must be positive")

    @property
    def frame_count(self) -> int:
        return round(self.duration * self.output_fps)

    @property
    def delay_hundredths(self) -> int:
        return round(100 / self.output_fps)


@dataclass(frozen=True)
class Palette:
    """Global color table: up to 256 unique RGB entries."""

    colors: np.ndarray  # (n, 3) uint8

    def __post_init__(self) -> None:
        c = np.asarray(self.colors, np.uint8)
        if c.ndim != 2 or c.shape[1] != 3 or c.shape[0] < 1:
            raise ValueError(f"palette must be (n, 3), got {c.shape}")
        packed = _pack(c)
        if len(np.unique(packed)) != len(packed):
            raise ValueError("palette entries must be unique")
        object.__setattr__(self, "colors", c)

    def __len__(self) -> int:
        return len(self.colors)


def sample_frames(frames: Sequence[RasterImage], src_fps: float,
                  spec: GifSpec) -> list[RasterImage]:
    """Pick the output frames: uniform media times starting at t = 0.

    ``frames`` is a uniformly timed decode at ``src_fps``. The source must
    cover at least ``spec.duration`` seconds of media time.
    """
    if src_fps <= 0:
        raise ValueError("src_fps must be positive")
    available = len(frames) / src_fps
    if available + 1e-9 < spec.duration:
        raise TruncationError(
            f"need {spec.duration:.2f}s of media, only {available:.2f}s available"
        )
    out = []
    for k in range(spec.frame_count):
        t = k / spec.output_fps
        idx = min(int(t * src_fps + 1e-9), len(frames) - 1)
        out.append(frames[idx])
    return out


def scale_frames(frames: Sequence[RasterImage], width: int | None) -> list[RasterImage]:
    """Aspect-preserving resize of every frame to ``width`` (None = keep)."""
    if width is None or not frames or frames[0].shape[1] == width:
        return list(frames)
    h, w = frames[0].shape[:2]
    target = (width, max(1, round(h * width / w)))
    return [
        np.asarray(Image.fromarray(as_image(f)).resize(target, Image.BILINEAR))
        for f in frames
    ]


def _pack(rgb: np.ndarray) -> np.ndarray:
    r = rgb[..., 0].astype(np.uint32)
    g = rgb[..., 1].astype(np.uint32)
    b = rgb[..., 2].astype(np.uint32)
    return (r << 16) | (g << 8) | b


def _median_cut(colors: np.ndarray, counts: np.ndarray, max_colors: int) -> np.ndarray:
    """Split the (unique color, count) distribution into <= max_colors boxes.

    Deterministic: the box with the widest channel range splits first, along
    that channel, at the weighted median; ties resolve to the lowest box index
    and lowest channel index.
    """
    boxes = [(colors.astype(np.int32), counts)]
    while len(boxes) < max_colors:
        widths = []
        for cols, _ in boxes:
            span = cols.max(axis=0) - cols.min(axis=0) if len(cols) > 1 else np.zeros(3, np.int32)
            widths.append(int(span.max()))
        best = int(np.argmax(widths))
        if widths[best] == 0:
            break  # every box is a single color
        cols, cnts = boxes.pop(best)
        span = cols.max(axis=0) - cols.min(axis=0)
        ch = int(np.argmax(span))
        order = np.argsort(cols[:, ch], kind="stable")
        cols, cnts = cols[order], cnts[order]
        cum = np.cumsum(cnts)
        half = cum[-1] / 2
        split = int(np.searchsorted(cum, half)) + 1
        split = max(1, min(split, len(cols) - 1))
        boxes.insert(best, (cols[:split], cnts[:split]))
        boxes.insert(best + 1, (cols[split:], cnts[split:]))
    palette = []
    for cols, cnts in boxes:
        avg = (cols * cnts[:, None]).sum(axis=0) / cnts.sum()
        palette.append(np.round(avg).astype(np.uint8))
    uniq = np.unique(np.stack(palette), axis=0)
    return uniq


def _nearest_indices(colors: np.ndarray, palette: np.ndarray) -> np.ndarray:
    """Index of each color's nearest palette entry (Euclidean RGB), chunked."""
    pal = palette.astype(np.int32)
    out = np.empty(len(colors), np.int64)
    step = 4096
    for i in range(0, len(colors), step):
        chunk = colors[i:i + step].astype(np.int32)
        d = ((chunk[:, None, :] - pal[None, :, :]) ** 2).sum(axis=2)
        out[i:i + step] = d.argmin(axis=1)
    return out


def quantize(frames: Sequence[RasterImage], max_colors: int = 256
             ) -> tuple[Palette, list[np.ndarray]]:
    """Build one global palette over all frames and index every pixel.

    When the pooled distinct colors fit in ``max_colors`` the mapping is
    lossless; otherwise median-cut boxes supply the palette and each pixel
    maps to its nearest entry.
    """
    if not frames:
        raise ValueError("no frames to quantize")
    frames = [as_image(f) for f in frames]
    pooled = np.concatenate([_pack(f).ravel() for f in frames])
    uniq_packed, counts = np.unique(pooled, return_counts=True)
    uniq_colors = np.stack(
        [(uniq_packed >> 16) & 0xFF, (uniq_packed >> 8) & 0xFF, uniq_packed & 0xFF],
        axis=1,
    ).astype(np.uint8)

    if len(uniq_colors) <= max_colors:
        palette_colors = uniq_colors
        lut = np.arange(len(uniq_colors), dtype=np.int64)
    else:
        palette_colors = _median_cut(uniq_colors, counts, max_colors)
        lut = _nearest_indices(uniq_colors, palette_colors)

    palette = Palette(palette_colors)
    indexed = []
    for f in frames:
        packed = _pack(f).ravel()
        u_idx = np.searchsorted(uniq_packed, packed)
        idx = lut[u_idx].astype(np.uint8).reshape(f.shape[:2])
        indexed.append(idx)
    return palette, indexed


class _BitWriter:
    """LSB-first bit packer (GIF code stream order)."""

    __slots__ = ("_bytes", "_acc", "_nbits")

    def __init__(self) -> None:
        self._bytes = bytearray()
        self._acc = 0
        self._nbits = 0

    def write(self, code: int, width: int) -> None:
        self._acc |= code << self._nbits
        self._nbits += width
        while self._nbits >= 8:
            self._bytes.append(self._acc & 0xFF)
            self._acc >>= 8
            self._nbits -= 8

    def finish(self) -> bytes:
        if self._nbits:
            self._bytes.append(self._acc & 0xFF)
        return bytes(self._bytes)


def lzw_encode(indices, min_code_size: int) -> bytes:
    """LZW-compress palette indices into a raw GIF code stream.

    Emits the clear code first, grows the code width as the table fills, and
    resets the table (clear code) when code 4096 would be needed. The returned
    bytes are the raw stream, before sub-block packaging.
    """
    if not 2 <= min_code_size <= 8:
        raise ValueError("min_code_size must be in 2..8")
    clear = 1 << min_code_size
    eoi = clear + 1
    out = _BitWriter()

    table: dict[int, int] = {}
    next_code = eoi + 1
    width = min_code_size + 1
    out.write(clear, width)

    it = iter(np.asarray(indices, np.uint8).ravel().tolist())
    try:
        prefix = next(it)
    except StopIteration:
        out.write(eoi, width)
        return out.finish()
    if prefix >= clear:
        raise ValueError("index outside palette range")

    for sym in it:
        if sym >= clear:
            raise ValueError("index outside palette range")
        key = (prefix << 8) | sym
        code = table.get(key)
        if code is not None:
            prefix = code
            continue
        out.write(prefix, width)
        table[key] = next_code
        next_code += 1
        if next_code > (1 << width) and width < MAX_CODE_WIDTH:
            width += 1
        elif next_code > (1 << MAX_CODE_WIDTH):
            out.write(clear, width)
            table.clear()
            next_code = eoi + 1
            width = min_code_size + 1
        prefix = sym
    out.write(prefix, width)
    out.write(eoi, width)
    return out.finish()


def _sub_blocks(data: bytes) -> bytes:
    out = bytearray()
    for i in range(0, len(data), 255):
        chunk = data[i:i + 255]
        out.append(len(chunk))
        out.extend(chunk)
    out.append(0)
    return bytes(out)


def _color_table_bits(n_colors: int) -> int:
    bits = 1
    while (1 << bits) < n_colors:
        bits += 1
    return bits


def encode_gif(frames: Sequence[RasterImage], spec: GifSpec) -> bytes:
    """Encode full frames into a complete GIF89a byte stream."""
    if not frames:
        raise ValueError("no frames to encode")
    frames = [as_image(f) for f in frames]
    h, w = frames[0].shape[:2]
    for f in frames:
        if f.shape[:2] != (h, w):
            raise ValueError("all frames must share dimensions")
    if w > 0xFFFF or h > 0xFFFF:
        raise ValueError("frame dimensions exceed the 16-bit format limit")

    palette, indexed = quantize(frames, spec.max_colors)
    bits = _color_table_bits(len(palette))
    table_size = 1 << bits
    if len(palette) > 256:
        raise AssertionError("palette overflow past quantize")

    out = bytearray()
    out += b"GIF89a"
    # logical screen descriptor: GCT present, 8-bit color resolution
    packed = 0x80 | (0x7 << 4) | (bits - 1)
    out += struct.pack("<HHBBB", w, h, packed, 0, 0)
    out += palette.colors.tobytes()
    out += b"\x00\x00\x00" * (table_size - len(palette))

    if spec.loop:
        out += bytes([0x21, 0xFF, 0x0B]) + b"NETSCAPE2.0"
        out += bytes([0x03, 0x01]) + struct.pack("<H", 0) + b"\x00"

    min_code_size = max(2, bits)
    delay = spec.delay_hundredths
    for idx in indexed:
        # graphic control: disposal "do not dispose", no transparency
        out += bytes([0x21, 0xF9, 0x04, 0x04]) + struct.pack("<H", delay) + b"\x00\x00"
        out += b"\x2C" + struct.pack("<HHHHB", 0, 0, w, h, 0)
        out.append(min_code_size)
        out += _sub_blocks(lzw_encode(idx, min_code_size))
    out.append(GIF_TRAILER)
    return bytes(out)
