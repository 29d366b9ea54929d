"""Sprite-sheet tile extraction and composition.

Raster images are numpy arrays of shape (height, width, 3), dtype uint8,
C-contiguous, RGB channel order. All contracts are on the decoded buffer so
lossy JPEG round-trips never affect index math.
"""

from __future__ import annotations

import io
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from PIL import Image

from .errors import FormatError
from .ltc_model import ContainerGeometry

__all__ = [
    "RasterImage",
    "SpriteSheet",
    "as_image",
    "extract_tiles",
    "compose_sheet",
    "encode_jpeg",
    "decode_jpeg",
]

RasterImage = np.ndarray


def as_image(arr: np.ndarray) -> RasterImage:
    """Validate and normalize an array to the RGB8 raster convention."""
    a = np.asarray(arr)
    if a.ndim != 3 or a.shape[2] != 3:
        raise FormatError(f"expected (h, w, 3) RGB buffer, got shape {a.shape}")
    if a.shape[0] < 1 or a.shape[1] < 1:
        raise FormatError("image dimensions must be >= 1")
    if a.dtype != np.uint8:
        raise FormatError(f"expected uint8 pixels, got {a.dtype}")
    return np.ascontiguousarray(a)


@dataclass(frozen=True)
class SpriteSheet:
    """One decoded thumbnail container plus its place in the sequence."""

    image: RasterImage
    geometry: ContainerGeometry
    container_index: int
    valid_tiles: int

    def __post_init__(self) -> None:
        img = as_image(self.image)
        g = self.geometry
        if img.shape[1] != g.sheet_width or img.shape[0] != g.sheet_height:
            raise FormatError(
                f"sheet is {img.shape[1]}x{img.shape[0]} but geometry "
                f"declares {g.sheet_width}x{g.sheet_height}"
            )
        if not 0 <= self.valid_tiles <= g.tiles_per_container:
            raise FormatError(
                f"valid_tiles {self.valid_tiles} outside 0..{g.tiles_per_container}"
            )
        if self.container_index < 0:
            raise FormatError("container_index must be >= 0")
        object.__setattr__(self, "image", img)


def extract_tiles(sheet: SpriteSheet) -> list[tuple[int, RasterImage]]:
    """Crop the sheet into its valid tiles, row-major, as (tile_index, image)."""
    g = sheet.geometry
    tw, th = g.tile_width, g.tile_height
    out = []
    for k in range(sheet.valid_tiles):
        row, col = g.tile_position(k)
        tile = sheet.image[row * th:(row + 1) * th, col * tw:(col + 1) * tw]
        out.append((k, np.ascontiguousarray(tile)))
    return out


def compose_sheet(tiles: Sequence[RasterImage], geometry: ContainerGeometry,
                  container_index: int = 0) -> SpriteSheet:
    """Pack tiles into a sheet, row-major; unfilled cells stay black."""
    if not 1 <= len(tiles) <= geometry.tiles_per_container:
        raise FormatError(
            f"need 1..{geometry.tiles_per_container} tiles, got {len(tiles)}"
        )
    tw, th = geometry.tile_width, geometry.tile_height
    canvas = np.zeros((geometry.sheet_height, geometry.sheet_width, 3), np.uint8)
    for k, tile in enumerate(tiles):
        tile = as_image(tile)
        if tile.shape[:2] != (th, tw):
            raise FormatError(
                f"tile {k} is {tile.shape[1]}x{tile.shape[0]}, expected {tw}x{th}"
            )
        row, col = geometry.tile_position(k)
        canvas[row * th:(row + 1) * th, col * tw:(col + 1) * tw] = tile
    return SpriteSheet(canvas, geometry, container_index, len(tiles))


def blank_sheet(geometry: ContainerGeometry, container_index: int) -> SpriteSheet:
    """All-black sheet with zero valid tiles (the trailing boundary sheet)."""
    canvas = np.zeros((geometry.sheet_height, geometry.sheet_width, 3), np.uint8)
    return SpriteSheet(canvas, geometry, container_index, 0)


def encode_jpeg(image: RasterImage, quality: int = 85) -> bytes:
    buf = io.BytesIO()
    Image.fromarray(as_image(image)).save(buf, format="JPEG", quality=quality)
    return buf.getvalue()


def decode_jpeg(data: bytes) -> RasterImage:
    try:
        with Image.open(io.BytesIO(data)) as im:
            return np.asarray(im.convert("RGB"))
    except Exception as exc:
        raise FormatError(f"undecodable image data: {exc}") from exc
