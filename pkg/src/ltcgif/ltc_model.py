"""Container geometry and the thumbnail <-> time <-> segment arithmetic.

Everything here is pure integer/float arithmetic over immutable values; the
rest of the package (codec, client, pipeline) builds on these mappings.
Indices are 0-based throughout, including the segment numbers written to
manifest files.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

__all__ = [
    "ContainerGeometry",
    "ThumbnailRef",
    "VideoMeta",
    "DEFAULT_GEOMETRY",
    "thumbnail_count",
    "container_count",
    "locate",
    "segment_for",
]


@dataclass(frozen=True)
class ContainerGeometry:
    """Sprite-sheet layout: a grid of fixed-size tiles sampled at a fixed interval.

    Tiles are ordered row-major (left to right, top to bottom); the default is
    the production 5x5 layout holding 25 thumbnails, one per second.
    """

    grid_cols: int = 5
    grid_rows: int = 5
    tile_width: int = 160
    tile_height: int = 90
    thumbnail_interval: float = 1.0

    def __post_init__(self) -> None:
        if self.grid_cols < 1 or self.grid_rows < 1:
            raise ValueError("grid must be at least 1x1")
        if self.tile_width < 1 or self.tile_height < 1:
            raise ValueError("tile dimensions must be positive")
        if self.thumbnail_interval <= 0:
            raise ValueError("thumbnail_interval must be positive")

    @property
    def tiles_per_container(self) -> int:
        return self.grid_cols * self.grid_rows

    @property
    def sheet_width(self) -> int:
        return self.grid_cols * self.tile_width

    @property
    def sheet_height(self) -> int:
        return self.grid_rows * self.tile_height

    def tile_position(self, tile_index: int) -> tuple[int, int]:
        """Row-major (row, col) of a tile within the sheet."""
        if not 0 <= tile_index < self.tiles_per_container:
            raise ValueError(f"tile_index {tile_index} outside 0..{self.tiles_per_container - 1}")
        return tile_index // self.grid_cols, tile_index % self.grid_cols


DEFAULT_GEOMETRY = ContainerGeometry()


@dataclass(frozen=True)
class ThumbnailRef:
    """One thumbnail's place in the global sequence, its sheet, and media time."""

    global_index: int
    container_index: int
    tile_index: int
    timestamp: float


@dataclass(frozen=True)
class VideoMeta:
    """Duration/frame-rate/segmentation facts about one video."""

    duration: float
    fps: float
    segment_duration: float = 10.0

    def __post_init__(self) -> None:
        if self.duration <= 0:
            raise ValueError("duration must be positive")
        if self.fps <= 0:
            raise ValueError("fps must be positive")
        if self.segment_duration <= 0:
            raise ValueError("segment_duration must be positive")

    @property
    def segment_count(self) -> int:
        return math.ceil(self.duration / self.segment_duration - 1e-9)

    @property
    def frame_count(self) -> int:
        return round(self.duration * self.fps)


def thumbnail_count(duration: float, geometry: ContainerGeometry = DEFAULT_GEOMETRY) -> int:
    """Number of thumbnails sampled across ``duration`` seconds.

    One thumbnail per interval, so a whole-second video at the default 1 s
    interval yields exactly ``duration`` thumbnails.
    """
    if duration < 0:
        raise ValueError("duration must be >= 0")
    if duration == 0:
        return 0
    return math.ceil(duration / geometry.thumbnail_interval - 1e-9)


def container_count(thumb_count: int, geometry: ContainerGeometry = DEFAULT_GEOMETRY) -> int:
    """Number of sprite sheets holding ``thumb_count`` thumbnails.

    Sheet sets always include the trailing boundary sheet: the count is
    ``thumb_count // tiles + 1``, so an exact multiple of the grid size still
    opens one more sheet (which then carries zero valid tiles). This matches
    the sheet counts of production storyboard sets; consumers must honor
    ``valid_tiles`` rather than assume every sheet is full.
    """
    if thumb_count < 0:
        raise ValueError("thumb_count must be >= 0")
    if thumb_count == 0:
        return 0
    return thumb_count // geometry.tiles_per_container + 1


def valid_tiles_in(container_index: int, thumb_count: int,
                   geometry: ContainerGeometry = DEFAULT_GEOMETRY) -> int:
    """Valid (non-blank) tiles in one sheet; 0 for the empty boundary sheet."""
    total = container_count(thumb_count, geometry)
    if not 0 <= container_index < max(total, 1):
        raise ValueError(f"container_index {container_index} outside 0..{total - 1}")
    tiles = geometry.tiles_per_container
    remaining = thumb_count - container_index * tiles
    return max(0, min(tiles, remaining))


def locate(global_index: int, geometry: ContainerGeometry = DEFAULT_GEOMETRY) -> ThumbnailRef:
    """Map a global thumbnail index to its sheet, tile slot, and timestamp."""
    if global_index < 0:
        raise ValueError("global_index must be >= 0")
    tiles = geometry.tiles_per_container
    return ThumbnailRef(
        global_index=global_index,
        container_index=global_index // tiles,
        tile_index=global_index % tiles,
        timestamp=global_index * geometry.thumbnail_interval,
    )


def segment_for(timestamp: float, meta: VideoMeta) -> int:
    """Index of the media segment covering ``timestamp``. Always < segment_count."""
    if not 0 <= timestamp < meta.duration:
        raise ValueError(
            f"timestamp {timestamp} outside [0, {meta.duration})"
        )
    return min(int(timestamp // meta.segment_duration), meta.segment_count - 1)
