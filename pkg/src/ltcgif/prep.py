"""Ingestion: turn a source video into the origin layout, plus test fixtures.

Output layout under ``out_dir``::

    playlist.m3u8        extended-M3U media playlist
    storyboard.json      sprite grid metadata (schema below)
    ltc/<n>.jpg          sprite sheets, row-major tiles
    seg/<n>.ts           fixed-duration media segments

storyboard.json schema:
    {"interval_s", "grid_cols", "grid_rows", "tile_w", "tile_h",
     "thumbnail_count", "uri_template"}
"""

from __future__ import annotations

import colorsys
import json
import math
from pathlib import Path
from typing import Iterator

import numpy as np
from PIL import Image

from .errors import PrepError
from .ltc_model import (
    ContainerGeometry,
    DEFAULT_GEOMETRY,
    VideoMeta,
    container_count,
    thumbnail_count,
    valid_tiles_in,
)
from .sprite import blank_sheet, compose_sheet, encode_jpeg
from .transcode import Transcoder, default_transcoder

__all__ = [
    "palette_color",
    "synthesize_test_video",
    "prep",
    "write_storyboard_json",
]

MAX_SYNTH_DURATION = 600  # test fixtures stay desk-scale


def palette_color(second: int) -> tuple[int, int, int]:
    """Documented fixture palette: golden-ratio hue walk, s=0.75, v=0.95.

    Synthetic test videos paint second ``k`` entirely in ``palette_color(k)``,
    so any decoded frame identifies its media time.
    """
    hue = (second * 0.6180339887498949) % 1.0
    r, g, b = colorsys.hsv_to_rgb(hue, 0.75, 0.95)
    return round(r * 255), round(g * 255), round(b * 255)


def synthesize_test_video(duration: int, fps: int, out_path: str | Path,
                          size: tuple[int, int] = (320, 240),
                          transcoder: Transcoder | None = None) -> Path:
    """Write a video whose every frame visibly encodes its second index."""
    if duration <= 0:
        raise ValueError("duration must be a positive number of seconds")
    if duration > MAX_SYNTH_DURATION:
        raise ValueError(f"synthetic fixtures are capped at {MAX_SYNTH_DURATION}s")
    if fps < 1:
        raise ValueError("fps must be >= 1")
    transcoder = transcoder or default_transcoder()
    out_path = Path(out_path)
    out_path.parent.mkdir(parents=True, exist_ok=True)
    w, h = size

    def frames() -> Iterator[np.ndarray]:
        for sec in range(duration):
            frame = np.full((h, w, 3), palette_color(sec), np.uint8)
            for _ in range(fps):
                yield frame

    transcoder.write_video(out_path, frames(), float(fps), size)
    return out_path


def write_storyboard_json(path: str | Path, geometry: ContainerGeometry,
                          thumb_count: int, uri_template: str = "ltc/{index}.jpg") -> None:
    payload = {
        "interval_s": geometry.thumbnail_interval,
        "grid_cols": geometry.grid_cols,
        "grid_rows": geometry.grid_rows,
        "tile_w": geometry.tile_width,
        "tile_h": geometry.tile_height,
        "thumbnail_count": thumb_count,
        "uri_template": uri_template,
    }
    Path(path).write_text(json.dumps(payload, indent=2) + "\n")


def _playlist_text(segment_durations: list[float]) -> str:
    lines = [
        "#EXTM3U",
        "#EXT-X-VERSION:3",
        f"#EXT-X-TARGETDURATION:{math.ceil(max(segment_durations))}",
        "#EXT-X-MEDIA-SEQUENCE:0",
    ]
    for i, dur in enumerate(segment_durations):
        lines.append(f"#EXTINF:{dur:.3f},")
        lines.append(f"seg/{i}.ts")
    lines.append("#EXT-X-ENDLIST")
    return "\n".join(lines) + "\n"


def prep(source: str | Path, out_dir: str | Path, segment_duration: float = 10.0,
         geometry: ContainerGeometry = DEFAULT_GEOMETRY,
         transcoder: Transcoder | None = None, jpeg_quality: int = 85) -> VideoMeta:
    """Segment a video and pack its thumbnails into sprite sheets.

    One pass over the decoded frames routes each into its segment writer and
    samples the frame nearest each interval boundary as that instant's
    thumbnail.
    """
    transcoder = transcoder or default_transcoder()
    out_dir = Path(out_dir)
    info = transcoder.probe(source)
    duration = info.duration
    if duration <= 0:
        raise PrepError(f"source {source} has no decodable duration")
    meta = VideoMeta(duration=duration, fps=info.fps, segment_duration=segment_duration)

    n_thumbs = thumbnail_count(duration, geometry)
    n_containers = container_count(n_thumbs, geometry)
    n_segments = meta.segment_count

    (out_dir / "ltc").mkdir(parents=True, exist_ok=True)
    (out_dir / "seg").mkdir(parents=True, exist_ok=True)

    tile_size = (geometry.tile_width, geometry.tile_height)
    interval = geometry.thumbnail_interval
    frames_per_segment = segment_duration * info.fps

    thumbs: list[np.ndarray] = []
    next_thumb_frame = 0
    durations: list[float] = []

    seg_index = -1
    seg_frames: list[np.ndarray] = []

    def flush_segment() -> None:
        if seg_index < 0:
            return
        if not seg_frames:
            raise PrepError(f"segment {seg_index} collected no frames")
        transcoder.write_video(
            out_dir / "seg" / f"{seg_index}.ts", seg_frames, info.fps,
            (info.width, info.height),
        )
        durations.append(len(seg_frames) / info.fps)

    frame_idx = 0
    for frame in transcoder.read_frames(source):
        target_seg = min(int(frame_idx // frames_per_segment), n_segments - 1)
        if target_seg != seg_index:
            flush_segment()
            seg_index = target_seg
            seg_frames = []
        seg_frames.append(frame)
        if frame_idx == next_thumb_frame and len(thumbs) < n_thumbs:
            pil = Image.fromarray(frame).resize(tile_size, Image.BILINEAR)
            thumbs.append(np.asarray(pil))
            next_thumb_frame = math.floor(len(thumbs) * interval * info.fps)
        frame_idx += 1
    flush_segment()

    if frame_idx == 0:
        raise PrepError(f"source {source} decoded to zero frames")
    if len(thumbs) < n_thumbs:
        raise PrepError(
            f"expected {n_thumbs} thumbnails, sampled {len(thumbs)} "
            f"(probe said {info.frame_count} frames, decoded {frame_idx})"
        )

    tiles_per = geometry.tiles_per_container
    for c in range(n_containers):
        valid = valid_tiles_in(c, n_thumbs, geometry)
        if valid == 0:
            sheet = blank_sheet(geometry, c)
        else:
            sheet = compose_sheet(thumbs[c * tiles_per:c * tiles_per + valid], geometry, c)
        (out_dir / "ltc" / f"{c}.jpg").write_bytes(encode_jpeg(sheet.image, jpeg_quality))

    (out_dir / "playlist.m3u8").write_text(_playlist_text(durations))
    write_storyboard_json(out_dir / "storyboard.json", geometry, n_thumbs)
    return meta
