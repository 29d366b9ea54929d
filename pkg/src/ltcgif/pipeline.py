"""End-to-end orchestration with per-stage instrumentation.

Two modes share a six-stage timing taxonomy:

* ``ltc``: download sprite sheets, extract tiles, score each thumbnail,
  select, download only the matching segments, encode GIFs.
* ``fb``: the frame-based baseline. The first two columns are repurposed:
  ``download_ltc`` books the full-video segment download and
  ``extract_thumbnails`` books frame decoding; every ``fb_stride``-th frame
  is scored.

Stages run on one critical path (sheet prefetch parallelizes inside the
download stage), so the six stage times sum to the reported total up to
timer noise.
"""

from __future__ import annotations

import csv
import io
import time
from contextlib import contextmanager
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import LtcgifError
from .gif import GifSpec, encode_gif, sample_frames, scale_frames
from .hls import HlsClient
from .ltc_model import ThumbnailRef, VideoMeta, locate
from .scoring import EventQuery, ScorerBackend, preprocess
from .selection import (
    SelectionManifest,
    best_event_for_segment,
    select,
    top_segments,
    write_manifest,
)
from .sprite import extract_tiles
from .transcode import Transcoder, default_transcoder

__all__ = [
    "PipelineConfig",
    "StageTimings",
    "RunReport",
    "BenchComparison",
    "run",
    "bench_compare",
    "CSV_COLUMNS",
    "write_csv",
]

STAGES = (
    "download_ltc",
    "extract_thumbnails",
    "events",
    "thumbnail_selection",
    "download_segments",
    "generate_gifs",
)

CSV_COLUMNS = (
    "video_id,mode,download_ltc_s,extract_thumbnails_s,events_s,"
    "thumbnail_selection_s,download_segments_s,generate_gifs_s,total_s,"
    "inference_count,bytes_downloaded,gif_count"
)


class PipelineError(LtcgifError):
    """Wraps a failure with the stage it happened in."""

    def __init__(self, stage: str, cause: Exception):
        self.stage = stage
        super().__init__(f"stage {stage!r} failed: {cause}")


@dataclass(frozen=True)
class PipelineConfig:
    base_url: str
    video_id: str
    query: EventQuery
    mode: str = "ltc"
    fb_stride: int = 1
    max_gifs: int | None = None
    gif_spec: GifSpec = field(default_factory=GifSpec)
    prefetch: int = 4

    def __post_init__(self) -> None:
        if self.mode not in ("ltc", "fb"):
            raise ValueError(f"mode must be 'ltc' or 'fb', not {self.mode!r}")
        if self.fb_stride < 1:
            raise ValueError("fb_stride must be >= 1")
        if self.max_gifs is not None and self.max_gifs < 0:
            raise ValueError("max_gifs must be >= 0")


@dataclass(frozen=True)
class StageTimings:
    download_ltc: float
    extract_thumbnails: float
    events: float
    thumbnail_selection: float
    download_segments: float
    generate_gifs: float
    total: float
    inference_count: int
    bytes_downloaded: int

    @property
    def stage_sum(self) -> float:
        return (self.download_ltc + self.extract_thumbnails + self.events
                + self.thumbnail_selection + self.download_segments
                + self.generate_gifs)


@dataclass(frozen=True)
class RunReport:
    config: PipelineConfig
    timings: StageTimings
    manifest: SelectionManifest
    gif_paths: tuple[Path, ...]
    manifest_path: Path


class _Clock:
    """Accrues wall time per stage; every instant lands in exactly one bucket."""

    def __init__(self) -> None:
        self.times = {name: 0.0 for name in STAGES}

    @contextmanager
    def stage(self, name: str):
        t0 = time.perf_counter()
        try:
            yield
        except LtcgifError as exc:
            raise PipelineError(name, exc) from exc
        finally:
            self.times[name] += time.perf_counter() - t0

    def add(self, name: str, seconds: float) -> None:
        self.times[name] += seconds


def run(config: PipelineConfig, backend: ScorerBackend, out_dir: str | Path,
        client: HlsClient | None = None,
        transcoder: Transcoder | None = None) -> RunReport:
    """Execute one artistic-media generation job and report it."""
    config.query.validate_against(backend.labels)
    client = client or HlsClient(config.base_url)
    transcoder = transcoder or default_transcoder()
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)

    clock = _Clock()
    bytes_before = client.bytes_downloaded
    t_start = time.perf_counter()

    if config.mode == "ltc":
        scored, meta, playlist, segment_files = _detect_ltc(
            config, backend, client, clock)
    else:
        scored, meta, playlist, segment_files = _detect_fb(
            config, backend, client, clock, out_dir)

    with clock.stage("thumbnail_selection"):
        manifest = select(scored, config.query, meta, video_id=config.video_id)
        manifest_path = out_dir / f"{config.video_id}.manifest.txt"
        manifest_path.write_bytes(write_manifest(manifest))
        segments = top_segments(manifest, config.max_gifs)

    with clock.stage("download_segments"):
        for seg in segments:
            if seg in segment_files:
                continue  # fb mode downloaded everything up front
            body = client.fetch_segment(playlist, seg)
            path = out_dir / "segments" / f"{seg}.ts"
            path.parent.mkdir(exist_ok=True)
            path.write_bytes(body)
            segment_files[seg] = path

    gif_paths = []
    with clock.stage("generate_gifs"):
        for seg in segments:
            frames = list(transcoder.read_frames(segment_files[seg]))
            src_fps = len(frames) / playlist.segments[seg].duration
            sampled = sample_frames(frames, src_fps, config.gif_spec)
            sampled = scale_frames(sampled, config.gif_spec.scale_width)
            event = best_event_for_segment(manifest, seg)
            gif_path = out_dir / f"{config.video_id}_{seg}_{event}.gif"
            gif_path.write_bytes(encode_gif(sampled, config.gif_spec))
            gif_paths.append(gif_path)

    total = time.perf_counter() - t_start
    timings = StageTimings(
        **{name: clock.times[name] for name in STAGES},
        total=total,
        inference_count=len(scored),  # exactly one score() call per entry
        bytes_downloaded=client.bytes_downloaded - bytes_before,
    )
    return RunReport(config, timings, manifest, tuple(gif_paths), manifest_path)


def _detect_ltc(config: PipelineConfig, backend: ScorerBackend,
                client: HlsClient, clock: _Clock):
    """Stages 1-3 for sprite-sheet mode."""
    with clock.stage("download_ltc"):
        playlist = client.fetch_playlist(config.video_id)
        sheets = list(client.iter_containers(playlist.storyboard, config.prefetch))

    geometry = playlist.storyboard.geometry
    tiles_per = geometry.tiles_per_container
    with clock.stage("extract_thumbnails"):
        tiles: list[tuple[ThumbnailRef, np.ndarray]] = []
        for sheet in sheets:
            for k, tile in extract_tiles(sheet):
                ref = locate(sheet.container_index * tiles_per + k, geometry)
                tiles.append((ref, tile))

    with clock.stage("events"):
        scored = []
        for ref, tile in tiles:
            image = preprocess(tile, backend.preprocess_spec)
            scored.append((ref, backend.score(image, index=ref.global_index)))

    duration = sum(s.duration for s in playlist.segments)
    # fps is irrelevant to sheet-mode selection; any positive value works
    meta = VideoMeta(duration=duration, fps=1.0,
                     segment_duration=playlist.segment_duration)
    return scored, meta, playlist, {}


def _detect_fb(config: PipelineConfig, backend: ScorerBackend,
               client: HlsClient, clock: _Clock, out_dir: Path):
    """Stages 1-3 for the frame-based baseline.

    Column 1 books the full-video download, column 2 the frame decode; decode
    and inference interleave per frame, so their wall times accrue separately.
    """
    transcoder = default_transcoder()
    with clock.stage("download_ltc"):
        playlist = client.fetch_playlist(config.video_id)
        segment_files: dict[int, Path] = {}
        seg_dir = out_dir / "segments"
        seg_dir.mkdir(parents=True, exist_ok=True)
        for segment in playlist.segments:
            body = client.fetch_segment(playlist, segment.index)
            path = seg_dir / f"{segment.index}.ts"
            path.write_bytes(body)
            segment_files[segment.index] = path

    duration = sum(s.duration for s in playlist.segments)
    probe = transcoder.probe(segment_files[0])
    fps = probe.fps
    meta = VideoMeta(duration=duration, fps=fps,
                     segment_duration=playlist.segment_duration)

    tiles_per = playlist.storyboard.geometry.tiles_per_container
    stride = config.fb_stride
    scored = []
    gidx = 0
    group_first: np.ndarray | None = None
    group_first_idx = 0
    for segment in playlist.segments:
        t0 = time.perf_counter()
        for frame in transcoder.read_frames(segment_files[segment.index]):
            clock.add("extract_thumbnails", time.perf_counter() - t0)
            pos = gidx % stride
            if pos == 0:
                group_first = frame
                group_first_idx = gidx
            if pos == stride - 1 and group_first is not None:
                t1 = time.perf_counter()
                timestamp = group_first_idx / fps
                image = preprocess(group_first, backend.preprocess_spec)
                sv = backend.score(image, index=int(timestamp))
                ref = ThumbnailRef(
                    global_index=group_first_idx,
                    container_index=group_first_idx // tiles_per,
                    tile_index=group_first_idx % tiles_per,
                    timestamp=timestamp,
                )
                scored.append((ref, sv))
                clock.add("events", time.perf_counter() - t1)
            gidx += 1
            t0 = time.perf_counter()
    return scored, meta, playlist, segment_files


@dataclass(frozen=True)
class BenchComparison:
    ltc: RunReport
    fb: RunReport

    @property
    def inference_ratio(self) -> float:
        return self.fb.timings.inference_count / self.ltc.timings.inference_count

    @property
    def wallclock_ratio(self) -> float:
        return self.fb.timings.total / self.ltc.timings.total


def bench_compare(config_ltc: PipelineConfig, config_fb: PipelineConfig,
                  backend_factory, out_dir: str | Path,
                  csv_path: str | Path | None = None) -> BenchComparison:
    """Run both modes against the same prepped video and compare."""
    if config_ltc.video_id != config_fb.video_id or config_ltc.base_url != config_fb.base_url:
        raise ValueError("bench requires both configs to target the same video")
    if config_ltc.mode != "ltc" or config_fb.mode != "fb":
        raise ValueError("configs must be one ltc and one fb run")
    out_dir = Path(out_dir)
    ltc_report = run(config_ltc, backend_factory(), out_dir / "ltc")
    fb_report = run(config_fb, backend_factory(), out_dir / "fb")
    comparison = BenchComparison(ltc_report, fb_report)
    if csv_path is not None:
        write_csv([ltc_report, fb_report], csv_path)
    return comparison


def _csv_row(report: RunReport) -> list:
    t = report.timings
    return [
        report.config.video_id,
        report.config.mode,
        f"{t.download_ltc:.4f}",
        f"{t.extract_thumbnails:.4f}",
        f"{t.events:.4f}",
        f"{t.thumbnail_selection:.4f}",
        f"{t.download_segments:.4f}",
        f"{t.generate_gifs:.4f}",
        f"{t.total:.4f}",
        t.inference_count,
        t.bytes_downloaded,
        len(report.gif_paths),
    ]


def write_csv(reports: list[RunReport], path: str | Path) -> None:
    buf = io.StringIO()
    writer = csv.writer(buf)
    writer.writerow(CSV_COLUMNS.split(","))
    for report in reports:
        writer.writerow(_csv_row(report))
    Path(path).write_text(buf.getvalue())
