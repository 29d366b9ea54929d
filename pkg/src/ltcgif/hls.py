"""HTTP client for playlists, sprite sheets, and media segments.

URL scheme (shared with the origin):

    GET {base}/video/{id}/playlist.m3u8
    GET {base}/video/{id}/storyboard.json
    GET {base}/video/{id}/ltc/{n}.jpg
    GET {base}/video/{id}/seg/{n}.ts

The playlist parser accepts a strict extended-M3U subset (EXTM3U,
EXT-X-TARGETDURATION, EXTINF); storyboard discovery uses the companion JSON
rather than nonstandard playlist tags.
"""

from __future__ import annotations

import json
import threading
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Iterator
from urllib.parse import urljoin

import requests

from .errors import NotFoundError, ParseError, TransportError
from .ltc_model import ContainerGeometry, container_count, valid_tiles_in
from .sprite import SpriteSheet, decode_jpeg

__all__ = ["SegmentRef", "StoryboardRef", "Playlist", "HlsClient"]


@dataclass(frozen=True)
class SegmentRef:
    index: int
    uri: str
    duration: float

    def __post_init__(self) -> None:
        if not self.uri:
            raise ValueError("segment uri must be non-empty")


@dataclass(frozen=True)
class StoryboardRef:
    uri_template: str  # absolute URL with an {index} placeholder
    geometry: ContainerGeometry
    thumbnail_count: int

    def __post_init__(self) -> None:
        if self.thumbnail_count < 0:
            raise ValueError("thumbnail_count must be >= 0")

    @property
    def container_count(self) -> int:
        return container_count(self.thumbnail_count, self.geometry)


@dataclass(frozen=True)
class Playlist:
    video_id: str
    segment_duration: float
    segments: tuple[SegmentRef, ...]
    storyboard: StoryboardRef


@dataclass
class HlsClient:
    """Shareable client with retry/backoff and bandwidth accounting."""

    base_url: str
    retries: int = 3
    backoff_s: float = 0.1
    session: requests.Session = field(default_factory=requests.Session)

    def __post_init__(self) -> None:
        self.base_url = self.base_url.rstrip("/")
        self._lock = threading.Lock()
        self.bytes_downloaded = 0
        self.request_count = 0
        self.retry_count = 0

    # ---- transport ----------------------------------------------------

    def _get(self, url: str) -> bytes:
        last_error: Exception | None = None
        for attempt in range(self.retries):
            if attempt:
                time.sleep(self.backoff_s * (2 ** (attempt - 1)))
                with self._lock:
                    self.retry_count += 1
            try:
                resp = self.session.get(url, timeout=30)
            except requests.RequestException as exc:
                last_error = exc
                continue
            if resp.status_code == 404:
                raise NotFoundError(f"404 for {url}")
            if resp.status_code >= 500:
                last_error = TransportError(f"{resp.status_code} for {url}")
                continue
            if resp.status_code != 200:
                raise TransportError(f"unexpected status {resp.status_code} for {url}")
            body = resp.content
            with self._lock:
                self.bytes_downloaded += len(body)
                self.request_count += 1
            return body
        raise TransportError(f"giving up on {url} after {self.retries} attempts: {last_error}")

    def _video_url(self, video_id: str, resource: str) -> str:
        return f"{self.base_url}/video/{video_id}/{resource}"

    # ---- resources -----------------------------------------------------

    def fetch_playlist(self, video_id: str) -> Playlist:
        base = self._video_url(video_id, "")
        text = self._get(urljoin(base, "playlist.m3u8")).decode("utf-8")
        target_duration, segments = _parse_media_playlist(text, base)
        sb = json.loads(self._get(urljoin(base, "storyboard.json")))
        try:
            storyboard = StoryboardRef(
                uri_template=urljoin(base, sb["uri_template"]),
                geometry=ContainerGeometry(
                    grid_cols=sb["grid_cols"],
                    grid_rows=sb["grid_rows"],
                    tile_width=sb["tile_w"],
                    tile_height=sb["tile_h"],
                    thumbnail_interval=sb["interval_s"],
                ),
                thumbnail_count=sb["thumbnail_count"],
            )
        except KeyError as exc:
            raise ParseError(f"storyboard.json missing field {exc}")
        return Playlist(
            video_id=video_id,
            segment_duration=target_duration,
            segments=segments,
            storyboard=storyboard,
        )

    def fetch_container(self, storyboard: StoryboardRef, container_index: int) -> SpriteSheet:
        total = storyboard.container_count
        if not 0 <= container_index < total:
            raise ValueError(f"container_index {container_index} outside 0..{total - 1}")
        data = self._get(storyboard.uri_template.format(index=container_index))
        image = decode_jpeg(data)
        return SpriteSheet(
            image=image,
            geometry=storyboard.geometry,
            container_index=container_index,
            valid_tiles=valid_tiles_in(container_index, storyboard.thumbnail_count,
                                       storyboard.geometry),
        )

    def iter_containers(self, storyboard: StoryboardRef,
                        prefetch: int = 4) -> Iterator[SpriteSheet]:
        """All containers in index order; up to ``prefetch`` fetched ahead."""
        total = storyboard.container_count
        if total == 0:
            return
        if prefetch <= 1:
            for i in range(total):
                yield self.fetch_container(storyboard, i)
            return
        with ThreadPoolExecutor(max_workers=prefetch) as pool:
            pending = {}
            submitted = 0
            for i in range(min(prefetch, total)):
                pending[i] = pool.submit(self.fetch_container, storyboard, i)
                submitted += 1
            for i in range(total):
                yield pending.pop(i).result()
                if submitted < total:
                    pending[submitted] = pool.submit(self.fetch_container, storyboard, submitted)
                    submitted += 1

    def fetch_segment(self, playlist: Playlist, segment_index: int) -> bytes:
        if not 0 <= segment_index < len(playlist.segments):
            raise ValueError(
                f"segment_index {segment_index} outside 0..{len(playlist.segments) - 1}"
            )
        body = self._get(playlist.segments[segment_index].uri)
        if not body:
            raise TransportError(f"empty body for segment {segment_index}")
        return body


def _parse_media_playlist(text: str, base: str) -> tuple[float, tuple[SegmentRef, ...]]:
    lines = [line.strip() for line in text.splitlines()]
    if not lines or lines[0] != "#EXTM3U":
        raise ParseError("playlist must start with #EXTM3U", line=1)
    target: float | None = None
    segments: list[SegmentRef] = []
    pending_duration: float | None = None
    for lineno, line in enumerate(lines[1:], start=2):
        if not line:
            continue
        if line.startswith("#EXT-X-TARGETDURATION:"):
            try:
                target = float(line.split(":", 1)[1])
            except ValueError as exc:
                raise ParseError(f"bad EXT-X-TARGETDURATION: {exc}", line=lineno)
        elif line.startswith("#EXTINF:"):
            try:
                pending_duration = float(line.split(":", 1)[1].split(",")[0])
            except ValueError as exc:
                raise ParseError(f"bad EXTINF: {exc}", line=lineno)
            if pending_duration <= 0:
                raise ParseError("EXTINF duration must be positive", line=lineno)
        elif line.startswith("#"):
            continue  # other tags tolerated
        else:
            if pending_duration is None:
                raise ParseError(f"segment URI {line!r} without preceding EXTINF", line=lineno)
            segments.append(SegmentRef(
                index=len(segments), uri=urljoin(base, line), duration=pending_duration,
            ))
            pending_duration = None
    if target is None:
        raise ParseError("missing EXT-X-TARGETDURATION tag")
    return target, tuple(segments)
