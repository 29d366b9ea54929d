"""Chronological selection manifests and their text wire format.

Format (UTF-8, line-oriented, stable across releases):

    #ltcgif-manifest v1 video=<id> threshold=<t> events=<a,b,...>
    <global_index>\t<timestamp_s>\t<event>\t<score>\t<segment_index>

Scores render with 4 decimal places; all indices are 0-based.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

from .errors import ParseError
from .ltc_model import (
    ContainerGeometry,
    DEFAULT_GEOMETRY,
    ThumbnailRef,
    VideoMeta,
    segment_for,
)
from .scoring import EventQuery, ScoreVector, matches

__all__ = [
    "SelectionEntry",
    "SelectionManifest",
    "select",
    "dedupe_segments",
    "write_manifest",
    "read_manifest",
]

_HEADER_PREFIX = "#ltcgif-manifest v1 "


@dataclass(frozen=True)
class SelectionEntry:
    thumbnail: ThumbnailRef
    event: str
    score: float
    segment_index: int


@dataclass(frozen=True)
class SelectionManifest:
    video_id: str
    query: EventQuery
    entries: tuple[SelectionEntry, ...]

    def __post_init__(self) -> None:
        if not self.video_id or any(c.isspace() for c in self.video_id):
            raise ValueError("video_id must be non-empty without whitespace")
        object.__setattr__(self, "entries", tuple(self.entries))
        indices = [e.thumbnail.global_index for e in self.entries]
        if any(b <= a for a, b in zip(indices, indices[1:])):
            raise ValueError("entries must be strictly ascending by global_index")

    def __len__(self) -> int:
        return len(self.entries)


def select(scored: Iterable[tuple[ThumbnailRef, ScoreVector]], query: EventQuery,
           meta: VideoMeta, video_id: str = "video") -> SelectionManifest:
    """Keep every thumbnail whose best queried event beats the threshold."""
    entries = []
    for ref, sv in sorted(scored, key=lambda pair: pair[0].global_index):
        hit = matches(sv, query)
        if hit is None:
            continue
        event, score = hit
        entries.append(SelectionEntry(
            thumbnail=ref,
            event=event,
            score=score,
            segment_index=segment_for(ref.timestamp, meta),
        ))
    return SelectionManifest(video_id, query, tuple(entries))


def dedupe_segments(manifest: SelectionManifest) -> list[int]:
    """Distinct segment indices of the manifest, ascending."""
    return sorted({e.segment_index for e in manifest.entries})


def write_manifest(manifest: SelectionManifest) -> bytes:
    for event in manifest.query.events:
        if "," in event or "\t" in event or "\n" in event:
            raise ValueError(f"event name {event!r} not representable")
    lines = [
        _HEADER_PREFIX
        + f"video={manifest.video_id} "
        + f"threshold={manifest.query.threshold!r} "
        + f"events={','.join(manifest.query.events)}"
    ]
    for e in manifest.entries:
        lines.append(
            f"{e.thumbnail.global_index}\t{e.thumbnail.timestamp!r}\t"
            f"{e.event}\t{e.score:.4f}\t{e.segment_index}"
        )
    return ("\n".join(lines) + "\n").encode("utf-8")


def read_manifest(data: bytes, geometry: ContainerGeometry = DEFAULT_GEOMETRY
                  ) -> SelectionManifest:
    """Parse manifest bytes; the geometry re-derives container/tile indices."""
    text = data.decode("utf-8")
    lines = text.splitlines()
    if not lines or not lines[0].startswith(_HEADER_PREFIX):
        raise ParseError("missing '#ltcgif-manifest v1' header", line=1)
    fields = {}
    for token in lines[0][len(_HEADER_PREFIX):].split():
        if "=" not in token:
            raise ParseError(f"bad header token {token!r}", line=1)
        key, value = token.split("=", 1)
        fields[key] = value
    try:
        query = EventQuery(
            events=tuple(fields["events"].split(",")),
            threshold=float(fields["threshold"]),
        )
        video_id = fields["video"]
    except (KeyError, ValueError) as exc:
        raise ParseError(f"bad header: {exc}", line=1) from exc

    tiles = geometry.tiles_per_container
    entries = []
    for lineno, raw in enumerate(lines[1:], start=2):
        if not raw.strip():
            continue
        parts = raw.split("\t")
        if len(parts) != 5:
            raise ParseError(f"expected 5 tab-separated fields, got {len(parts)}", line=lineno)
        try:
            gidx = int(parts[0])
            timestamp = float(parts[1])
            event = parts[2]
            score = float(parts[3])
            seg = int(parts[4])
        except ValueError as exc:
            raise ParseError(f"bad entry: {exc}", line=lineno) from exc
        entries.append(SelectionEntry(
            thumbnail=ThumbnailRef(
                global_index=gidx,
                container_index=gidx // tiles,
                tile_index=gidx % tiles,
                timestamp=timestamp,
            ),
            event=event,
            score=score,
            segment_index=seg,
        ))
    return SelectionManifest(video_id, query, tuple(entries))


def top_segments(manifest: SelectionManifest, max_gifs: int | None) -> list[int]:
    """Deduplicated segments, optionally capped to the N best-scoring ones.

    The cap keeps the segments whose best entry scores highest, then returns
    them in ascending segment order.
    """
    segments = dedupe_segments(manifest)
    if max_gifs is None or len(segments) <= max_gifs:
        return segments
    best: dict[int, float] = {}
    for e in manifest.entries:
        best[e.segment_index] = max(best.get(e.segment_index, 0.0), e.score)
    ranked = sorted(segments, key=lambda s: (-best[s], s))
    return sorted(ranked[:max_gifs])


def best_event_for_segment(manifest: SelectionManifest, segment_index: int) -> str:
    """Event of the highest-scoring entry inside one segment."""
    candidates = [e for e in manifest.entries if e.segment_index == segment_index]
    if not candidates:
        raise KeyError(f"segment {segment_index} has no entries")
    return max(candidates, key=lambda e: e.score).event
