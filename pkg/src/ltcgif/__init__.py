"""Client-driven artistic media generation from thumbnail containers.

Analyze sprite-sheet thumbnail containers instead of full video to find
user-selected events, fetch only the matching HLS segments, and emit artistic
thumbnails plus 3-second animated GIFs, with a benchmark harness comparing
against frame-based detection.
"""

from .errors import (
    FormatError,
    InferenceError,
    LtcgifError,
    NotFoundError,
    ParseError,
    PrepError,
    TransportError,
    TruncationError,
)
from .gif import GifSpec, encode_gif, quantize, sample_frames
from .hls import HlsClient, Playlist, SegmentRef, StoryboardRef
from .ltc_model import (
    ContainerGeometry,
    ThumbnailRef,
    VideoMeta,
    container_count,
    locate,
    segment_for,
    thumbnail_count,
)
from .origin import FaultPlan, OriginServer, serve
from .pipeline import (
    BenchComparison,
    PipelineConfig,
    RunReport,
    StageTimings,
    bench_compare,
    run,
)
from .prep import palette_color, prep, synthesize_test_video
from .scoring import (
    EventQuery,
    LabelSet,
    MockBackend,
    PreprocessSpec,
    ScoreVector,
    ScorerBackend,
    TfliteBackend,
    matches,
    preprocess,
)
from .selection import (
    SelectionEntry,
    SelectionManifest,
    dedupe_segments,
    read_manifest,
    select,
    write_manifest,
)
from .sprite import RasterImage, SpriteSheet, compose_sheet, extract_tiles

__version__ = "0.1.0"
