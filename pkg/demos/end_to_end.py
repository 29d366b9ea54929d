#!/usr/bin/env python3
"""Walkthrough: synthesize a video, prep it, serve it, generate media.

Everything runs hermetically in a temp directory with the deterministic mock
scorer, so this works on any machine with the package installed:

    python3 demos/end_to_end.py
"""

import tempfile
from pathlib import Path

from ltcgif import (
    EventQuery,
    GifSpec,
    MockBackend,
    OriginServer,
    PipelineConfig,
    prep,
    run,
    synthesize_test_video,
)
from ltcgif.scoring import DEFAULT_LABELS


def main() -> None:
    workdir = Path(tempfile.mkdtemp(prefix="ltcgif-demo-"))
    print(f"working in {workdir}\n")

    # 1. A 60 s / 30 fps source whose every frame encodes its second index.
    source = synthesize_test_video(60, 30, workdir / "source.avi", size=(320, 240))
    print(f"synthesized {source}")

    # 2. Prep: 10 s segments, 1 Hz thumbnails packed 25 per sprite sheet.
    root = workdir / "origin"
    meta = prep(source, root / "match", segment_duration=10.0)
    print(f"prepped: {meta.segment_count} segments, "
          f"{int(meta.duration)} thumbnails in 3 sheets")

    # 3. Serve the layout and run the pipeline against it. The mock backend
    #    stands in for the classifier: seconds 35 and 36 look like a penalty.
    schedule = {35: {"soccer_penalty": 0.93}, 36: {"soccer_penalty": 0.88}}
    backend = MockBackend(DEFAULT_LABELS, schedule)
    with OriginServer(root) as server:
        config = PipelineConfig(
            base_url=server.base_url,
            video_id="match",
            query=EventQuery(("soccer_penalty",), threshold=0.80),
            gif_spec=GifSpec(duration=3.0, output_fps=10, scale_width=240),
        )
        report = run(config, backend, workdir / "out")

    t = report.timings
    print(f"\nmatched {len(report.manifest)} thumbnails, "
          f"emitted {len(report.gif_paths)} GIF(s) in {t.total:.2f}s")
    print(f"  stage times: download {t.download_ltc:.3f}s | extract "
          f"{t.extract_thumbnails:.3f}s | events {t.events:.3f}s | select "
          f"{t.thumbnail_selection:.3f}s | segments {t.download_segments:.3f}s | "
          f"gifs {t.generate_gifs:.3f}s")
    print(f"  downloaded {t.bytes_downloaded} bytes "
          f"(vs ~{sum(p.stat().st_size for p in (root / 'match' / 'seg').iterdir())} "
          f"bytes of full media)")
    print(f"  manifest: {report.manifest_path}")
    for path in report.gif_paths:
        print(f"  gif: {path}")


if __name__ == "__main__":
    main()
