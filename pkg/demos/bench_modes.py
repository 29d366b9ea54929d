#!/usr/bin/env python3
"""Walkthrough: sprite-sheet detection vs the frame-based baseline.

Both modes look for the same events on the same video with the same injected
per-inference cost; the sheet route runs one inference per second of media,
the frame route one per frame, so the count ratio equals the frame rate.

    python3 demos/bench_modes.py
"""

import tempfile
from pathlib import Path

from ltcgif import EventQuery, GifSpec, MockBackend, OriginServer, PipelineConfig
from ltcgif.pipeline import bench_compare
from ltcgif.prep import prep, synthesize_test_video
from ltcgif.scoring import DEFAULT_LABELS


def main() -> None:
    workdir = Path(tempfile.mkdtemp(prefix="ltcgif-bench-"))
    source = synthesize_test_video(60, 30, workdir / "source.avi", size=(320, 240))
    root = workdir / "origin"
    prep(source, root / "match", segment_duration=10.0)

    def backend() -> MockBackend:
        return MockBackend(DEFAULT_LABELS, {}, cost_s=0.005)  # 5 ms per inference

    query = EventQuery(("soccer_penalty",), 0.80)
    gif_spec = GifSpec(duration=3.0, output_fps=5, scale_width=160)
    with OriginServer(root) as server:
        comparison = bench_compare(
            PipelineConfig(server.base_url, "match", query, mode="ltc", gif_spec=gif_spec),
            PipelineConfig(server.base_url, "match", query, mode="fb", gif_spec=gif_spec),
            backend, workdir / "bench", csv_path=workdir / "bench.csv",
        )

    ltc, fb = comparison.ltc.timings, comparison.fb.timings
    print(f"sheet mode:  {ltc.inference_count:>5} inferences, "
          f"{ltc.total:6.2f}s, {ltc.bytes_downloaded:>9} bytes")
    print(f"frame mode:  {fb.inference_count:>5} inferences, "
          f"{fb.total:6.2f}s, {fb.bytes_downloaded:>9} bytes")
    print(f"\ninference ratio: {comparison.inference_ratio:.1f} "
          f"(equals the 30 fps frame rate)")
    print(f"wall-clock ratio: {comparison.wallclock_ratio:.1f}")
    print(f"rows: {workdir / 'bench.csv'}")


if __name__ == "__main__":
    main()
