"""Command-line interface: prep, synth, serve, generate, bench, manifest.

Exit codes: 0 success, 1 operational error, 2 usage error. The CLI only
parses and wires; every behavior is reachable through the library API.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
import time
from pathlib import Path

from .errors import LtcgifError
from .gif import GifSpec
from .ltc_model import ContainerGeometry
from .origin import FaultPlan, serve
from .pipeline import PipelineConfig, bench_compare, run, write_csv
from .prep import prep, synthesize_test_video
from .scoring import (
    EventQuery,
    MockBackend,
    load_labels,
    load_mock_schedule,
)
from .selection import dedupe_segments, read_manifest

log = logging.getLogger("ltcgif")


def _parse_pair(text: str, sep: str, what: str) -> tuple[int, int]:
    try:
        a, b = text.lower().split(sep)
        return int(a), int(b)
    except ValueError:
        raise argparse.ArgumentTypeError(f"{what} must look like 160{sep}90")


def _geometry_args(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--tile", default="160x90", help="tile WxH (default 160x90)")
    parser.add_argument("--grid", default="5x5", help="sheet grid CxR (default 5x5)")
    parser.add_argument("--interval", type=float, default=1.0,
                        help="seconds per thumbnail (default 1.0)")


def _geometry_from(args) -> ContainerGeometry:
    tw, th = _parse_pair(args.tile, "x", "--tile")
    gc, gr = _parse_pair(args.grid, "x", "--grid")
    return ContainerGeometry(grid_cols=gc, grid_rows=gr, tile_width=tw,
                             tile_height=th, thumbnail_interval=args.interval)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ltcgif",
        description="Generate event-conditioned thumbnails and animated GIFs "
                    "from sprite-sheet containers and HLS segments.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("prep", help="segment a video and build its sprite sheets")
    p.add_argument("--input", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--segment-duration", type=float, default=10.0)
    _geometry_args(p)

    p = sub.add_parser("synth", help="synthesize a palette test video")
    p.add_argument("--duration", type=int, required=True, help="seconds")
    p.add_argument("--fps", type=int, default=30)
    p.add_argument("--size", default="320x240")
    p.add_argument("--out", required=True)

    p = sub.add_parser("serve", help="serve a prep root over HTTP")
    p.add_argument("--root", required=True)
    p.add_argument("--port", type=int, default=8080)
    p.add_argument("--fault-plan", help="JSON file: path pattern -> status list")
    p.add_argument("--log-jsonl", help="dump the request log here on shutdown")

    p = sub.add_parser("generate", help="run the artistic-media pipeline once")
    p.add_argument("--base-url", required=True)
    p.add_argument("--video", required=True)
    p.add_argument("--events", required=True, help="comma-separated event labels")
    p.add_argument("--threshold", type=float, default=0.80)
    p.add_argument("--mode", choices=("ltc", "fb"), default="ltc")
    p.add_argument("--fb-stride", type=int, default=1)
    p.add_argument("--model", help="tflite model file (with --labels)")
    p.add_argument("--mock", help="mock schedule file (hermetic backend)")
    p.add_argument("--labels", help="label file, one name per line")
    p.add_argument("--mock-cost", type=float, default=0.0,
                   help="injected seconds per mock inference")
    p.add_argument("--max-gifs", type=int)
    p.add_argument("--gif-fps", type=int, default=10)
    p.add_argument("--gif-duration", type=float, default=3.0)
    p.add_argument("--gif-width", type=int, default=480)
    p.add_argument("--out", default="out")
    p.add_argument("--csv", help="append the run row to this CSV")

    p = sub.add_parser("bench", help="compare ltc vs frame-based detection")
    p.add_argument("--base-url", required=True)
    p.add_argument("--video", required=True)
    p.add_argument("--events", required=True)
    p.add_argument("--threshold", type=float, default=0.80)
    p.add_argument("--mock", help="mock schedule file")
    p.add_argument("--labels", help="label file")
    p.add_argument("--cost-per-inference", type=float, default=0.005)
    p.add_argument("--fb-stride", type=int, default=1)
    p.add_argument("--out", default="bench-out")
    p.add_argument("--csv", default="bench.csv")

    p = sub.add_parser("manifest", help="inspect a selection manifest")
    msub = p.add_subparsers(dest="manifest_command", required=True)
    ps = msub.add_parser("show")
    ps.add_argument("file")

    return parser


def _load_backend(args) -> MockBackend:
    from .scoring import DEFAULT_LABELS, TfliteBackend

    labels = load_labels(args.labels) if args.labels else DEFAULT_LABELS
    if getattr(args, "model", None):
        if not args.labels:
            raise LtcgifError("--model requires --labels")
        return TfliteBackend(args.model, args.labels)
    schedule = load_mock_schedule(args.mock) if args.mock else {}
    cost = getattr(args, "mock_cost", None)
    if cost is None:
        cost = getattr(args, "cost_per_inference", 0.0)
    return MockBackend(labels, schedule, cost_s=cost)


def _query_from(args, backend) -> EventQuery:
    events = tuple(e.strip() for e in args.events.split(",") if e.strip())
    query = EventQuery(events, args.threshold)
    try:
        query.validate_against(backend.labels)
    except KeyError as exc:
        label_file = args.labels or "<builtin event labels>"
        raise LtcgifError(f"{exc.args[0]} (labels come from {label_file})")
    return query


def _cmd_prep(args) -> int:
    meta = prep(args.input, args.out, segment_duration=args.segment_duration,
                geometry=_geometry_from(args))
    print(f"prepped {args.input}: {meta.duration:.1f}s, "
          f"{meta.segment_count} segments -> {args.out}")
    return 0


def _cmd_synth(args) -> int:
    w, h = _parse_pair(args.size, "x", "--size")
    path = synthesize_test_video(args.duration, args.fps, args.out, size=(w, h))
    print(f"wrote {path}")
    return 0


def _cmd_serve(args) -> int:
    plan = FaultPlan.from_file(args.fault_plan) if args.fault_plan else None
    server = serve(args.root, port=args.port, fault_plan=plan)
    print(f"serving {args.root} at {server.base_url} (ctrl-c to stop)", flush=True)
    try:
        while True:
            time.sleep(3600)
    except KeyboardInterrupt:
        pass
    finally:
        if args.log_jsonl:
            server.dump_log_jsonl(args.log_jsonl)
            print(f"request log -> {args.log_jsonl}")
        server.close()
    return 0


def _cmd_generate(args) -> int:
    backend = _load_backend(args)
    query = _query_from(args, backend)
    config = PipelineConfig(
        base_url=args.base_url,
        video_id=args.video,
        query=query,
        mode=args.mode,
        fb_stride=args.fb_stride,
        max_gifs=args.max_gifs,
        gif_spec=GifSpec(duration=args.gif_duration, output_fps=args.gif_fps,
                         scale_width=args.gif_width),
    )
    report = run(config, backend, args.out)
    t = report.timings
    print(f"{len(report.manifest)} thumbnails matched; "
          f"{len(report.gif_paths)} GIFs in {t.total:.2f}s "
          f"({t.inference_count} inferences, {t.bytes_downloaded} bytes)")
    for path in report.gif_paths:
        print(f"  {path}")
    print(f"  manifest: {report.manifest_path}")
    if args.csv:
        write_csv([report], args.csv)
        print(f"  report: {args.csv}")
    return 0


def _cmd_bench(args) -> int:
    backend = _load_backend(args)
    query = _query_from(args, backend)
    schedule = load_mock_schedule(args.mock) if args.mock else {}

    def factory():
        from .scoring import DEFAULT_LABELS

        labels = load_labels(args.labels) if args.labels else DEFAULT_LABELS
        return MockBackend(labels, schedule, cost_s=args.cost_per_inference)

    common = dict(base_url=args.base_url, video_id=args.video, query=query)
    comparison = bench_compare(
        PipelineConfig(mode="ltc", **common),
        PipelineConfig(mode="fb", fb_stride=args.fb_stride, **common),
        factory, args.out, csv_path=args.csv,
    )
    print(f"inference ratio: {comparison.inference_ratio:.2f} "
          f"({comparison.fb.timings.inference_count} fb / "
          f"{comparison.ltc.timings.inference_count} ltc)")
    print(f"wall-clock ratio: {comparison.wallclock_ratio:.2f} "
          f"({comparison.fb.timings.total:.2f}s fb / {comparison.ltc.timings.total:.2f}s ltc)")
    print(f"rows -> {args.csv}")
    return 0


def _cmd_manifest(args) -> int:
    manifest = read_manifest(Path(args.file).read_bytes())
    print(f"video: {manifest.video_id}")
    print(f"events: {', '.join(manifest.query.events)} (threshold {manifest.query.threshold})")
    print(f"entries: {len(manifest)}; segments: {len(dedupe_segments(manifest))}")
    for e in manifest.entries:
        print(f"  t={e.thumbnail.timestamp:>8.1f}s  {e.event:<24} "
              f"{e.score:.4f}  segment {e.segment_index}")
    return 0


_COMMANDS = {
    "prep": _cmd_prep,
    "synth": _cmd_synth,
    "serve": _cmd_serve,
    "generate": _cmd_generate,
    "bench": _cmd_bench,
    "manifest": _cmd_manifest,
}


def main(argv: list[str] | None = None) -> int:
    logging.basicConfig(level=os.environ.get("LTCGIF_LOG", "WARNING").upper())
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except LtcgifError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (ValueError, KeyError, OSError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


def entrypoint() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entrypoint()
