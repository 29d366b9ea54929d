"""Video transcoding behind a small interface.

Two interchangeable backends:

* ``FfmpegTranscoder`` shells out to ffmpeg/ffprobe with pinned command lines
  (raw RGB pipes, documented below per invocation).
* ``OpenCvTranscoder`` uses cv2's bundled codecs and needs no external binary.

``default_transcoder()`` picks ffmpeg when it is on PATH, else OpenCV. Frames
cross the interface as RGB uint8 arrays of shape (h, w, 3).
"""

from __future__ import annotations

import contextlib
import json
import os
import shutil
import subprocess
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Iterator

import numpy as np

from .errors import PrepError
from .sprite import RasterImage

__all__ = [
    "MediaInfo",
    "Transcoder",
    "OpenCvTranscoder",
    "FfmpegTranscoder",
    "default_transcoder",
]


@dataclass(frozen=True)
class MediaInfo:
    width: int
    height: int
    fps: float
    frame_count: int

    @property
    def duration(self) -> float:
        return self.frame_count / self.fps


class Transcoder:
    name = "abstract"

    def probe(self, path: str | Path) -> MediaInfo:
        raise NotImplementedError

    def read_frames(self, path: str | Path) -> Iterator[RasterImage]:
        raise NotImplementedError

    def write_video(self, path: str | Path, frames: Iterable[RasterImage],
                    fps: float, size: tuple[int, int]) -> int:
        """Write RGB frames; returns the number of frames written."""
        raise NotImplementedError


@contextlib.contextmanager
def _silence_native_stderr():
    """Mute codec-layer chatter written straight to fd 2."""
    try:
        saved = os.dup(2)
    except OSError:
        yield
        return
    try:
        with open(os.devnull, "wb") as devnull:
            os.dup2(devnull.fileno(), 2)
            yield
    finally:
        os.dup2(saved, 2)
        os.close(saved)


class OpenCvTranscoder(Transcoder):
    """cv2-backed transcoder; containers chosen by file extension."""

    name = "opencv"

    # mpeg4-in-TS: arbitrary frame rates (mpeg1/2 allow only a fixed set)
    _FOURCC = {".ts": "mp4v", ".avi": "MJPG", ".mp4": "mp4v", ".mkv": "mp4v"}

    def _import(self):
        import cv2
        return cv2

    def probe(self, path: str | Path) -> MediaInfo:
        cv2 = self._import()
        path = str(path)
        if not os.path.exists(path):
            raise PrepError(f"no such media file: {path}")
        with _silence_native_stderr():
            cap = cv2.VideoCapture(path)
        if not cap.isOpened():
            raise PrepError(f"cannot open media file: {path}")
        try:
            width = int(cap.get(cv2.CAP_PROP_FRAME_WIDTH))
            height = int(cap.get(cv2.CAP_PROP_FRAME_HEIGHT))
            fps = float(cap.get(cv2.CAP_PROP_FPS))
            count = int(cap.get(cv2.CAP_PROP_FRAME_COUNT))
        finally:
            cap.release()
        if fps <= 0 or width <= 0 or height <= 0:
            raise PrepError(f"undecodable stream properties in {path}")
        if count <= 0 or path.endswith(".ts"):
            # transport streams may report estimated counts; count exactly
            count = sum(1 for _ in self.read_frames(path))
        return MediaInfo(width, height, fps, count)

    def read_frames(self, path: str | Path) -> Iterator[RasterImage]:
        cv2 = self._import()
        with _silence_native_stderr():
            cap = cv2.VideoCapture(str(path))
        if not cap.isOpened():
            raise PrepError(f"cannot open media file: {path}")
        try:
            while True:
                ok, frame = cap.read()
                if not ok:
                    break
                yield np.ascontiguousarray(frame[:, :, ::-1])
        finally:
            cap.release()

    def write_video(self, path: str | Path, frames: Iterable[RasterImage],
                    fps: float, size: tuple[int, int]) -> int:
        cv2 = self._import()
        path = Path(path)
        fourcc = self._FOURCC.get(path.suffix.lower(), "MJPG")
        with _silence_native_stderr():
            writer = cv2.VideoWriter(
                str(path), cv2.VideoWriter_fourcc(*fourcc), fps, size
            )
        if not writer.isOpened():
            raise PrepError(f"cannot open video writer for {path}")
        written = 0
        try:
            for frame in frames:
                if frame.shape[1] != size[0] or frame.shape[0] != size[1]:
                    raise PrepError(
                        f"frame {written} is {frame.shape[1]}x{frame.shape[0]}, "
                        f"writer expects {size[0]}x{size[1]}"
                    )
                writer.write(np.ascontiguousarray(frame[:, :, ::-1]))
                written += 1
        finally:
            writer.release()
        if written == 0:
            path.unlink(missing_ok=True)
            raise PrepError("no frames written")
        return written


class FfmpegTranscoder(Transcoder):
    """ffmpeg/ffprobe subprocess backend with pinned command lines."""

    name = "ffmpeg"

    def __init__(self, ffmpeg: str = "ffmpeg", ffprobe: str = "ffprobe"):
        self.ffmpeg = ffmpeg
        self.ffprobe = ffprobe

    @staticmethod
    def available() -> bool:
        return shutil.which("ffmpeg") is not None and shutil.which("ffprobe") is not None

    def _run(self, cmd: list[str], **kwargs) -> subprocess.CompletedProcess:
        proc = subprocess.run(cmd, capture_output=True, **kwargs)
        if proc.returncode != 0:
            raise PrepError(
                f"{cmd[0]} failed ({proc.returncode}): {proc.stderr.decode(errors='replace')[-600:]}"
            )
        return proc

    def probe(self, path: str | Path) -> MediaInfo:
        # ffprobe -v error -select_streams v:0 -count_frames \
        #   -show_entries stream=width,height,r_frame_rate,nb_read_frames -of json INPUT
        proc = self._run([
            self.ffprobe, "-v", "error", "-select_streams", "v:0", "-count_frames",
            "-show_entries", "stream=width,height,r_frame_rate,nb_read_frames",
            "-of", "json", str(path),
        ])
        try:
            stream = json.loads(proc.stdout)["streams"][0]
            num, den = stream["r_frame_rate"].split("/")
            fps = float(num) / float(den)
            return MediaInfo(
                int(stream["width"]), int(stream["height"]),
                fps, int(stream["nb_read_frames"]),
            )
        except (KeyError, IndexError, ValueError) as exc:
            raise PrepError(f"unparseable ffprobe output for {path}: {exc}") from exc

    def read_frames(self, path: str | Path) -> Iterator[RasterImage]:
        info = self.probe(path)
        # ffmpeg -v error -i INPUT -f rawvideo -pix_fmt rgb24 -
        proc = subprocess.Popen(
            [self.ffmpeg, "-v", "error", "-nostdin", "-i", str(path),
             "-f", "rawvideo", "-pix_fmt", "rgb24", "-"],
            stdout=subprocess.PIPE, stderr=subprocess.PIPE,
        )
        frame_bytes = info.width * info.height * 3
        try:
            while True:
                buf = proc.stdout.read(frame_bytes)
                if len(buf) < frame_bytes:
                    break
                yield np.frombuffer(buf, np.uint8).reshape(info.height, info.width, 3)
        finally:
            proc.stdout.close()
            stderr = proc.stderr.read()
            proc.stderr.close()
            if proc.wait() != 0:
                raise PrepError(f"ffmpeg decode failed: {stderr.decode(errors='replace')[-600:]}")

    def write_video(self, path: str | Path, frames: Iterable[RasterImage],
                    fps: float, size: tuple[int, int]) -> int:
        # mpeg4 everywhere: mpeg1/2 reject non-broadcast frame rates
        codec = "mpeg4"
        # ffmpeg -v error -f rawvideo -pix_fmt rgb24 -s WxH -r FPS -i - \
        #   -c:v mpeg4 -q:v 2 OUTPUT
        proc = subprocess.Popen(
            [self.ffmpeg, "-v", "error", "-y", "-f", "rawvideo", "-pix_fmt", "rgb24",
             "-s", f"{size[0]}x{size[1]}", "-r", str(fps), "-i", "-",
             "-c:v", codec, "-q:v", "2", str(path)],
            stdin=subprocess.PIPE, stderr=subprocess.PIPE,
        )
        written = 0
        try:
            for frame in frames:
                proc.stdin.write(np.ascontiguousarray(frame).tobytes())
                written += 1
        finally:
            proc.stdin.close()
            stderr = proc.stderr.read()
            proc.stderr.close()
            if proc.wait() != 0:
                raise PrepError(f"ffmpeg encode failed: {stderr.decode(errors='replace')[-600:]}")
        if written == 0:
            raise PrepError("no frames written")
        return written


def default_transcoder() -> Transcoder:
    if FfmpegTranscoder.available():
        return FfmpegTranscoder()
    return OpenCvTranscoder()
