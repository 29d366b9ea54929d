"""Encoder tests; Pillow's GIF reader is the independent decode oracle."""

import io

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from PIL import Image, ImageSequence

from ltcgif.errors import TruncationError
from ltcgif.gif import (
    GifSpec,
    encode_gif,
    lzw_encode,
    quantize,
    sample_frames,
    scale_frames,
)


def pil_decode(data):
    """(frames as RGB arrays, per-frame delays in hundredths, loop or None)."""
    img = Image.open(io.BytesIO(data))
    frames, delays = [], []
    for frame in ImageSequence.Iterator(img):
        delays.append(frame.info.get("duration", 0) // 10)
        frames.append(np.asarray(frame.convert("RGB")))
    return frames, delays, img.info.get("loop")


def solid(w, h, color):
    return np.full((h, w, 3), color, np.uint8)


class TestSampleFrames:
    def test_3s_at_10fps_from_10s_segment(self):
        src = [solid(4, 4, (i % 256, 0, 0)) for i in range(300)]  # 10 s @ 30 fps
        out = sample_frames(src, 30.0, GifSpec(duration=3.0, output_fps=10))
        assert len(out) == 30
        # t = 0.0, 0.1, ... 2.9 -> source indices 0, 3, 6, ... 87
        for k, frame in enumerate(out):
            assert frame[0, 0, 0] == (k * 3) % 256

    def test_truncation_error_reports_available(self):
        src = [solid(4, 4, (0, 0, 0))] * 60  # 2 s @ 30 fps
        with pytest.raises(TruncationError, match="2.00"):
            sample_frames(src, 30.0, GifSpec(duration=3.0, output_fps=10))

    def test_1fps_output(self):
        src = [solid(4, 4, (i, 0, 0)) for i in range(90)]
        out = sample_frames(src, 30.0, GifSpec(duration=3.0, output_fps=1))
        assert len(out) == 3

    def test_scale_frames_preserves_aspect(self):
        out = scale_frames([solid(320, 240, (9, 9, 9))], 160)
        assert out[0].shape == (120, 160, 3)
        assert scale_frames([solid(320, 240, (1, 2, 3))], None)[0].shape == (240, 320, 3)


class TestQuantize:
    def test_lossless_when_colors_fit(self):
        frames = [solid(8, 8, c) for c in [(1, 2, 3), (9, 9, 9), (250, 0, 7), (0, 0, 0)]]
        palette, indexed = quantize(frames, 256)
        assert len(palette) == 4
        for frame, idx in zip(frames, indexed):
            np.testing.assert_array_equal(palette.colors[idx], frame)

    def test_single_color(self):
        palette, indexed = quantize([solid(5, 5, (7, 8, 9))], 256)
        assert len(palette) == 1
        assert (indexed[0] == 0).all()

    def test_256_beats_16_on_wide_gradient(self):
        # 300 distinct colors on a smooth ramp
        ramp = np.zeros((10, 300, 3), np.uint8)
        ramp[:, :, 0] = np.arange(300) % 256
        ramp[:, :, 1] = (np.arange(300) // 2) % 256

        def mean_err(max_colors):
            palette, [idx] = quantize([ramp], max_colors)
            return float(np.abs(palette.colors[idx].astype(int) - ramp.astype(int)).mean())

        assert mean_err(256) < mean_err(16)

    def test_palette_never_exceeds_limit(self):
        rng = np.random.default_rng(5)
        noise = rng.integers(0, 256, (32, 32, 3), dtype=np.uint8)
        palette, _ = quantize([noise], 64)
        assert len(palette) <= 64


class TestLzw:
    def test_round_trips_through_reference_decoder(self):
        # exercised via a full GIF so Pillow decodes the code stream
        rng = np.random.default_rng(2)
        frame = (rng.integers(0, 4, (16, 16)) * 85).astype(np.uint8)
        rgb = np.stack([frame] * 3, axis=2)
        frames, _, _ = pil_decode(encode_gif([rgb], GifSpec(duration=0.1, output_fps=10, scale_width=None)))
        np.testing.assert_array_equal(frames[0], rgb)

    def test_rejects_out_of_range_index(self):
        with pytest.raises(ValueError):
            lzw_encode([5], 2)
        with pytest.raises(ValueError):
            lzw_encode([0, 1, 9], 2)

    def test_table_reset_path(self):
        # enough 8-bit noise to push the code table past 4096 entries
        rng = np.random.default_rng(3)
        idx = rng.integers(0, 256, (96, 96), dtype=np.uint8)
        palette = np.zeros((256, 3), np.uint8)
        palette[:, 0] = np.arange(256)
        rgb = palette[idx]
        frames, _, _ = pil_decode(encode_gif([rgb], GifSpec(duration=0.1, output_fps=10, scale_width=None)))
        np.testing.assert_array_equal(frames[0], rgb)


class TestEncodeGif:
    SPEC = GifSpec(duration=0.3, output_fps=10, scale_width=None)

    def test_solid_2x2_single_frame_exact(self):
        frame = solid(2, 2, (13, 200, 77))
        frames, delays, loop = pil_decode(encode_gif([frame], GifSpec(duration=0.1, output_fps=10, scale_width=None)))
        assert len(frames) == 1
        np.testing.assert_array_equal(frames[0], frame)

    def test_frame_count_dims_delay_loop(self):
        frames_in = [solid(32, 20, ((i * 40) % 256, 0, 0)) for i in range(3)]
        data = encode_gif(frames_in, self.SPEC)
        frames, delays, loop = pil_decode(data)
        assert len(frames) == 3
        assert frames[0].shape == (20, 32, 3)
        assert delays == [10, 10, 10]  # round(100/10) hundredths
        assert loop == 0  # netscape infinite loop

    def test_no_loop_extension_when_disabled(self):
        data = encode_gif([solid(4, 4, (0, 0, 0))],
                          GifSpec(duration=0.1, output_fps=10, loop=False, scale_width=None))
        assert b"NETSCAPE2.0" not in data
        _, _, loop = pil_decode(data)
        assert loop is None

    def test_quantized_decode_within_nearest_palette_bound(self):
        rng = np.random.default_rng(11)
        frames_in = [rng.integers(0, 256, (24, 24, 3), dtype=np.uint8) for _ in range(5)]
        palette, indexed = quantize(frames_in, 256)
        data = encode_gif(frames_in, GifSpec(duration=0.5, output_fps=10, scale_width=None))
        frames, _, _ = pil_decode(data)
        for src, idx, out in zip(frames_in, indexed, frames):
            np.testing.assert_array_equal(out, palette.colors[idx])

    def test_duration_equals_frames_times_delay(self):
        spec = GifSpec(duration=3.0, output_fps=10, scale_width=None)
        assert spec.frame_count * spec.delay_hundredths / 100 == pytest.approx(3.0, abs=spec.delay_hundredths / 100)

    def test_trailer_and_header(self):
        data = encode_gif([solid(4, 4, (1, 1, 1))], self.SPEC)
        assert data.startswith(b"GIF89a")
        assert data[-1] == 0x3B

    def test_mismatched_dims_rejected(self):
        with pytest.raises(ValueError):
            encode_gif([solid(4, 4, (0, 0, 0)), solid(5, 4, (0, 0, 0))], self.SPEC)


@settings(max_examples=1000, deadline=None)
@given(
    w=st.integers(1, 8),
    h=st.integers(1, 8),
    n_frames=st.integers(1, 3),
    n_colors=st.integers(1, 4),
    seed=st.integers(0, 2**31 - 1),
)
def test_encoder_deterministic_and_lossless_small(w, h, n_frames, n_colors, seed):
    rng = np.random.default_rng(seed)
    colors = rng.integers(0, 256, (n_colors, 3), dtype=np.uint8)
    frames = [colors[rng.integers(0, n_colors, (h, w))] for _ in range(n_frames)]
    spec = GifSpec(duration=n_frames / 10, output_fps=10, scale_width=None)
    data1 = encode_gif(frames, spec)
    data2 = encode_gif([f.copy() for f in frames], spec)
    assert data1 == data2
    decoded, delays, _ = pil_decode(data1)
    assert len(decoded) == n_frames
    for src, out in zip(frames, decoded):
        np.testing.assert_array_equal(out, src)
