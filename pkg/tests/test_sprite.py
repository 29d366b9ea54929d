"""Tile extraction/composition, including the byte-exact round-trip property."""

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from ltcgif.errors import FormatError
from ltcgif.ltc_model import ContainerGeometry
from ltcgif.sprite import (
    SpriteSheet,
    blank_sheet,
    compose_sheet,
    decode_jpeg,
    encode_jpeg,
    extract_tiles,
)

GEOM = ContainerGeometry()  # 5x5 of 160x90


def solid_tile(color, geometry=GEOM):
    return np.full((geometry.tile_height, geometry.tile_width, 3), color, np.uint8)


def distinct_colors(n):
    return [((37 * k) % 256, (91 * k) % 256, (151 * k) % 256) for k in range(n)]


class TestExtract:
    def test_full_5x5_sheet_of_solid_tiles(self):
        colors = distinct_colors(25)
        sheet = compose_sheet([solid_tile(c) for c in colors], GEOM)
        assert sheet.image.shape == (450, 800, 3)
        tiles = extract_tiles(sheet)
        assert len(tiles) == 25
        for k, tile in tiles:
            assert tile.shape == (90, 160, 3)
            assert (tile == np.array(colors[k], np.uint8)).all()

    def test_extraction_matches_manual_slices(self):
        rng = np.random.default_rng(7)
        img = rng.integers(0, 256, (450, 800, 3), dtype=np.uint8)
        sheet = SpriteSheet(img, GEOM, 0, 25)
        for k, tile in extract_tiles(sheet):
            r, c = divmod(k, 5)
            np.testing.assert_array_equal(tile, img[r * 90:(r + 1) * 90, c * 160:(c + 1) * 160])

    def test_partial_final_container(self):
        # 6734 thumbnails leave 9 on the final sheet (6734 mod 25).
        tiles_in = [solid_tile(c) for c in distinct_colors(9)]
        sheet = compose_sheet(tiles_in, GEOM, container_index=269)
        assert sheet.valid_tiles == 9
        assert len(extract_tiles(sheet)) == 9

    def test_1x1_grid_is_identity_crop(self):
        g = ContainerGeometry(grid_cols=1, grid_rows=1, tile_width=8, tile_height=6)
        rng = np.random.default_rng(1)
        img = rng.integers(0, 256, (6, 8, 3), dtype=np.uint8)
        sheet = SpriteSheet(img, g, 0, 1)
        [(k, tile)] = extract_tiles(sheet)
        assert k == 0
        np.testing.assert_array_equal(tile, img)

    def test_dimension_mismatch_rejected(self):
        img = np.zeros((450, 799, 3), np.uint8)
        with pytest.raises(FormatError):
            SpriteSheet(img, GEOM, 0, 25)

    def test_empty_boundary_sheet_extracts_nothing(self):
        assert extract_tiles(blank_sheet(GEOM, 2)) == []


class TestCompose:
    def test_single_tile_pads_black(self):
        sheet = compose_sheet([solid_tile((200, 10, 10))], GEOM)
        assert sheet.valid_tiles == 1
        # any other cell is black
        assert (sheet.image[0:90, 160:320] == 0).all()
        assert (sheet.image[360:450, 640:800] == 0).all()

    def test_zero_tiles_rejected(self):
        with pytest.raises(FormatError):
            compose_sheet([], GEOM)

    def test_wrong_tile_size_rejected(self):
        with pytest.raises(FormatError):
            compose_sheet([np.zeros((90, 159, 3), np.uint8)], GEOM)

    def test_too_many_tiles_rejected(self):
        with pytest.raises(FormatError):
            compose_sheet([solid_tile((0, 0, 0))] * 26, GEOM)


small_geom = st.builds(
    ContainerGeometry,
    grid_cols=st.integers(1, 5),
    grid_rows=st.integers(1, 5),
    tile_width=st.integers(1, 8),
    tile_height=st.integers(1, 8),
)


@settings(max_examples=1000, deadline=None)
@given(geom=small_geom, data=st.data())
def test_compose_extract_round_trip_byte_exact(geom, data):
    n = data.draw(st.integers(1, geom.tiles_per_container))
    seed = data.draw(st.integers(0, 2**31 - 1))
    rng = np.random.default_rng(seed)
    tiles = [
        rng.integers(0, 256, (geom.tile_height, geom.tile_width, 3), dtype=np.uint8)
        for _ in range(n)
    ]
    sheet = compose_sheet(tiles, geom)
    out = extract_tiles(sheet)
    assert len(out) == n
    for (k, tile), original in zip(out, tiles):
        assert tile.tobytes() == original.tobytes()


def test_jpeg_round_trip_shape_and_tolerance():
    rng = np.random.default_rng(3)
    img = rng.integers(0, 256, (90, 160, 3), dtype=np.uint8)
    back = decode_jpeg(encode_jpeg(img, quality=95))
    assert back.shape == img.shape
    assert back.dtype == np.uint8


def test_decode_garbage_raises_format_error():
    with pytest.raises(FormatError):
        decode_jpeg(b"not an image")
