import math
import struct

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from platetrack.detect import GeometryMap, RotatedBox, ScoreMap, load_tensor, save_tensor
from platetrack.errors import ArgumentError, FormatError

box_strategy = st.builds(
    RotatedBox,
    cx=st.floats(-50, 50),
    cy=st.floats(-50, 50),
    w=st.floats(0.5, 40),
    h=st.floats(0.5, 40),
    angle=st.floats(-4.0, 4.0),
    score=st.floats(0, 1),
)


def shoelace_signed(pts) -> float:
    acc = 0.0
    for i in range(len(pts)):
        x0, y0 = pts[i]
        x1, y1 = pts[(i + 1) % len(pts)]
        acc += x0 * y1 - x1 * y0
    return acc / 2.0


class TestRotatedBox:
    def test_rejects_nonpositive_dims(self):
        with pytest.raises(ArgumentError):
            RotatedBox(0, 0, 0, 1)
        with pytest.raises(ArgumentError):
            RotatedBox(0, 0, 1, -2)

    def test_rejects_bad_score(self):
        with pytest.raises(ArgumentError):
            RotatedBox(0, 0, 1, 1, score=1.5)

    @settings(max_examples=100, deadline=None)
    @given(box=box_strategy)
    def test_angle_normalized_and_shoelace_area(self, box):
        assert -math.pi / 2 < box.angle <= math.pi / 2
        corners = box.corners()
        signed = shoelace_signed(corners)
        assert signed == pytest.approx(box.w * box.h, rel=1e-6)

    def test_corner_order_axis_aligned(self):
        corners = RotatedBox(cx=1.0, cy=2.0, w=4.0, h=2.0).corners()
        assert corners.tolist() == [[-1, 1], [3, 1], [3, 3], [-1, 3]]

    @settings(max_examples=50, deadline=None)
    @given(box=box_strategy)
    def test_half_turn_same_point_set(self, box):
        other = RotatedBox(box.cx, box.cy, box.w, box.h, box.angle + math.pi, box.score)
        assert other.angle == pytest.approx(box.angle, abs=1e-12)

    def test_contains_center_and_outside(self):
        box = RotatedBox(5, 5, 4, 2, angle=0.5)
        assert box.contains(5, 5)
        assert not box.contains(50, 50)


class TestEmapFormat:
    def test_score_map_round_trip(self, tmp_path):
        values = np.array([[0.1, 0.9], [0.0, 1.0]], dtype=np.float32)
        path = tmp_path / "s.emap"
        save_tensor(path, values)
        loaded = load_tensor(path)
        assert isinstance(loaded, ScoreMap)
        assert loaded.rows == loaded.cols == 2
        assert np.array_equal(loaded.values, values)

    def test_five_channels_dispatch_to_geometry(self, tmp_path):
        values = np.abs(np.random.default_rng(0).normal(size=(3, 4, 5))).astype(np.float32)
        path = tmp_path / "g.emap"
        save_tensor(path, values)
        loaded = load_tensor(path)
        assert isinstance(loaded, GeometryMap)
        assert np.array_equal(loaded.values, values)

    def test_three_channels_rejected(self, tmp_path):
        path = tmp_path / "c3.emap"
        save_tensor(path, np.zeros((2, 2, 3), dtype=np.float32))
        with pytest.raises(FormatError) as exc:
            load_tensor(path)
        assert "channel" in str(exc.value)

    def test_bad_magic(self, tmp_path):
        path = tmp_path / "bad.emap"
        path.write_bytes(b"XMAP" + struct.pack("<IIII", 1, 1, 1, 1) + b"\0\0\0\0")
        with pytest.raises(FormatError) as exc:
            load_tensor(path)
        assert exc.value.offset == 0

    def test_payload_length_mismatch(self, tmp_path):
        path = tmp_path / "short.emap"
        path.write_bytes(b"EMAP" + struct.pack("<IIII", 1, 2, 2, 1) + b"\0\0\0\0")
        with pytest.raises(FormatError) as exc:
            load_tensor(path)
        assert "length mismatch" in str(exc.value)

    def test_dim_overflow_guard(self, tmp_path):
        path = tmp_path / "huge.emap"
        path.write_bytes(b"EMAP" + struct.pack("<IIII", 1, 1 << 16, 1 << 16, 5))
        with pytest.raises(FormatError) as exc:
            load_tensor(path)
        assert "overflow" in str(exc.value)

    def test_score_outside_unit_interval_rejected(self, tmp_path):
        path = tmp_path / "bad_score.emap"
        save_tensor(path, np.array([[1.5]], dtype=np.float32))
        with pytest.raises(FormatError):
            load_tensor(path)

    def test_negative_distance_rejected(self, tmp_path):
        values = np.zeros((1, 1, 5), dtype=np.float32)
        values[0, 0, 1] = -3.0
        path = tmp_path / "bad_geom.emap"
        save_tensor(path, values)
        with pytest.raises(FormatError):
            load_tensor(path)

    def test_layout_is_cell_major_then_channel(self, tmp_path):
        values = np.arange(2 * 3 * 5, dtype=np.float32).reshape(2, 3, 5) * 0.0
        # make distances deterministic non-negative and theta distinct per cell
        for r in range(2):
            for c in range(3):
                values[r, c] = [r, c, r + c, 1.0, 0.25]
        path = tmp_path / "layout.emap"
        save_tensor(path, values)
        blob = path.read_bytes()
        floats = struct.unpack_from("<" + "f" * 30, blob, 20)
        # cell (r=0,c=1) starts at flat index (0*3+1)*5
        assert floats[5:10] == (0.0, 1.0, 1.0, 1.0, 0.25)
