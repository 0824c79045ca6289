"""Rotated-box recovery from score/geometry grids, plus the inverse encoder."""

from __future__ import annotations

import math

import numpy as np

from .. import _kernels
from ..errors import ArgumentError
from .boxes import DetectorConfig, RotatedBox, rows_to_boxes
from .maps import GEOMETRY_CHANNELS, GeometryMap, ScoreMap


def decode_east(score: ScoreMap, geom: GeometryMap, cfg: DetectorConfig) -> list[RotatedBox]:
    """One box per cell whose score meets the threshold, row-major order.

    A cell (r, c) anchors at p = (c*stride, r*stride); its box has edges at
    the four stored distances from p, measured in the frame rotated by the
    stored angle about p, and carries the cell score.
    """
    if (score.rows, score.cols) != (geom.rows, geom.cols):
        raise ArgumentError(
            f"score map {score.rows}x{score.cols} does not match geometry map {geom.rows}x{geom.cols}"
        )
    rows = _kernels.decode_rbox(
        np.ascontiguousarray(score.values, dtype=np.float32),
        np.ascontiguousarray(geom.values, dtype=np.float32),
        cfg.score_threshold,
        float(cfg.stride),
    )
    return rows_to_boxes(rows)


def encode_east(
    boxes: list[RotatedBox],
    rows: int,
    cols: int,
    stride: int = 4,
) -> tuple[np.ndarray, np.ndarray]:
    """Inverse of decode_east for fixture/corpus generation.

    Each box lights exactly one cell: the one whose anchor lies nearest the
    box center (which must fall inside the box so all four edge distances
    stay non-negative). Returns float32 (rows, cols) scores and
    (rows, cols, 5) geometry.
    """
    scores = np.zeros((rows, cols), dtype=np.float32)
    geom = np.zeros((rows, cols, GEOMETRY_CHANNELS), dtype=np.float32)
    for box in boxes:
        c = min(cols - 1, max(0, int(round(box.cx / stride))))
        r = min(rows - 1, max(0, int(round(box.cy / stride))))
        px = c * stride
        py = r * stride
        ca = math.cos(box.angle)
        sa = math.sin(box.angle)
        dx = box.cx - px
        dy = box.cy - py
        qx = ca * dx + sa * dy
        qy = -sa * dx + ca * dy
        d_left = box.w / 2.0 - qx
        d_right = box.w / 2.0 + qx
        d_top = box.h / 2.0 - qy
        d_bottom = box.h / 2.0 + qy
        if min(d_left, d_right, d_top, d_bottom) < 0:
            raise ArgumentError(
                f"cell anchor ({px},{py}) falls outside box centered at ({box.cx},{box.cy})"
            )
        scores[r, c] = box.score
        geom[r, c] = (d_top, d_right, d_bottom, d_left, box.angle)
    return scores, geom
