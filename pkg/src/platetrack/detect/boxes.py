"""Scored oriented rectangles and the detector tuning knobs."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .. import _kernels
from ..errors import ArgumentError


@dataclass(frozen=True)
class RotatedBox:
    """Oriented rectangle in continuous image coordinates.

    Pixel (i, j) occupies the unit square [i, i+1) x [j, j+1); (cx, cy) is
    the rectangle center, `angle` the rotation in (-pi/2, pi/2] about it.
    The constructor folds any angle into that range (a rectangle is the
    same point set under a half-turn).
    """

    cx: float
    cy: float
    w: float
    h: float
    angle: float = 0.0
    score: float = 1.0

    def __post_init__(self):
        if self.w <= 0 or self.h <= 0:
            raise ArgumentError(f"box dimensions must be positive, got {self.w}x{self.h}")
        if not 0.0 <= self.score <= 1.0:
            raise ArgumentError(f"score must be in [0, 1], got {self.score}")
        object.__setattr__(self, "angle", _kernels.normalize_angle(self.angle))

    @classmethod
    def axis_aligned(cls, x0: float, y0: float, x1: float, y1: float, score: float = 1.0) -> "RotatedBox":
        """Unrotated box from opposite corners."""
        return cls(
            cx=(x0 + x1) / 2.0,
            cy=(y0 + y1) / 2.0,
            w=abs(x1 - x0),
            h=abs(y1 - y0),
            angle=0.0,
            score=score,
        )

    def corners(self) -> np.ndarray:
        """(4, 2) corner array in positive-shoelace order.

        At angle 0 the order is top-left, top-right, bottom-right,
        bottom-left; the signed shoelace sum equals w*h.
        """
        return _kernels.box_corners(self.cx, self.cy, self.w, self.h, self.angle)

    def area(self) -> float:
        return self.w * self.h

    def aspect(self) -> float:
        return self.w / self.h

    def contains(self, x: float, y: float) -> bool:
        c = math.cos(self.angle)
        s = math.sin(self.angle)
        dx = x - self.cx
        dy = y - self.cy
        u = c * dx + s * dy
        v = -s * dx + c * dy
        return abs(u) <= self.w / 2.0 and abs(v) <= self.h / 2.0

    def as_row(self) -> np.ndarray:
        """Kernel-facing float64 row [cx, cy, w, h, angle, score]."""
        return np.array([self.cx, self.cy, self.w, self.h, self.angle, self.score], dtype=np.float64)

    def to_json(self) -> dict:
        return {"cx": self.cx, "cy": self.cy, "w": self.w, "h": self.h, "angle": self.angle, "score": self.score}

    @classmethod
    def from_json(cls, d: dict) -> "RotatedBox":
        return cls(cx=d["cx"], cy=d["cy"], w=d["w"], h=d["h"], angle=d.get("angle", 0.0), score=d.get("score", 1.0))


def boxes_to_rows(boxes) -> np.ndarray:
    out = np.empty((len(boxes), 6), dtype=np.float64)
    for i, b in enumerate(boxes):
        out[i, 0] = b.cx
        out[i, 1] = b.cy
        out[i, 2] = b.w
        out[i, 3] = b.h
        out[i, 4] = b.angle
        out[i, 5] = b.score
    return out


def rows_to_boxes(rows: np.ndarray) -> list[RotatedBox]:
    return [
        RotatedBox(
            cx=float(r[0]),
            cy=float(r[1]),
            w=float(r[2]),
            h=float(r[3]),
            angle=float(r[4]),
            score=min(1.0, max(0.0, float(r[5]))),
        )
        for r in np.asarray(rows, dtype=np.float64)
    ]


@dataclass(frozen=True)
class DetectorConfig:
    """Thresholds for decoding, suppression and non-plate rejection.

    The source material leaves all of these open; defaults follow common
    scene-text post-processing practice and every value is configurable.
    `min_mean_value` = 0 disables the interior-brightness filter.
    """

    score_threshold: float = 0.8
    nms_iou_threshold: float = 0.2
    stride: int = 4
    min_area: float = 250.0
    max_area: float = 250_000.0
    min_aspect: float = 1.5
    max_aspect: float = 8.0
    min_mean_value: float = 0.0
    closing_width: int = 9  # horizontal SE joining characters into one blob

    def __post_init__(self):
        if not 0.0 < self.score_threshold < 1.0:
            raise ArgumentError("score_threshold must be in (0, 1)")
        if not 0.0 < self.nms_iou_threshold < 1.0:
            raise ArgumentError("nms_iou_threshold must be in (0, 1)")
        if self.min_aspect >= self.max_aspect:
            raise ArgumentError("aspect range must satisfy min < max")
        if self.stride <= 0:
            raise ArgumentError("stride must be positive")
