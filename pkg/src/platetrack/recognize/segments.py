"""Character segmentation of a binarized plate crop."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .. import _kernels
from ..errors import ArgumentError
from ..imaging import ImageBuffer


@dataclass(frozen=True)
class SegmentParams:
    """Component acceptance window, relative to the crop size."""

    min_height_frac: float = 0.3
    max_height_frac: float = 0.95
    min_width_px: int = 2
    max_width_frac: float = 1.0 / 3.0


@dataclass(frozen=True)
class CharSegment:
    """One candidate character: crop-space bounds plus its binary mask."""

    x0: int
    y0: int
    x1: int
    y1: int
    mask: ImageBuffer

    @property
    def center_x(self) -> float:
        return (self.x0 + self.x1) / 2.0

    @property
    def width(self) -> int:
        return self.x1 - self.x0

    @property
    def height(self) -> int:
        return self.y1 - self.y0


def segment_characters(plate: ImageBuffer, params: SegmentParams = SegmentParams()) -> list[CharSegment]:
    """Split a binary plate into character components, left to right.

    If white is the majority the image is inverted first, so characters are
    always the foreground. Components are 8-connected; those outside the
    height/width windows are dropped. Overlapping x-ranges are all kept.
    """
    if plate.channels != 1:
        raise ArgumentError("segment_characters expects a grayscale image")
    values = np.unique(plate.pixels)
    if not np.isin(values, (0, 255)).all():
        raise ArgumentError("segment_characters expects a binary {0,255} image")
    fg = plate.pixels == 255
    if fg.mean() > 0.5:
        fg = ~fg
    labels, count = _kernels.label_components(np.ascontiguousarray(fg.astype(np.uint8)))
    if count == 0:
        return []
    h, w = plate.height, plate.width
    min_h = params.min_height_frac * h
    max_h = params.max_height_frac * h
    max_w = params.max_width_frac * w
    segs = []
    ys, xs = np.nonzero(labels)
    lbls = labels[ys, xs]
    order = np.argsort(lbls, kind="stable")
    ys, xs, lbls = ys[order], xs[order], lbls[order]
    starts = np.searchsorted(lbls, np.arange(1, count + 1))
    ends = np.append(starts[1:], len(lbls))
    for k in range(count):
        sel = slice(starts[k], ends[k])
        x0, x1 = int(xs[sel].min()), int(xs[sel].max()) + 1
        y0, y1 = int(ys[sel].min()), int(ys[sel].max()) + 1
        seg_w = x1 - x0
        seg_h = y1 - y0
        if seg_h < min_h or seg_h > max_h:
            continue
        if seg_w < params.min_width_px or seg_w > max_w:
            continue
        component = labels[y0:y1, x0:x1] == (k + 1)
        mask = ImageBuffer.from_array(np.where(component, 255, 0).astype(np.uint8))
        segs.append(CharSegment(x0=x0, y0=y0, x1=x1, y1=y1, mask=mask))
    segs.sort(key=lambda s: s.center_x)
    return segs
