"""Non-plate rejection: size, aspect and interior-brightness gates."""

from __future__ import annotations

import numpy as np

from .. import _kernels
from ..imaging import ImageBuffer
from .boxes import DetectorConfig, RotatedBox


def clip_box_polygon(box: RotatedBox, width: int, height: int) -> list[tuple[float, float]]:
    """Box corners clipped against the image rectangle (may be empty)."""
    frame = np.array(
        [(0.0, 0.0), (float(width), 0.0), (float(width), float(height)), (0.0, float(height))]
    )
    return _kernels.clip_polygon(box.corners(), frame)


def clipped_measurements(box: RotatedBox, width: int, height: int):
    """(area, aspect) of the box after clipping to the image bounds.

    Aspect generalizes to rotated clips by projecting the clipped polygon
    onto the box's own width/height axes and taking the extent ratio.
    Returns (0, 0) when the box lies fully outside.
    """
    poly = clip_box_polygon(box, width, height)
    area = _kernels.polygon_area(poly)
    if area <= 0.0:
        return 0.0, 0.0
    pts = np.asarray(poly, dtype=np.float64)
    c = np.cos(box.angle)
    s = np.sin(box.angle)
    u = pts[:, 0] * c + pts[:, 1] * s
    v = -pts[:, 0] * s + pts[:, 1] * c
    extent_w = float(u.max() - u.min())
    extent_h = float(v.max() - v.min())
    if extent_h <= 0.0:
        return area, 0.0
    return area, extent_w / extent_h


def mean_interior_value(img: ImageBuffer, box: RotatedBox) -> float:
    """Mean gray value over pixels whose centers fall inside the clipped box."""
    poly = clip_box_polygon(box, img.width, img.height)
    if len(poly) < 3:
        return 0.0
    pts = np.asarray(poly, dtype=np.float64)
    x0 = max(0, int(np.floor(pts[:, 0].min())))
    y0 = max(0, int(np.floor(pts[:, 1].min())))
    x1 = min(img.width, int(np.ceil(pts[:, 0].max())))
    y1 = min(img.height, int(np.ceil(pts[:, 1].max())))
    if x1 <= x0 or y1 <= y0:
        return 0.0
    xs = np.arange(x0, x1) + 0.5
    ys = np.arange(y0, y1) + 0.5
    xx, yy = np.meshgrid(xs, ys)
    inside = np.ones(xx.shape, dtype=bool)
    n = len(pts)
    for i in range(n):
        ax, ay = pts[i]
        bx, by = pts[(i + 1) % n]
        inside &= (bx - ax) * (yy - ay) - (by - ay) * (xx - ax) >= 0
    if not inside.any():
        return 0.0
    gray = img.pixels if img.channels == 1 else img.pixels.mean(axis=2)
    patch = gray[y0:y1, x0:x1]
    return float(patch[inside].mean())


def filter_plate_candidates(
    boxes: list[RotatedBox], img: ImageBuffer, cfg: DetectorConfig
) -> list[RotatedBox]:
    """Keep boxes passing the area range, aspect range and (if enabled)
    the interior mean-brightness floor; measurements are taken after
    clipping to the image, and input order is preserved."""
    kept = []
    for box in boxes:
        area, aspect = clipped_measurements(box, img.width, img.height)
        if area <= 0.0:
            continue
        if not cfg.min_area <= area <= cfg.max_area:
            continue
        if not cfg.min_aspect <= aspect <= cfg.max_aspect:
            continue
        if cfg.min_mean_value > 0.0 and mean_interior_value(img, box) < cfg.min_mean_value:
            continue
        kept.append(box)
    return kept
