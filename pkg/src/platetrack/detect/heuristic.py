"""Classical plate localization: edges, morphology, connected components."""

from __future__ import annotations

import numpy as np

from .. import _kernels
from ..errors import ArgumentError
from ..imaging import ImageBuffer, otsu_threshold
from .boxes import DetectorConfig, RotatedBox
from .filters import filter_plate_candidates


def sobel_vertical_magnitude(img: ImageBuffer) -> np.ndarray:
    """|Gx| of the 3x3 Sobel horizontal-gradient kernel, clamp-to-edge."""
    if img.channels != 1:
        raise ArgumentError("sobel expects a grayscale image")
    src = img.pixels.astype(np.float64)
    p = np.pad(src, 1, mode="edge")
    gx = (
        -p[:-2, :-2]
        + p[:-2, 2:]
        - 2.0 * p[1:-1, :-2]
        + 2.0 * p[1:-1, 2:]
        - p[2:, :-2]
        + p[2:, 2:]
    )
    return np.abs(gx)


def _close_horizontal(mask: np.ndarray, width: int) -> np.ndarray:
    """Binary closing with a 1 x width SE: dilation pads background,
    erosion pads foreground, so closing never shrinks the input."""
    half = width // 2

    def _shift_or(m):
        padded = np.pad(m, ((0, 0), (half, half)), constant_values=False)
        out = np.zeros_like(m)
        for i in range(width):
            out |= padded[:, i : i + m.shape[1]]
        return out

    def _shift_and(m):
        padded = np.pad(m, ((0, 0), (half, half)), constant_values=True)
        out = np.ones_like(m)
        for i in range(width):
            out &= padded[:, i : i + m.shape[1]]
        return out

    return _shift_and(_shift_or(mask))


def detect_heuristic(img: ImageBuffer, cfg: DetectorConfig) -> list[RotatedBox]:
    """Edge/contour plate candidates on a grayscale frame.

    Vertical Sobel magnitude -> Otsu binarization -> horizontal closing ->
    8-connected components -> axis-aligned boxes, eliminated by the config
    filters. Score is the original edge-pixel density inside the component
    bounding box; results sort by score descending (ties by input order).
    """
    if img.channels != 1:
        raise ArgumentError("detect_heuristic expects a grayscale frame")
    mag = sobel_vertical_magnitude(img)
    peak = mag.max()
    if peak <= 0:
        return []
    scaled = ImageBuffer.from_array(np.floor(mag / peak * 255.0 + 0.5).astype(np.uint8))
    edges = scaled.pixels > otsu_threshold(scaled)
    closed = _close_horizontal(edges, cfg.closing_width)
    labels, count = _kernels.label_components(
        np.ascontiguousarray(closed.astype(np.uint8))
    )
    if count == 0:
        return []
    candidates = []
    ys, xs = np.nonzero(labels)
    lbls = labels[ys, xs]
    order = np.argsort(lbls, kind="stable")
    ys, xs, lbls = ys[order], xs[order], lbls[order]
    starts = np.searchsorted(lbls, np.arange(1, count + 1))
    ends = np.append(starts[1:], len(lbls))
    for k in range(count):
        sel = slice(starts[k], ends[k])
        x0, x1 = int(xs[sel].min()), int(xs[sel].max())
        y0, y1 = int(ys[sel].min()), int(ys[sel].max())
        bbox_area = (x1 - x0 + 1) * (y1 - y0 + 1)
        density = float(edges[y0 : y1 + 1, x0 : x1 + 1].sum()) / bbox_area
        candidates.append(
            RotatedBox.axis_aligned(x0, y0, x1 + 1, y1 + 1, score=min(1.0, density))
        )
    kept = filter_plate_candidates(candidates, img, cfg)
    return sorted(kept, key=lambda b: -b.score)
