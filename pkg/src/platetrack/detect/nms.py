"""Rotated-box overlap and the two suppression strategies."""

from __future__ import annotations

import numpy as np

from .. import _kernels
from .boxes import RotatedBox, boxes_to_rows, rows_to_boxes


def iou_rotated(a: RotatedBox, b: RotatedBox) -> float:
    """Intersection over union via convex polygon clipping and shoelace area."""
    return float(_kernels.quad_iou(a.corners(), b.corners()))


def nms_standard(boxes: list[RotatedBox], iou_threshold: float) -> list[RotatedBox]:
    """Greedy suppression: best score first, keep iff IoU with every kept
    box stays at or under the threshold. Score ties resolve to the earlier
    input index; output is in acceptance order."""
    if not boxes:
        return []
    rows = boxes_to_rows(boxes)
    keep = _kernels.nms_greedy(rows, float(iou_threshold))
    return [boxes[int(i)] for i in keep]


def nms_locality_aware(boxes: list[RotatedBox], iou_threshold: float) -> list[RotatedBox]:
    """Single-pass score-weighted merging of row-adjacent boxes, then
    standard NMS over the merged pool.

    While the incoming box overlaps the running "last" quad above the
    threshold, corners are blended weighted by score ((s1*q1 + s2*q2) /
    (s1+s2)) and the running score becomes the pairwise max; otherwise the
    quad is refit to a rectangle and flushed. Expects boxes in the decoder's
    row-major emission order.
    """
    if not boxes:
        return []
    rows = boxes_to_rows(boxes)
    pool = _kernels.lanms_merge(rows, float(iou_threshold))
    keep = _kernels.nms_greedy(np.ascontiguousarray(pool), float(iou_threshold))
    return rows_to_boxes(pool[np.asarray(keep, dtype=np.int64)])
