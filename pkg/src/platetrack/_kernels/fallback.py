"""Pure-Python reference implementations of the hot kernels.

Semantics here are the contract; the compiled module in ``_native.pyx``
mirrors them instruction for instruction. Arrays in, arrays out:

* boxes are ``float64 (n, 6)`` rows of ``cx, cy, w, h, angle, score``
* quads are ``float64 (4, 2)`` corner lists in positive-shoelace order
"""

from __future__ import annotations

import math

import numpy as np

HALF_PI = math.pi / 2.0


def normalize_angle(angle: float) -> float:
    """Fold an angle into (-pi/2, pi/2]; a rectangle is invariant under +/-pi."""
    r = math.fmod(HALF_PI - angle, math.pi)
    if r < 0.0:
        r += math.pi
    return HALF_PI - r


def box_corners(cx, cy, w, h, angle):
    """Corners of a rotated rectangle as a (4, 2) array.

    Order is top-left, top-right, bottom-right, bottom-left of the
    unrotated box (y grows downward), which makes the signed shoelace
    sum come out positive and equal to 2*w*h.
    """
    c = math.cos(angle)
    s = math.sin(angle)
    hw = 0.5 * w
    hh = 0.5 * h
    out = np.empty((4, 2), dtype=np.float64)
    for i, (ox, oy) in enumerate(((-hw, -hh), (hw, -hh), (hw, hh), (-hw, hh))):
        out[i, 0] = cx + c * ox - s * oy
        out[i, 1] = cy + s * ox + c * oy
    return out


def polygon_area(points) -> float:
    """Absolute shoelace area of a polygon given as an (n, 2) sequence."""
    n = len(points)
    if n < 3:
        return 0.0
    acc = 0.0
    for i in range(n):
        x0, y0 = points[i]
        x1, y1 = points[(i + 1) % n]
        acc += x0 * y1 - x1 * y0
    return abs(acc) * 0.5


def clip_polygon(subject, clip) -> list[tuple[float, float]]:
    """Sutherland-Hodgman clip of ``subject`` against convex ``clip``.

    Both polygons must be in positive-shoelace order; points exactly on a
    clip edge count as inside, so touching boxes clip to a zero-area sliver.
    """
    output = [(float(p[0]), float(p[1])) for p in subject]
    m = len(clip)
    for i in range(m):
        if not output:
            return []
        ax, ay = float(clip[i][0]), float(clip[i][1])
        bx, by = float(clip[(i + 1) % m][0]), float(clip[(i + 1) % m][1])
        ex = bx - ax
        ey = by - ay
        inp = output
        output = []
        sx, sy = inp[-1]
        s_in = ex * (sy - ay) - ey * (sx - ax) >= 0.0
        for px, py in inp:
            p_in = ex * (py - ay) - ey * (px - ax) >= 0.0
            if p_in != s_in:
                # segment crosses the clip line; standard line intersection
                dx = px - sx
                dy = py - sy
                denom = ex * dy - ey * dx
                if denom != 0.0:
                    t = (ex * (ay - sy) - ey * (ax - sx)) / denom
                    output.append((sx + t * dx, sy + t * dy))
            if p_in:
                output.append((px, py))
            sx, sy, s_in = px, py, p_in
    return output


def quad_intersection_area(qa, qb) -> float:
    """Area of the intersection of two convex quads."""
    return polygon_area(clip_polygon(qa, qb))


def quad_iou(qa, qb) -> float:
    """Intersection over union of two convex quads, in [0, 1]."""
    inter = quad_intersection_area(qa, qb)
    if inter <= 0.0:
        return 0.0
    union = polygon_area(qa) + polygon_area(qb) - inter
    if union <= 0.0:
        return 0.0
    v = inter / union
    return 1.0 if v > 1.0 else v


def quad_to_box(quad, score: float):
    """Fit a rotated rectangle to a (near-)parallelogram quad.

    The width direction is the mean of the two horizontal edges; corners
    are projected onto that frame and the extents taken, so an exact
    rectangle round-trips unchanged.
    """
    dx = (quad[1][0] - quad[0][0]) + (quad[2][0] - quad[3][0])
    dy = (quad[1][1] - quad[0][1]) + (quad[2][1] - quad[3][1])
    if dx == 0.0 and dy == 0.0:
        angle = 0.0
    else:
        angle = normalize_angle(math.atan2(dy, dx))
    c = math.cos(angle)
    s = math.sin(angle)
    umin = vmin = math.inf
    umax = vmax = -math.inf
    for px, py in quad:
        u = px * c + py * s
        v = -px * s + py * c
        umin = min(umin, u)
        umax = max(umax, u)
        vmin = min(vmin, v)
        vmax = max(vmax, v)
    uc = 0.5 * (umin + umax)
    vc = 0.5 * (vmin + vmax)
    return (
        uc * c - vc * s,
        uc * s + vc * c,
        umax - umin,
        vmax - vmin,
        angle,
        score,
    )


def decode_rbox(scores, geom, score_threshold: float, stride: float):
    """Decode per-cell score/geometry grids into rotated boxes.

    One box per cell whose score is >= ``score_threshold``, emitted in
    row-major cell order. Each cell anchors at ``(col*stride, row*stride)``
    and carries four edge distances plus a rotation about the anchor.
    """
    scores = np.asarray(scores, dtype=np.float32)
    geom = np.asarray(geom, dtype=np.float32)
    rr, cc = np.nonzero(scores >= score_threshold)
    n = rr.shape[0]
    out = np.empty((n, 6), dtype=np.float64)
    if n == 0:
        return out
    g = geom[rr, cc, :].astype(np.float64)
    top, right, bottom, left, theta = (g[:, i] for i in range(5))
    px = cc.astype(np.float64) * stride
    py = rr.astype(np.float64) * stride
    cos_t = np.cos(theta)
    sin_t = np.sin(theta)
    ox = 0.5 * (right - left)
    oy = 0.5 * (bottom - top)
    out[:, 0] = px + cos_t * ox - sin_t * oy
    out[:, 1] = py + sin_t * ox + cos_t * oy
    out[:, 2] = left + right
    out[:, 3] = top + bottom
    out[:, 4] = HALF_PI - np.mod(HALF_PI - theta, math.pi)
    out[:, 5] = scores[rr, cc].astype(np.float64)
    return out


def _corners_and_bounds(boxes):
    n = boxes.shape[0]
    quads = np.empty((n, 4, 2), dtype=np.float64)
    bounds = np.empty((n, 4), dtype=np.float64)
    for i in range(n):
        q = box_corners(*boxes[i, :5])
        quads[i] = q
        bounds[i, 0] = q[:, 0].min()
        bounds[i, 1] = q[:, 1].min()
        bounds[i, 2] = q[:, 0].max()
        bounds[i, 3] = q[:, 1].max()
    return quads, bounds


def nms_greedy(boxes, iou_threshold: float):
    """Greedy non-max suppression over (n, 6) box rows.

    Candidates are visited by descending score (ties: lower input index
    first) and kept iff their IoU with every kept box is <= the threshold.
    Returns kept indices in acceptance order. Disjoint axis-aligned bounds
    short-circuit to IoU 0.
    """
    boxes = np.asarray(boxes, dtype=np.float64)
    n = boxes.shape[0]
    if n == 0:
        return np.empty(0, dtype=np.int64)
    quads, bounds = _corners_and_bounds(boxes)
    order = sorted(range(n), key=lambda i: (-boxes[i, 5], i))
    keep: list[int] = []
    for i in order:
        ok = True
        for j in keep:
            if (
                bounds[i, 0] > bounds[j, 2]
                or bounds[j, 0] > bounds[i, 2]
                or bounds[i, 1] > bounds[j, 3]
                or bounds[j, 1] > bounds[i, 3]
            ):
                continue
            if quad_iou(quads[i], quads[j]) > iou_threshold:
                ok = False
                break
        if ok:
            keep.append(i)
    return np.asarray(keep, dtype=np.int64)


def lanms_merge(boxes, iou_threshold: float):
    """Single-pass locality-aware merge of row-major ordered boxes.

    While the current box overlaps the running "last" quad beyond the
    threshold, their corners are averaged weighted by score and the score
    becomes the pairwise max; otherwise the last quad is refit to a
    rectangle and flushed. Returns the flushed pool as (m, 6) rows, still
    subject to standard NMS.
    """
    boxes = np.asarray(boxes, dtype=np.float64)
    n = boxes.shape[0]
    pool: list[tuple[float, ...]] = []
    last_q = None
    last_s = 0.0
    for i in range(n):
        q = box_corners(*boxes[i, :5])
        s = float(boxes[i, 5])
        if last_q is not None and quad_iou(q, last_q) > iou_threshold:
            wsum = last_s + s
            last_q = (last_q * last_s + q * s) / wsum
            last_s = max(last_s, s)
        else:
            if last_q is not None:
                pool.append(quad_to_box(last_q, last_s))
            last_q = q
            last_s = s
    if last_q is not None:
        pool.append(quad_to_box(last_q, last_s))
    out = np.empty((len(pool), 6), dtype=np.float64)
    for i, row in enumerate(pool):
        out[i] = row
    return out


def label_components(mask):
    """8-connected component labelling of a binary uint8 mask.

    Returns ``(labels, count)`` where labels is int32 with background 0 and
    components numbered 1..count in raster order of first appearance.
    """
    mask = np.asarray(mask)
    h, w = mask.shape
    labels = np.zeros((h, w), dtype=np.int32)
    parent = [0]  # parent[i] for provisional label i; 1-indexed

    def find(x: int) -> int:
        root = x
        while parent[root] != root:
            root = parent[root]
        while parent[x] != root:
            parent[x], x = root, parent[x]
        return root

    for y in range(h):
        row = mask[y]
        for x in range(w):
            if not row[x]:
                continue
            best = 0
            neighbors = []
            if x > 0 and labels[y, x - 1]:
                neighbors.append(labels[y, x - 1])
            if y > 0:
                prev = labels[y - 1]
                if x > 0 and prev[x - 1]:
                    neighbors.append(prev[x - 1])
                if prev[x]:
                    neighbors.append(prev[x])
                if x + 1 < w and prev[x + 1]:
                    neighbors.append(prev[x + 1])
            if neighbors:
                roots = [find(int(v)) for v in neighbors]
                best = min(roots)
                for r in roots:
                    if r != best:
                        parent[r] = best
            if best == 0:
                parent.append(len(parent))
                best = len(parent) - 1
            labels[y, x] = best

    # second pass: resolve unions and renumber by first raster appearance
    remap: dict[int, int] = {}
    count = 0
    for y in range(h):
        for x in range(w):
            lbl = labels[y, x]
            if not lbl:
                continue
            root = find(int(lbl))
            new = remap.get(root)
            if new is None:
                count += 1
                new = count
                remap[root] = new
            labels[y, x] = new
    return labels, count
