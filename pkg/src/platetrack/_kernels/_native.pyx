# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled hot kernels; semantics mirror ``fallback.py`` exactly."""

from libc.math cimport atan2, cos, sin, fabs, fmod

import numpy as np
cimport numpy as cnp

cnp.import_array()

cdef double PI = 3.141592653589793
cdef double HALF_PI = 1.5707963267948966


cdef inline double _norm_angle(double angle) nogil:
    cdef double r = fmod(HALF_PI - angle, PI)
    if r < 0.0:
        r += PI
    return HALF_PI - r


cdef inline void _corners(double cx, double cy, double w, double h,
                          double angle, double* qx, double* qy) nogil:
    cdef double c = cos(angle)
    cdef double s = sin(angle)
    cdef double hw = 0.5 * w
    cdef double hh = 0.5 * h
    qx[0] = cx + c * (-hw) - s * (-hh); qy[0] = cy + s * (-hw) + c * (-hh)
    qx[1] = cx + c * hw - s * (-hh);    qy[1] = cy + s * hw + c * (-hh)
    qx[2] = cx + c * hw - s * hh;       qy[2] = cy + s * hw + c * hh
    qx[3] = cx + c * (-hw) - s * hh;    qy[3] = cy + s * (-hw) + c * hh


cdef double _poly_area(double* px, double* py, int n) nogil:
    cdef double acc = 0.0
    cdef int i, j
    if n < 3:
        return 0.0
    for i in range(n):
        j = i + 1
        if j == n:
            j = 0
        acc += px[i] * py[j] - px[j] * py[i]
    return fabs(acc) * 0.5


cdef int _clip(double* sx, double* sy, int n, double* cx, double* cy, int m,
               double* ox, double* oy) nogil:
    """Sutherland-Hodgman; writes the clipped polygon into ox/oy (cap 16)."""
    cdef double bufx[16]
    cdef double bufy[16]
    cdef int i, k, cnt, out_cnt
    cdef double ax, ay, ex, ey, px_, py_, qx_, qy_
    cdef double side_p, side_q, dx, dy, denom, t
    cdef bint p_in, q_in

    cnt = n
    for i in range(n):
        ox[i] = sx[i]
        oy[i] = sy[i]
    for i in range(m):
        if cnt == 0:
            return 0
        ax = cx[i]
        ay = cy[i]
        ex = cx[(i + 1) % m] - ax
        ey = cy[(i + 1) % m] - ay
        out_cnt = 0
        px_ = ox[cnt - 1]
        py_ = oy[cnt - 1]
        side_p = ex * (py_ - ay) - ey * (px_ - ax)
        p_in = side_p >= 0.0
        for k in range(cnt):
            qx_ = ox[k]
            qy_ = oy[k]
            side_q = ex * (qy_ - ay) - ey * (qx_ - ax)
            q_in = side_q >= 0.0
            if q_in != p_in and out_cnt < 15:
                dx = qx_ - px_
                dy = qy_ - py_
                denom = ex * dy - ey * dx
                if denom != 0.0:
                    t = (ex * (ay - py_) - ey * (ax - px_)) / denom
                    bufx[out_cnt] = px_ + t * dx
                    bufy[out_cnt] = py_ + t * dy
                    out_cnt += 1
            if q_in and out_cnt < 16:
                bufx[out_cnt] = qx_
                bufy[out_cnt] = qy_
                out_cnt += 1
            px_ = qx_
            py_ = qy_
            p_in = q_in
        cnt = out_cnt
        for k in range(cnt):
            ox[k] = bufx[k]
            oy[k] = bufy[k]
    return cnt


cdef double _quad_iou(double* ax, double* ay, double* bx, double* by) nogil:
    cdef double ix[16]
    cdef double iy[16]
    cdef int n = _clip(ax, ay, 4, bx, by, 4, ix, iy)
    cdef double inter = _poly_area(ix, iy, n)
    if inter <= 0.0:
        return 0.0
    cdef double union_ = _poly_area(ax, ay, 4) + _poly_area(bx, by, 4) - inter
    if union_ <= 0.0:
        return 0.0
    cdef double v = inter / union_
    return 1.0 if v > 1.0 else v


def quad_intersection_area(double[:, ::1] qa, double[:, ::1] qb):
    cdef double ax[4]
    cdef double ay[4]
    cdef double bx[4]
    cdef double by[4]
    cdef double ix[16]
    cdef double iy[16]
    cdef int i, n
    for i in range(4):
        ax[i] = qa[i, 0]; ay[i] = qa[i, 1]
        bx[i] = qb[i, 0]; by[i] = qb[i, 1]
    n = _clip(ax, ay, 4, bx, by, 4, ix, iy)
    return _poly_area(ix, iy, n)


def quad_iou(double[:, ::1] qa, double[:, ::1] qb):
    cdef double ax[4]
    cdef double ay[4]
    cdef double bx[4]
    cdef double by[4]
    cdef int i
    for i in range(4):
        ax[i] = qa[i, 0]; ay[i] = qa[i, 1]
        bx[i] = qb[i, 0]; by[i] = qb[i, 1]
    return _quad_iou(ax, ay, bx, by)


def decode_rbox(cnp.float32_t[:, ::1] scores, cnp.float32_t[:, :, ::1] geom,
                double score_threshold, double stride):
    cdef int rows = scores.shape[0]
    cdef int cols = scores.shape[1]
    cdef int r, c, n = 0
    for r in range(rows):
        for c in range(cols):
            if scores[r, c] >= score_threshold:
                n += 1
    out_arr = np.empty((n, 6), dtype=np.float64)
    cdef double[:, ::1] out = out_arr
    cdef int i = 0
    cdef double top, right, bottom, left, theta, px, py, ct, st, ox, oy
    for r in range(rows):
        for c in range(cols):
            if scores[r, c] < score_threshold:
                continue
            top = geom[r, c, 0]
            right = geom[r, c, 1]
            bottom = geom[r, c, 2]
            left = geom[r, c, 3]
            theta = geom[r, c, 4]
            px = c * stride
            py = r * stride
            ct = cos(theta)
            st = sin(theta)
            ox = 0.5 * (right - left)
            oy = 0.5 * (bottom - top)
            out[i, 0] = px + ct * ox - st * oy
            out[i, 1] = py + st * ox + ct * oy
            out[i, 2] = left + right
            out[i, 3] = top + bottom
            out[i, 4] = _norm_angle(theta)
            out[i, 5] = scores[r, c]
            i += 1
    return out_arr


def nms_greedy(double[:, ::1] boxes, double iou_threshold):
    cdef int n = boxes.shape[0]
    if n == 0:
        return np.empty(0, dtype=np.int64)
    quads_arr = np.empty((n, 4, 2), dtype=np.float64)
    bounds_arr = np.empty((n, 4), dtype=np.float64)
    cdef double[:, :, ::1] quads = quads_arr
    cdef double[:, ::1] bounds = bounds_arr
    cdef double qx[4]
    cdef double qy[4]
    cdef double rx[4]
    cdef double ry[4]
    cdef int i, j, k
    for i in range(n):
        _corners(boxes[i, 0], boxes[i, 1], boxes[i, 2], boxes[i, 3],
                 boxes[i, 4], qx, qy)
        bounds[i, 0] = bounds[i, 2] = qx[0]
        bounds[i, 1] = bounds[i, 3] = qy[0]
        for k in range(4):
            quads[i, k, 0] = qx[k]
            quads[i, k, 1] = qy[k]
            if qx[k] < bounds[i, 0]: bounds[i, 0] = qx[k]
            if qy[k] < bounds[i, 1]: bounds[i, 1] = qy[k]
            if qx[k] > bounds[i, 2]: bounds[i, 2] = qx[k]
            if qy[k] > bounds[i, 3]: bounds[i, 3] = qy[k]

    order_arr = np.lexsort((np.arange(n), -np.asarray(boxes)[:, 5]))
    cdef cnp.int64_t[::1] order = order_arr.astype(np.int64)
    keep_arr = np.empty(n, dtype=np.int64)
    cdef cnp.int64_t[::1] keep = keep_arr
    cdef int kept = 0
    cdef bint ok
    cdef int oi, k2
    for j in range(n):
        oi = <int>order[j]
        ok = True
        for k in range(kept):
            i = <int>keep[k]
            if (bounds[oi, 0] > bounds[i, 2] or bounds[i, 0] > bounds[oi, 2]
                    or bounds[oi, 1] > bounds[i, 3] or bounds[i, 1] > bounds[oi, 3]):
                continue
            for k2 in range(4):
                qx[k2] = quads[oi, k2, 0]; qy[k2] = quads[oi, k2, 1]
                rx[k2] = quads[i, k2, 0]; ry[k2] = quads[i, k2, 1]
            if _quad_iou(qx, qy, rx, ry) > iou_threshold:
                ok = False
                break
        if ok:
            keep[kept] = oi
            kept += 1
    return keep_arr[:kept].copy()


def lanms_merge(double[:, ::1] boxes, double iou_threshold):
    cdef int n = boxes.shape[0]
    pool_arr = np.empty((n, 6), dtype=np.float64)
    cdef double[:, ::1] pool = pool_arr
    cdef int m = 0
    cdef double lastx[4]
    cdef double lasty[4]
    cdef double qx[4]
    cdef double qy[4]
    cdef double last_s = 0.0
    cdef bint have_last = False
    cdef double s, wsum
    cdef int i, k
    for i in range(n):
        _corners(boxes[i, 0], boxes[i, 1], boxes[i, 2], boxes[i, 3],
                 boxes[i, 4], qx, qy)
        s = boxes[i, 5]
        if have_last and _quad_iou(qx, qy, lastx, lasty) > iou_threshold:
            wsum = last_s + s
            for k in range(4):
                lastx[k] = (lastx[k] * last_s + qx[k] * s) / wsum
                lasty[k] = (lasty[k] * last_s + qy[k] * s) / wsum
            if s > last_s:
                last_s = s
        else:
            if have_last:
                _fit_box(lastx, lasty, last_s, pool, m)
                m += 1
            for k in range(4):
                lastx[k] = qx[k]
                lasty[k] = qy[k]
            last_s = s
            have_last = True
    if have_last:
        _fit_box(lastx, lasty, last_s, pool, m)
        m += 1
    return pool_arr[:m].copy()


cdef void _fit_box(double* qx, double* qy, double score,
                   double[:, ::1] out, int row) nogil:
    cdef double dx = (qx[1] - qx[0]) + (qx[2] - qx[3])
    cdef double dy = (qy[1] - qy[0]) + (qy[2] - qy[3])
    cdef double angle
    if dx == 0.0 and dy == 0.0:
        angle = 0.0
    else:
        angle = _norm_angle(atan2(dy, dx))
    cdef double c = cos(angle)
    cdef double s = sin(angle)
    cdef double u, v
    cdef double umin = 0.0, umax = 0.0, vmin = 0.0, vmax = 0.0
    cdef int i
    for i in range(4):
        u = qx[i] * c + qy[i] * s
        v = -qx[i] * s + qy[i] * c
        if i == 0:
            umin = umax = u
            vmin = vmax = v
        else:
            if u < umin: umin = u
            if u > umax: umax = u
            if v < vmin: vmin = v
            if v > vmax: vmax = v
    cdef double uc = 0.5 * (umin + umax)
    cdef double vc = 0.5 * (vmin + vmax)
    out[row, 0] = uc * c - vc * s
    out[row, 1] = uc * s + vc * c
    out[row, 2] = umax - umin
    out[row, 3] = vmax - vmin
    out[row, 4] = angle
    out[row, 5] = score


def label_components(cnp.uint8_t[:, ::1] mask):
    cdef int h = mask.shape[0]
    cdef int w = mask.shape[1]
    labels_arr = np.zeros((h, w), dtype=np.int32)
    cdef cnp.int32_t[:, ::1] labels = labels_arr
    parent_arr = np.zeros(h * w // 2 + 2, dtype=np.int32)
    cdef cnp.int32_t[::1] parent = parent_arr
    cdef int next_label = 1
    cdef int x, y, best, r, root
    cdef int neigh[4]
    cdef int ncount, t

    for y in range(h):
        for x in range(w):
            if mask[y, x] == 0:
                continue
            ncount = 0
            if x > 0 and labels[y, x - 1] != 0:
                neigh[ncount] = labels[y, x - 1]; ncount += 1
            if y > 0:
                if x > 0 and labels[y - 1, x - 1] != 0:
                    neigh[ncount] = labels[y - 1, x - 1]; ncount += 1
                if labels[y - 1, x] != 0:
                    neigh[ncount] = labels[y - 1, x]; ncount += 1
                if x + 1 < w and labels[y - 1, x + 1] != 0:
                    neigh[ncount] = labels[y - 1, x + 1]; ncount += 1
            if ncount == 0:
                parent[next_label] = next_label
                labels[y, x] = next_label
                next_label += 1
                continue
            best = 0
            for t in range(ncount):
                root = neigh[t]
                while parent[root] != root:
                    root = parent[root]
                neigh[t] = root
                if best == 0 or root < best:
                    best = root
            for t in range(ncount):
                if neigh[t] != best:
                    parent[neigh[t]] = best
            labels[y, x] = best

    remap_arr = np.zeros(next_label, dtype=np.int32)
    cdef cnp.int32_t[::1] remap = remap_arr
    cdef int count = 0
    cdef int lbl
    for y in range(h):
        for x in range(w):
            lbl = labels[y, x]
            if lbl == 0:
                continue
            root = lbl
            while parent[root] != root:
                root = parent[root]
            if remap[root] == 0:
                count += 1
                remap[root] = count
            labels[y, x] = remap[root]
    return labels_arr, count
