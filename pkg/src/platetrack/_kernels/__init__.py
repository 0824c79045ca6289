"""Kernel selection: compiled extension when available, pure Python otherwise.

Set ``PLATETRACK_FORCE_FALLBACK=1`` to skip the extension (used by the
benchmark and the parity tests). ``BACKEND`` names the active choice.
"""

import os

from . import fallback

if os.environ.get("PLATETRACK_FORCE_FALLBACK") == "1":
    _impl = fallback
    BACKEND = "fallback"
else:
    try:
        from . import _native as _impl  # type: ignore[no-redef]

        BACKEND = "native"
    except ImportError:
        _impl = fallback
        BACKEND = "fallback"

decode_rbox = _impl.decode_rbox
nms_greedy = _impl.nms_greedy
lanms_merge = _impl.lanms_merge
quad_iou = _impl.quad_iou
quad_intersection_area = _impl.quad_intersection_area
label_components = _impl.label_components

# geometry helpers with no hot-loop cost live only in the fallback module
normalize_angle = fallback.normalize_angle
box_corners = fallback.box_corners
polygon_area = fallback.polygon_area
clip_polygon = fallback.clip_polygon
quad_to_box = fallback.quad_to_box
