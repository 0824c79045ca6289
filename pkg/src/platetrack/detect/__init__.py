from .boxes import DetectorConfig, RotatedBox, boxes_to_rows, rows_to_boxes
from .decode import decode_east, encode_east
from .filters import clipped_measurements, filter_plate_candidates, mean_interior_value
from .heuristic import detect_heuristic, sobel_vertical_magnitude
from .maps import GeometryMap, ScoreMap, load_tensor, save_tensor
from .nms import iou_rotated, nms_locality_aware, nms_standard

__all__ = [
    "DetectorConfig",
    "GeometryMap",
    "RotatedBox",
    "ScoreMap",
    "boxes_to_rows",
    "clipped_measurements",
    "decode_east",
    "detect_heuristic",
    "encode_east",
    "filter_plate_candidates",
    "iou_rotated",
    "load_tensor",
    "mean_interior_value",
    "nms_locality_aware",
    "nms_standard",
    "rows_to_boxes",
    "save_tensor",
    "sobel_vertical_magnitude",
]
