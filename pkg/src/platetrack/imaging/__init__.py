from .buffer import ImageBuffer
from .ops import (
    Threshold,
    crop_rotated,
    equalize_histogram,
    equalize_lut,
    gaussian_blur,
    gaussian_kernel,
    histogram,
    otsu_threshold,
    resize_bilinear,
    sample_bilinear,
    threshold_binary,
    to_grayscale,
)
from .pnm import encode_pnm, load_pnm, parse_pnm, save_pnm

__all__ = [
    "ImageBuffer",
    "Threshold",
    "crop_rotated",
    "encode_pnm",
    "equalize_histogram",
    "equalize_lut",
    "gaussian_blur",
    "gaussian_kernel",
    "histogram",
    "load_pnm",
    "otsu_threshold",
    "parse_pnm",
    "resize_bilinear",
    "sample_bilinear",
    "save_pnm",
    "threshold_binary",
    "to_grayscale",
]
