"""Preprocessing primitives: grayscale, blur, equalize, threshold, resize, crop.

All operations are pure; none mutate their input buffer. Fractional pixel
values round half-up (floor(x + 0.5)) before the uint8 cast.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ..errors import ArgumentError
from .buffer import ImageBuffer


def _round_u8(values: np.ndarray) -> np.ndarray:
    return np.clip(np.floor(values + 0.5), 0, 255).astype(np.uint8)


def to_grayscale(img: ImageBuffer) -> ImageBuffer:
    """BT.601 luma: round(0.299 R + 0.587 G + 0.114 B); gray passes through."""
    if img.channels == 1:
        return img.copy()
    rgb = img.pixels.astype(np.float64)
    gray = 0.299 * rgb[:, :, 0] + 0.587 * rgb[:, :, 1] + 0.114 * rgb[:, :, 2]
    return ImageBuffer.from_array(_round_u8(gray))


def gaussian_kernel(sigma: float, ksize: int) -> np.ndarray:
    """Normalized 1-D kernel k[i] = exp(-i^2 / 2 sigma^2), i centered."""
    if ksize < 1 or ksize % 2 == 0:
        raise ArgumentError(f"ksize must be odd and >= 1, got {ksize}")
    if sigma <= 0:
        raise ArgumentError(f"sigma must be positive, got {sigma}")
    half = ksize // 2
    idx = np.arange(-half, half + 1, dtype=np.float64)
    k = np.exp(-(idx**2) / (2.0 * sigma * sigma))
    return k / k.sum()


def gaussian_blur(img: ImageBuffer, sigma: float, ksize: int) -> ImageBuffer:
    """Separable Gaussian with clamp-to-edge borders; ksize=1 is identity.

    Both passes run in float64 and round once at the end, so the result
    matches a direct 2-D convolution to within one gray level.
    """
    if img.channels != 1:
        raise ArgumentError("gaussian_blur expects a grayscale image")
    k = gaussian_kernel(sigma, ksize)
    if ksize == 1:
        return img.copy()
    half = ksize // 2
    src = img.pixels.astype(np.float64)
    padded = np.pad(src, ((0, 0), (half, half)), mode="edge")
    tmp = np.zeros_like(src)
    for i in range(ksize):
        tmp += k[i] * padded[:, i : i + src.shape[1]]
    padded = np.pad(tmp, ((half, half), (0, 0)), mode="edge")
    out = np.zeros_like(src)
    for i in range(ksize):
        out += k[i] * padded[i : i + src.shape[0], :]
    return ImageBuffer.from_array(_round_u8(out))


def histogram(img: ImageBuffer) -> np.ndarray:
    return np.bincount(img.pixels.reshape(-1), minlength=256).astype(np.int64)


def equalize_lut(img: ImageBuffer) -> np.ndarray:
    """The 256-entry value remap used by equalize_histogram.

    lut[v] = round((cdf(v) - cdf_min) / (N - cdf_min) * 255) with cdf_min
    the smallest nonzero CDF value; identity when the image has a single
    distinct value. The map is monotone nondecreasing.
    """
    hist = histogram(img)
    cdf = np.cumsum(hist)
    n = int(cdf[-1])
    nonzero = cdf[hist > 0]
    cdf_min = int(nonzero[0])
    if n == cdf_min:
        return np.arange(256, dtype=np.uint8)
    return _round_u8((cdf - cdf_min) / (n - cdf_min) * 255.0)


def equalize_histogram(img: ImageBuffer) -> ImageBuffer:
    """Classic CDF remap: out(v) = round((cdf(v) - cdf_min) / (N - cdf_min) * 255).

    cdf_min is the smallest nonzero CDF value. A single-valued image is
    returned unchanged (the denominator would be zero).
    """
    if img.channels != 1:
        raise ArgumentError("equalize_histogram expects a grayscale image")
    return ImageBuffer.from_array(equalize_lut(img)[img.pixels])


@dataclass(frozen=True)
class Threshold:
    """Binarization cut: fixed value or one computed by Otsu's method."""

    value: int
    mode: str = "fixed"

    @classmethod
    def fixed(cls, value: int) -> "Threshold":
        return cls(value=int(value), mode="fixed")

    @classmethod
    def otsu(cls, img: ImageBuffer) -> "Threshold":
        return cls(value=otsu_threshold(img), mode="otsu")


def otsu_threshold(img: ImageBuffer) -> int:
    """Threshold maximizing between-class variance over the 256-bin histogram.

    Classes are {v <= t} and {v > t}; ties break toward the smallest t.
    """
    if img.channels != 1:
        raise ArgumentError("otsu_threshold expects a grayscale image")
    hist = histogram(img).astype(np.float64)
    total = hist.sum()
    levels = np.arange(256, dtype=np.float64)
    w0 = np.cumsum(hist)
    m0 = np.cumsum(hist * levels)
    mean_total = m0[-1]
    w1 = total - w0
    valid = (w0 > 0) & (w1 > 0)
    between = np.zeros(256)
    with np.errstate(divide="ignore", invalid="ignore"):
        mu0 = m0 / w0
        mu1 = (mean_total - m0) / w1
        between[valid] = (w0 * w1)[valid] * (mu0 - mu1)[valid] ** 2
    return int(np.argmax(between))


def threshold_binary(img: ImageBuffer, t: Threshold) -> ImageBuffer:
    """Pixels strictly above t.value become 255, the rest 0."""
    if img.channels != 1:
        raise ArgumentError("threshold_binary expects a grayscale image")
    out = np.where(img.pixels > t.value, 255, 0).astype(np.uint8)
    return ImageBuffer.from_array(out)


def resize_bilinear(img: ImageBuffer, new_w: int, new_h: int) -> ImageBuffer:
    """Pixel-center aligned bilinear resize: src = (dst + 0.5) * scale - 0.5."""
    if new_w <= 0 or new_h <= 0:
        raise ArgumentError(f"target dimensions must be positive, got {new_w}x{new_h}")
    if new_w == img.width and new_h == img.height:
        return img.copy()
    src = img.pixels.astype(np.float64)
    h, w = img.height, img.width
    xs = np.clip((np.arange(new_w) + 0.5) * (w / new_w) - 0.5, 0, w - 1)
    ys = np.clip((np.arange(new_h) + 0.5) * (h / new_h) - 0.5, 0, h - 1)
    x0 = np.floor(xs).astype(np.int64)
    y0 = np.floor(ys).astype(np.int64)
    x1 = np.minimum(x0 + 1, w - 1)
    y1 = np.minimum(y0 + 1, h - 1)
    fx = xs - x0
    fy = ys - y0
    if img.channels == 3:
        fx = fx[None, :, None]
        fy = fy[:, None, None]
        p00 = src[y0][:, x0]
        p01 = src[y0][:, x1]
        p10 = src[y1][:, x0]
        p11 = src[y1][:, x1]
    else:
        fx = fx[None, :]
        fy = fy[:, None]
        p00 = src[np.ix_(y0, x0)]
        p01 = src[np.ix_(y0, x1)]
        p10 = src[np.ix_(y1, x0)]
        p11 = src[np.ix_(y1, x1)]
    top = p00 * (1 - fx) + p01 * fx
    bot = p10 * (1 - fx) + p11 * fx
    return ImageBuffer.from_array(_round_u8(top * (1 - fy) + bot * fy))


def sample_bilinear(pixels: np.ndarray, xs: np.ndarray, ys: np.ndarray) -> np.ndarray:
    """Sample a grayscale array at continuous points; outside reads 0.

    Continuous convention: pixel (i, j) occupies the unit square
    [i, i+1) x [j, j+1), so sampling interpolates index space at (x - 0.5,
    y - 0.5). Neighbors past the border contribute 0.
    """
    h, w = pixels.shape
    qx = xs - 0.5
    qy = ys - 0.5
    x0 = np.floor(qx).astype(np.int64)
    y0 = np.floor(qy).astype(np.int64)
    fx = qx - x0
    fy = qy - y0
    acc = np.zeros(xs.shape, dtype=np.float64)
    for dy in (0, 1):
        for dx in (0, 1):
            xi = x0 + dx
            yi = y0 + dy
            wgt = (fx if dx else 1 - fx) * (fy if dy else 1 - fy)
            inside = (xi >= 0) & (xi < w) & (yi >= 0) & (yi < h)
            vals = np.zeros(xs.shape, dtype=np.float64)
            vals[inside] = pixels[yi[inside], xi[inside]]
            acc += wgt * vals
    return acc


def crop_rotated(img: ImageBuffer, box, out_w: int, out_h: int) -> ImageBuffer:
    """Resample the oriented rectangle `box` onto an out_w x out_h grid.

    Output pixel centers map onto the box interior (u along the width axis,
    v along the height axis, rotated by box.angle about the box center);
    samples falling outside the source read as 0. Works per channel.
    """
    if out_w <= 0 or out_h <= 0:
        raise ArgumentError(f"output dimensions must be positive, got {out_w}x{out_h}")
    if box.w <= 0 or box.h <= 0:
        raise ArgumentError("degenerate box: width and height must be positive")
    us = (np.arange(out_w) + 0.5) * (box.w / out_w) - box.w / 2.0
    vs = (np.arange(out_h) + 0.5) * (box.h / out_h) - box.h / 2.0
    uu, vv = np.meshgrid(us, vs)
    c = math.cos(box.angle)
    s = math.sin(box.angle)
    xs = box.cx + c * uu - s * vv
    ys = box.cy + s * uu + c * vv
    if img.channels == 1:
        out = sample_bilinear(img.pixels.astype(np.float64), xs, ys)
        return ImageBuffer.from_array(_round_u8(out))
    planes = [
        _round_u8(sample_bilinear(img.pixels[:, :, ch].astype(np.float64), xs, ys))
        for ch in range(3)
    ]
    return ImageBuffer.from_array(np.stack(planes, axis=-1))
