"""2-D pixel raster shared by every imaging operation."""

from __future__ import annotations

import numpy as np

from ..errors import ArgumentError


class ImageBuffer:
    """Grayscale (1 channel) or RGB (3 channel) 8-bit image.

    Backed by a numpy array of shape (height, width) or (height, width, 3);
    the flat sample order is row-major, matching the PNM payload layout.
    """

    __slots__ = ("pixels",)

    def __init__(self, width: int, height: int, channels: int, data):
        if width <= 0 or height <= 0:
            raise ArgumentError(f"image dimensions must be positive, got {width}x{height}")
        if channels not in (1, 3):
            raise ArgumentError(f"channels must be 1 or 3, got {channels}")
        arr = np.frombuffer(bytes(data), dtype=np.uint8) if isinstance(data, (bytes, bytearray)) else np.asarray(data, dtype=np.uint8).reshape(-1)
        expected = width * height * channels
        if arr.size != expected:
            raise ArgumentError(
                f"data length {arr.size} != width*height*channels = {expected}"
            )
        shape = (height, width) if channels == 1 else (height, width, 3)
        self.pixels = arr.reshape(shape).copy()

    @classmethod
    def from_array(cls, arr) -> "ImageBuffer":
        """Wrap a (h, w) or (h, w, 3) uint8-compatible array."""
        arr = np.asarray(arr)
        if arr.ndim == 2:
            channels = 1
        elif arr.ndim == 3 and arr.shape[2] == 3:
            channels = 3
        else:
            raise ArgumentError(f"expected (h, w) or (h, w, 3) array, got shape {arr.shape}")
        h, w = arr.shape[:2]
        obj = cls.__new__(cls)
        if w <= 0 or h <= 0:
            raise ArgumentError(f"image dimensions must be positive, got {w}x{h}")
        obj.pixels = np.ascontiguousarray(arr, dtype=np.uint8)
        return obj

    @classmethod
    def full(cls, width: int, height: int, value: int = 0, channels: int = 1) -> "ImageBuffer":
        shape = (height, width) if channels == 1 else (height, width, 3)
        return cls.from_array(np.full(shape, value, dtype=np.uint8))

    @property
    def width(self) -> int:
        return self.pixels.shape[1]

    @property
    def height(self) -> int:
        return self.pixels.shape[0]

    @property
    def channels(self) -> int:
        return 1 if self.pixels.ndim == 2 else 3

    @property
    def data(self) -> bytes:
        """Row-major samples, length width*height*channels."""
        return self.pixels.tobytes()

    def at(self, x: int, y: int):
        """Bounds-checked pixel read: int for gray, (r, g, b) for RGB."""
        if not (0 <= x < self.width and 0 <= y < self.height):
            raise IndexError(f"pixel ({x},{y}) outside {self.width}x{self.height} image")
        v = self.pixels[y, x]
        return int(v) if self.channels == 1 else tuple(int(c) for c in v)

    def copy(self) -> "ImageBuffer":
        return ImageBuffer.from_array(self.pixels.copy())

    def __eq__(self, other) -> bool:
        if not isinstance(other, ImageBuffer):
            return NotImplemented
        return self.pixels.shape == other.pixels.shape and bool(
            np.array_equal(self.pixels, other.pixels)
        )

    def __repr__(self) -> str:
        return f"ImageBuffer({self.width}x{self.height}, channels={self.channels})"
