"""Per-cell score/geometry grids and their binary tensor-file format.

The EMAP container replaces live network inference: magic "EMAP",
little-endian u32 version (=1), rows, cols, channels, then
rows*cols*channels little-endian f32 laid out cell-major then channel.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass

import numpy as np

from ..errors import ArgumentError, FormatError

MAGIC = b"EMAP"
VERSION = 1
_HEADER = struct.Struct("<4sIIII")
GEOMETRY_CHANNELS = 5  # d_top, d_right, d_bottom, d_left, theta
MAX_CELLS = 1 << 28  # dim-overflow guard for rows*cols*channels


@dataclass(frozen=True)
class ScoreMap:
    """Text-presence probability per cell; `stride` image pixels per cell."""

    values: np.ndarray  # float32 (rows, cols) in [0, 1]
    stride: int = 4

    @property
    def rows(self) -> int:
        return self.values.shape[0]

    @property
    def cols(self) -> int:
        return self.values.shape[1]


@dataclass(frozen=True)
class GeometryMap:
    """Per-cell rotated-box geometry: four edge distances plus an angle."""

    values: np.ndarray  # float32 (rows, cols, 5); distances >= 0
    stride: int = 4

    @property
    def rows(self) -> int:
        return self.values.shape[0]

    @property
    def cols(self) -> int:
        return self.values.shape[1]


def load_tensor(path, stride: int = 4):
    """Read an EMAP file; channels=1 gives a ScoreMap, 5 a GeometryMap."""
    with open(path, "rb") as fh:
        blob = fh.read()
    if len(blob) < _HEADER.size:
        raise FormatError("file shorter than EMAP header", offset=len(blob))
    magic, version, rows, cols, channels = _HEADER.unpack_from(blob, 0)
    if magic != MAGIC:
        raise FormatError(f"bad magic {magic!r}, want {MAGIC!r}", offset=0)
    if version != VERSION:
        raise FormatError(f"unsupported version {version}", offset=4)
    count = rows * cols * channels
    if rows == 0 or cols == 0 or count > MAX_CELLS:
        raise FormatError(f"dimension overflow: {rows}x{cols}x{channels}", offset=8)
    expected = _HEADER.size + 4 * count
    if len(blob) != expected:
        raise FormatError(
            f"payload length mismatch: expected {expected} bytes, got {len(blob)}",
            offset=min(len(blob), expected),
        )
    values = (
        np.frombuffer(blob, dtype="<f4", offset=_HEADER.size)
        .reshape(rows, cols, channels)
        .copy()  # frombuffer views are read-only
    )
    if not np.isfinite(values).all():
        raise FormatError("non-finite value in payload", offset=_HEADER.size)
    if channels == 1:
        plane = np.ascontiguousarray(values[:, :, 0])
        if plane.min() < 0.0 or plane.max() > 1.0:
            raise FormatError("score outside [0, 1]", offset=_HEADER.size)
        return ScoreMap(values=plane, stride=stride)
    if channels == GEOMETRY_CHANNELS:
        if values[:, :, :4].min() < 0.0:
            raise FormatError("negative edge distance", offset=_HEADER.size)
        return GeometryMap(values=np.ascontiguousarray(values), stride=stride)
    raise FormatError(f"unsupported channel count {channels}, want 1 or 5", offset=16)


def save_tensor(path, values: np.ndarray) -> None:
    """Write a (rows, cols) or (rows, cols, channels) float array as EMAP."""
    arr = np.asarray(values, dtype=np.float32)
    if arr.ndim == 2:
        arr = arr[:, :, None]
    if arr.ndim != 3:
        raise ArgumentError(f"expected 2-D or 3-D array, got shape {arr.shape}")
    rows, cols, channels = arr.shape
    with open(path, "wb") as fh:
        fh.write(_HEADER.pack(MAGIC, VERSION, rows, cols, channels))
        fh.write(np.ascontiguousarray(arr, dtype="<f4").tobytes())
