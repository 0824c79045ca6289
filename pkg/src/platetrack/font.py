"""Built-in 5x7 bitmap font for the A-Z / 0-9 whitelist.

Used to seed template libraries and to render synthetic plates for tests
and demos. Every glyph is pairwise distinct; '0' carries a slash and 'I'
serifs so the usual lookalike pairs stay separable at small sizes.
"""

from __future__ import annotations

import numpy as np

from .imaging import ImageBuffer

GLYPH_ROWS = 7
GLYPH_COLS = 5

_FONT = {
    "A": (".###.", "#...#", "#...#", "#####", "#...#", "#...#", "#...#"),
    "B": ("####.", "#...#", "#...#", "####.", "#...#", "#...#", "####."),
    "C": (".###.", "#...#", "#....", "#....", "#....", "#...#", ".###."),
    "D": ("####.", "#...#", "#...#", "#...#", "#...#", "#...#", "####."),
    "E": ("#####", "#....", "#....", "####.", "#....", "#....", "#####"),
    "F": ("#####", "#....", "#....", "####.", "#....", "#....", "#...."),
    "G": (".###.", "#...#", "#....", "#.###", "#...#", "#...#", ".####"),
    "H": ("#...#", "#...#", "#...#", "#####", "#...#", "#...#", "#...#"),
    "I": ("#####", "..#..", "..#..", "..#..", "..#..", "..#..", "#####"),
    "J": ("..###", "...#.", "...#.", "...#.", "...#.", "#..#.", ".##.."),
    "K": ("#...#", "#..#.", "#.#..", "##...", "#.#..", "#..#.", "#...#"),
    "L": ("#....", "#....", "#....", "#....", "#....", "#....", "#####"),
    "M": ("#...#", "##.##", "#.#.#", "#.#.#", "#...#", "#...#", "#...#"),
    "N": ("#...#", "##..#", "#.#.#", "#..##", "#...#", "#...#", "#...#"),
    "O": (".###.", "#...#", "#...#", "#...#", "#...#", "#...#", ".###."),
    "P": ("####.", "#...#", "#...#", "####.", "#....", "#....", "#...."),
    "Q": (".###.", "#...#", "#...#", "#...#", "#.#.#", "#..#.", ".##.#"),
    "R": ("####.", "#...#", "#...#", "####.", "#.#..", "#..#.", "#...#"),
    "S": (".####", "#....", "#....", ".###.", "....#", "....#", "####."),
    "T": ("#####", "..#..", "..#..", "..#..", "..#..", "..#..", "..#.."),
    "U": ("#...#", "#...#", "#...#", "#...#", "#...#", "#...#", ".###."),
    "V": ("#...#", "#...#", "#...#", "#...#", "#...#", ".#.#.", "..#.."),
    "W": ("#...#", "#...#", "#...#", "#.#.#", "#.#.#", "##.##", "#...#"),
    "X": ("#...#", "#...#", ".#.#.", "..#..", ".#.#.", "#...#", "#...#"),
    "Y": ("#...#", "#...#", ".#.#.", "..#..", "..#..", "..#..", "..#.."),
    "Z": ("#####", "....#", "...#.", "..#..", ".#...", "#....", "#####"),
    "0": (".###.", "#...#", "#..##", "#.#.#", "##..#", "#...#", ".###."),
    "1": ("..#..", ".##..", "..#..", "..#..", "..#..", "..#..", ".###."),
    "2": (".###.", "#...#", "....#", "...#.", "..#..", ".#...", "#####"),
    "3": ("####.", "....#", "....#", ".###.", "....#", "....#", "####."),
    "4": ("...#.", "..##.", ".#.#.", "#..#.", "#####", "...#.", "...#."),
    "5": ("#####", "#....", "####.", "....#", "....#", "#...#", ".###."),
    "6": ("..##.", ".#...", "#....", "####.", "#...#", "#...#", ".###."),
    "7": ("#####", "....#", "...#.", "..#..", ".#...", ".#...", ".#..."),
    "8": (".###.", "#...#", "#...#", ".###.", "#...#", "#...#", ".###."),
    "9": (".###.", "#...#", "#...#", ".####", "....#", "...#.", ".##.."),
}

WHITELIST = "ABCDEFGHIJKLMNOPQRSTUVWXYZ0123456789"


def glyph_bitmap(char: str) -> np.ndarray:
    """Boolean (7, 5) array for a whitelist character."""
    rows = _FONT[char]
    return np.array([[c == "#" for c in row] for row in rows], dtype=bool)


def _scale_bitmap(bitmap: np.ndarray, width: int, height: int, fg: int, bg: int) -> ImageBuffer:
    rows, cols = bitmap.shape
    sx = (np.arange(width) * cols) // width
    sy = (np.arange(height) * rows) // height
    scaled = bitmap[np.ix_(sy, sx)]
    return ImageBuffer.from_array(np.where(scaled, fg, bg).astype(np.uint8))


def render_glyph(char: str, width: int, height: int, fg: int = 255, bg: int = 0) -> ImageBuffer:
    """Nearest-neighbor scale of the full glyph cell to width x height."""
    return _scale_bitmap(glyph_bitmap(char), width, height, fg, bg)


def render_glyph_tight(char: str, width: int, height: int, fg: int = 255, bg: int = 0) -> ImageBuffer:
    """Like render_glyph but cropped to the inked bounding box first.

    This matches how segmentation sees characters (component bounding
    boxes), so templates built from these compare like-for-like.
    """
    bitmap = glyph_bitmap(char)
    ys, xs = np.nonzero(bitmap)
    tight = bitmap[ys.min() : ys.max() + 1, xs.min() : xs.max() + 1]
    return _scale_bitmap(tight, width, height, fg, bg)
