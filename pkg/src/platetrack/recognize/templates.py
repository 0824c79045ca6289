"""Whitelist glyph templates and pixel-agreement matching."""

from __future__ import annotations

import os
from dataclasses import dataclass

import numpy as np

from ..errors import ArgumentError, FormatError
from ..font import WHITELIST, render_glyph_tight
from ..imaging import ImageBuffer, Threshold, load_pnm, resize_bilinear, save_pnm, threshold_binary
from .segments import CharSegment

GLYPH_W = 20
GLYPH_H = 30


@dataclass(frozen=True)
class TemplateLibrary:
    """One normalized binary glyph per whitelist character.

    Immutable after construction; safe to share across threads.
    """

    glyph_w: int
    glyph_h: int
    whitelist: str
    templates: dict[str, np.ndarray]  # char -> uint8 (glyph_h, glyph_w) of {0, 255}

    def template(self, char: str) -> np.ndarray:
        return self.templates[char]


def _normalize_glyph(img: ImageBuffer, glyph_w: int, glyph_h: int) -> np.ndarray:
    """Binarize (Otsu), crop to the inked bounding box, resize, re-binarize.

    Glyph sources must be light-on-dark (white glyph); the tight crop makes
    templates comparable with segmentation masks, which are component
    bounding boxes and therefore tight by construction.
    """
    binary = threshold_binary(img, Threshold.otsu(img))
    ys, xs = np.nonzero(binary.pixels)
    if ys.size == 0:
        raise ArgumentError("glyph image has no foreground after binarization")
    tight = ImageBuffer.from_array(
        binary.pixels[ys.min() : ys.max() + 1, xs.min() : xs.max() + 1]
    )
    resized = resize_bilinear(tight, glyph_w, glyph_h)
    return threshold_binary(resized, Threshold.fixed(127)).pixels


def build_template_library(
    glyph_dir,
    glyph_w: int = GLYPH_W,
    glyph_h: int = GLYPH_H,
    whitelist: str = WHITELIST,
) -> TemplateLibrary:
    """Load `<char>.pgm` per whitelist char, binarize (Otsu) and resize.

    Raises if a whitelist glyph is missing, a file is unreadable, or two
    files (e.g. `a.pgm` and `A.pgm`) normalize to the same character.
    """
    by_char: dict[str, str] = {}
    for name in sorted(os.listdir(glyph_dir)):
        stem, ext = os.path.splitext(name)
        if ext.lower() != ".pgm" or len(stem) != 1:
            continue
        char = stem.upper()
        if char not in whitelist:
            continue
        if char in by_char:
            raise ArgumentError(f"duplicate glyph for {char!r}: {by_char[char]} and {name}")
        by_char[char] = name
    missing = [c for c in whitelist if c not in by_char]
    if missing:
        raise ArgumentError(f"missing glyph files for: {', '.join(missing)}")
    templates = {}
    for char in whitelist:
        path = os.path.join(glyph_dir, by_char[char])
        try:
            img = load_pnm(path)
        except FormatError as exc:
            raise ArgumentError(f"unreadable glyph {by_char[char]}: {exc}") from exc
        templates[char] = _normalize_glyph(img, glyph_w, glyph_h)
    return TemplateLibrary(glyph_w=glyph_w, glyph_h=glyph_h, whitelist=whitelist, templates=templates)


def builtin_template_library(glyph_w: int = GLYPH_W, glyph_h: int = GLYPH_H) -> TemplateLibrary:
    """Library rendered from the embedded font (no files needed)."""
    templates = {
        c: render_glyph_tight(c, glyph_w, glyph_h).pixels.copy() for c in WHITELIST
    }
    return TemplateLibrary(glyph_w=glyph_w, glyph_h=glyph_h, whitelist=WHITELIST, templates=templates)


def write_glyph_dir(out_dir, glyph_w: int = GLYPH_W, glyph_h: int = GLYPH_H) -> None:
    """Materialize the embedded font as `<char>.pgm` files."""
    os.makedirs(out_dir, exist_ok=True)
    for char in WHITELIST:
        save_pnm(render_glyph_tight(char, glyph_w, glyph_h), os.path.join(out_dir, f"{char}.pgm"))


def match_glyph(seg: CharSegment, lib: TemplateLibrary) -> tuple[str, float]:
    """Best whitelist character for a segment, by pixel agreement.

    The mask is resized to the template size, re-binarized at 128, and
    scored as the fraction of pixels equal to each template. Ties break in
    whitelist order.
    """
    if seg.mask.pixels.max() == 0:
        raise ArgumentError("segment mask has no foreground pixels")
    resized = resize_bilinear(seg.mask, lib.glyph_w, lib.glyph_h)
    binary = threshold_binary(resized, Threshold.fixed(127)).pixels
    total = float(lib.glyph_w * lib.glyph_h)
    best_char = ""
    best_score = -1.0
    for char in lib.whitelist:
        score = float((binary == lib.templates[char]).sum()) / total
        if score > best_score:
            best_char = char
            best_score = score
    return best_char, best_score
