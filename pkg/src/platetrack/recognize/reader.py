"""Full plate reading: preprocess, segment, match, and format validation."""

from __future__ import annotations

import re
from dataclasses import dataclass, field

from ..errors import ConfigError
from ..imaging import (
    ImageBuffer,
    Threshold,
    equalize_histogram,
    equalize_lut,
    gaussian_blur,
    otsu_threshold,
    threshold_binary,
    to_grayscale,
)
from ..detect.boxes import RotatedBox
from .segments import SegmentParams, segment_characters
from .templates import TemplateLibrary, match_glyph

DEFAULT_PLATE_PATTERN = r"^[A-Z]{2}[0-9]{1,2}[A-Z]{1,2}[0-9]{4}$"


@dataclass(frozen=True)
class ReaderParams:
    blur_sigma: float = 1.0
    blur_ksize: int = 3
    reject_threshold: float = 0.55
    segment: SegmentParams = field(default_factory=SegmentParams)


@dataclass(frozen=True)
class PlateRead:
    """Recognized plate text with per-character confidences."""

    text: str
    char_confidences: tuple[float, ...]
    source_box: RotatedBox | None = None

    @property
    def mean_confidence(self) -> float:
        if not self.char_confidences:
            return 0.0
        return sum(self.char_confidences) / len(self.char_confidences)

    def to_json(self) -> dict:
        return {
            "text": self.text,
            "char_confidences": list(self.char_confidences),
            "mean_confidence": self.mean_confidence,
            "source_box": self.source_box.to_json() if self.source_box else None,
        }


def recognize_plate(
    crop: ImageBuffer,
    lib: TemplateLibrary,
    params: ReaderParams = ReaderParams(),
    source_box: RotatedBox | None = None,
) -> PlateRead:
    """Grayscale -> blur -> equalize -> Otsu threshold -> segment -> match.

    The Otsu cut is found on the blurred histogram and carried through the
    (monotone) equalization map: equalization flattens the histogram by
    construction, which would drag a post-equalization Otsu toward a plain
    median split on noisy crops.

    Characters scoring under the reject threshold are dropped from the
    output; an empty segmentation yields empty text with confidence 0.
    """
    gray = to_grayscale(crop)
    smoothed = gaussian_blur(gray, params.blur_sigma, params.blur_ksize)
    equalized = equalize_histogram(smoothed)
    cut = int(equalize_lut(smoothed)[otsu_threshold(smoothed)])
    binary = threshold_binary(equalized, Threshold(value=cut, mode="otsu"))
    segments = segment_characters(binary, params.segment)
    chars = []
    confidences = []
    for seg in segments:
        char, confidence = match_glyph(seg, lib)
        if confidence < params.reject_threshold:
            continue
        chars.append(char)
        confidences.append(confidence)
    return PlateRead(
        text="".join(chars),
        char_confidences=tuple(confidences),
        source_box=source_box,
    )


def compile_plate_pattern(pattern: str) -> re.Pattern:
    try:
        return re.compile(pattern)
    except re.error as exc:
        raise ConfigError(f"invalid plate pattern {pattern!r}: {exc}") from exc


def validate_format(text: str, pattern: str | re.Pattern = DEFAULT_PLATE_PATTERN) -> bool:
    """True iff the whole string matches the configured plate pattern."""
    compiled = compile_plate_pattern(pattern) if isinstance(pattern, str) else pattern
    return compiled.fullmatch(text) is not None
