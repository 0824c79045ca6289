from .reader import (
    DEFAULT_PLATE_PATTERN,
    PlateRead,
    ReaderParams,
    compile_plate_pattern,
    recognize_plate,
    validate_format,
)
from .segments import CharSegment, SegmentParams, segment_characters
from .templates import (
    GLYPH_H,
    GLYPH_W,
    TemplateLibrary,
    build_template_library,
    builtin_template_library,
    match_glyph,
    write_glyph_dir,
)

__all__ = [
    "DEFAULT_PLATE_PATTERN",
    "CharSegment",
    "GLYPH_H",
    "GLYPH_W",
    "PlateRead",
    "ReaderParams",
    "SegmentParams",
    "TemplateLibrary",
    "build_template_library",
    "builtin_template_library",
    "compile_plate_pattern",
    "match_glyph",
    "recognize_plate",
    "segment_characters",
    "validate_format",
    "write_glyph_dir",
]
