"""Binary PGM (P5) and PPM (P6) reader/writer, maxval 255 only."""

from __future__ import annotations

from ..errors import FormatError
from .buffer import ImageBuffer

_WHITESPACE = b" \t\r\n\v\f"


class _Scanner:
    """Tracks a byte offset through the PNM header for error reporting."""

    def __init__(self, blob: bytes):
        self.blob = blob
        self.pos = 0

    def skip_separators(self) -> None:
        # whitespace and '#' comments (comments run to end of line)
        blob = self.blob
        while self.pos < len(blob):
            b = blob[self.pos : self.pos + 1]
            if b == b"#":
                while self.pos < len(blob) and blob[self.pos : self.pos + 1] != b"\n":
                    self.pos += 1
            elif b in _WHITESPACE:
                self.pos += 1
            else:
                return

    def integer(self, what: str) -> int:
        self.skip_separators()
        start = self.pos
        blob = self.blob
        while self.pos < len(blob):
            b = blob[self.pos : self.pos + 1]
            if b in _WHITESPACE or b == b"#":
                break
            self.pos += 1
        tok = blob[start : self.pos]
        if not tok:
            raise FormatError(f"missing {what} in header", offset=start)
        if not tok.isdigit():
            raise FormatError(f"bad {what} {tok!r}", offset=start)
        return int(tok)


def parse_pnm(blob: bytes) -> ImageBuffer:
    """Decode an in-memory PNM blob; errors name the offending byte offset."""
    magic = blob[:2]
    if magic == b"P5":
        channels = 1
    elif magic == b"P6":
        channels = 3
    else:
        raise FormatError(f"unsupported magic {magic!r}, want P5 or P6", offset=0)
    sc = _Scanner(blob)
    sc.pos = 2
    width = sc.integer("width")
    height = sc.integer("height")
    maxval_at = sc.pos
    maxval = sc.integer("maxval")
    if width <= 0 or height <= 0:
        raise FormatError(f"non-positive dimensions {width}x{height}", offset=2)
    if maxval != 255:
        raise FormatError(f"unsupported maxval {maxval}, want 255", offset=maxval_at)
    if sc.pos >= len(blob):
        raise FormatError("header ends before payload", offset=sc.pos)
    # exactly one whitespace byte separates maxval from the payload
    sc.pos += 1
    expected = width * height * channels
    payload = blob[sc.pos : sc.pos + expected]
    if len(payload) < expected:
        raise FormatError(
            f"truncated payload: expected {expected} bytes, got {len(payload)}",
            offset=sc.pos + len(payload),
        )
    return ImageBuffer(width, height, channels, payload)


def load_pnm(path) -> ImageBuffer:
    with open(path, "rb") as fh:
        return parse_pnm(fh.read())


def save_pnm(img: ImageBuffer, path) -> None:
    """Write `img` so that load_pnm round-trips bit-identically."""
    with open(path, "wb") as fh:
        fh.write(encode_pnm(img))


def encode_pnm(img: ImageBuffer) -> bytes:
    magic = b"P5" if img.channels == 1 else b"P6"
    return b"%s\n%d %d\n255\n" % (magic, img.width, img.height) + img.data
