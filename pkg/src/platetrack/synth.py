"""Synthetic plates, frames and detection maps with ground truth.

Everything the test corpus and the demo flow need without real camera
data: rendered plates from the built-in font, frames with planted plates,
and matching score/geometry tensors for the map-decoding backend.
"""

from __future__ import annotations

import json
import math
import os
from dataclasses import dataclass

import numpy as np

from .detect import RotatedBox, encode_east, save_tensor
from .font import WHITELIST, render_glyph
from .imaging import ImageBuffer, save_pnm

LETTERS = WHITELIST[:26]
DIGITS = WHITELIST[26:]

# tight enough that the heuristic detector's horizontal closing joins all
# characters into a single blob
DENSE_STYLE_KW = dict(char_width=14, char_height=24, spacing=2, margin=4)


@dataclass(frozen=True)
class PlateStyle:
    char_width: int = 20
    char_height: int = 28
    spacing: int = 6
    margin: int = 8
    ink: int = 15
    background: int = 240


def render_plate(text: str, style: PlateStyle = PlateStyle()) -> ImageBuffer:
    """Dark text on a light plate, one glyph cell per character."""
    n = len(text)
    w = 2 * style.margin + n * style.char_width + (n - 1) * style.spacing
    h = 2 * style.margin + style.char_height
    canvas = np.full((h, w), style.background, dtype=np.uint8)
    x = style.margin
    for char in text:
        glyph = render_glyph(char, style.char_width, style.char_height, fg=255, bg=0)
        cell = canvas[style.margin : style.margin + style.char_height, x : x + style.char_width]
        cell[glyph.pixels == 255] = style.ink
        x += style.char_width + style.spacing
    return ImageBuffer.from_array(canvas)


def add_gaussian_noise(img: ImageBuffer, sigma: float, rng: np.random.Generator) -> ImageBuffer:
    if sigma <= 0:
        return img.copy()
    noisy = img.pixels.astype(np.float64) + rng.normal(0.0, sigma, img.pixels.shape)
    return ImageBuffer.from_array(np.clip(np.floor(noisy + 0.5), 0, 255).astype(np.uint8))


def place_plate(frame: np.ndarray, plate: ImageBuffer, x0: int, y0: int) -> RotatedBox:
    """Paste a plate into a frame array; returns the ground-truth box."""
    h, w = plate.height, plate.width
    frame[y0 : y0 + h, x0 : x0 + w] = plate.pixels
    return RotatedBox.axis_aligned(x0, y0, x0 + w, y0 + h, score=1.0)


def random_plate_text(rng: np.random.Generator) -> str:
    """Random string matching the default plate pattern."""

    def pick(alphabet: str, count: int) -> str:
        return "".join(alphabet[int(rng.integers(len(alphabet)))] for _ in range(count))

    return (
        pick(LETTERS, 2)
        + pick(DIGITS, int(rng.integers(1, 3)))
        + pick(LETTERS, int(rng.integers(1, 3)))
        + pick(DIGITS, 4)
    )


def render_frame(
    frame_w: int,
    frame_h: int,
    text: str,
    at: tuple[int, int],
    style: PlateStyle = PlateStyle(),
    frame_background: int = 96,
    noise_sigma: float = 0.0,
    rng: np.random.Generator | None = None,
) -> tuple[ImageBuffer, RotatedBox]:
    """A gray frame with one planted plate and its ground-truth box."""
    canvas = np.full((frame_h, frame_w), frame_background, dtype=np.uint8)
    plate = render_plate(text, style)
    box = place_plate(canvas, plate, at[0], at[1])
    frame = ImageBuffer.from_array(canvas)
    if noise_sigma > 0:
        if rng is None:
            raise ValueError("noise requires an rng")
        frame = add_gaussian_noise(frame, noise_sigma, rng)
    return frame, box


def encode_east_region(
    boxes: list[RotatedBox],
    rows: int,
    cols: int,
    stride: int = 4,
    shrink: float = 0.3,
    rng: np.random.Generator | None = None,
) -> tuple[np.ndarray, np.ndarray]:
    """Dense detector-style maps: every cell inside a box's shrunk core
    carries that cell's own distances to the box edges.

    Unlike the one-hot `encode_east`, this mimics real network output, so
    decoding yields one candidate per interior cell and suppression has
    real merging work to do. Scores are drawn from [0.85, 0.99] when an rng
    is given, else fixed at the box score.
    """
    scores = np.zeros((rows, cols), dtype=np.float32)
    geom = np.zeros((rows, cols, 5), dtype=np.float32)
    for box in boxes:
        c = math.cos(box.angle)
        s = math.sin(box.angle)
        half_w = box.w / 2.0 * (1.0 - shrink)
        half_h = box.h / 2.0 * (1.0 - shrink)
        corners = box.corners()
        c0 = max(0, int(corners[:, 0].min() // stride))
        c1 = min(cols - 1, int(corners[:, 0].max() // stride) + 1)
        r0 = max(0, int(corners[:, 1].min() // stride))
        r1 = min(rows - 1, int(corners[:, 1].max() // stride) + 1)
        for r in range(r0, r1 + 1):
            for cc in range(c0, c1 + 1):
                px = cc * stride
                py = r * stride
                dx = px - box.cx
                dy = py - box.cy
                u = c * dx + s * dy
                v = -s * dx + c * dy
                if abs(u) > half_w or abs(v) > half_h:
                    continue
                scores[r, cc] = (
                    box.score if rng is None else float(rng.uniform(0.85, 0.99))
                )
                geom[r, cc] = (
                    box.h / 2.0 + v,  # d_top: distance to the top edge
                    box.w / 2.0 - u,  # d_right
                    box.h / 2.0 - v,  # d_bottom
                    box.w / 2.0 + u,  # d_left
                    box.angle,
                )
    return scores, geom


def write_detection_maps(
    path_prefix: str,
    boxes: list[RotatedBox],
    frame_w: int,
    frame_h: int,
    stride: int = 4,
) -> None:
    """Save `<prefix>.score.emap` / `<prefix>.geom.emap` for the frame."""
    rows = math.ceil(frame_h / stride)
    cols = math.ceil(frame_w / stride)
    scores, geom = encode_east(boxes, rows, cols, stride=stride)
    save_tensor(path_prefix + ".score.emap", scores)
    save_tensor(path_prefix + ".geom.emap", geom)


def make_corpus(
    out_dir,
    n_frames: int,
    n_plates: int,
    seed: int = 7,
    backend: str = "east",
    frame_w: int = 640,
    frame_h: int = 360,
    noise_sigma: float = 4.0,
    stride: int = 4,
    frames_per_plate_burst: int | None = None,
) -> dict:
    """Write frames (plus EMAP maps for the east backend) and truth.json.

    A pool of `n_plates` random plate texts is cycled through the frames in
    bursts, mimicking a vehicle staying in view for consecutive frames.
    Returns the truth structure that is also written to truth.json.
    """
    rng = np.random.default_rng(seed)
    os.makedirs(out_dir, exist_ok=True)
    plates = []
    while len(plates) < n_plates:
        text = random_plate_text(rng)
        if text not in plates:
            plates.append(text)
    burst = frames_per_plate_burst or max(1, n_frames // n_plates)
    style = PlateStyle() if backend == "east" else PlateStyle(**DENSE_STYLE_KW)
    truth = {"frames": []}
    for idx in range(n_frames):
        text = plates[min(idx // burst, n_plates - 1)]
        plate_img = render_plate(text, style)
        max_x = frame_w - plate_img.width - 8
        max_y = frame_h - plate_img.height - 8
        x0 = 8 + int(rng.integers(max(1, max_x - 8)))
        y0 = 8 + int(rng.integers(max(1, max_y - 8)))
        frame, box = render_frame(
            frame_w,
            frame_h,
            text,
            (x0, y0),
            style=style,
            noise_sigma=noise_sigma,
            rng=rng,
        )
        name = f"frame_{idx:05d}"
        save_pnm(frame, os.path.join(out_dir, name + ".pgm"))
        if backend == "east":
            truth_box = RotatedBox(
                cx=box.cx, cy=box.cy, w=box.w, h=box.h, angle=box.angle, score=0.95
            )
            write_detection_maps(
                os.path.join(out_dir, name), [truth_box], frame_w, frame_h, stride=stride
            )
        truth["frames"].append(
            {"file": name + ".pgm", "plates": [{"text": text, "box": box.to_json()}]}
        )
    with open(os.path.join(out_dir, "truth.json"), "w") as fh:
        json.dump(truth, fh, indent=1)
    return truth
