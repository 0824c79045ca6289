"""key=value config files for the service and pipeline defaults."""

from __future__ import annotations

from .detect import DetectorConfig
from .errors import ConfigError
from .pipeline import PipelineConfig
from .recognize import DEFAULT_PLATE_PATTERN, ReaderParams, compile_plate_pattern

_FLOAT_KEYS = {
    "score_threshold",
    "nms_iou_threshold",
    "min_area",
    "max_area",
    "min_aspect",
    "max_aspect",
    "min_mean_value",
    "min_confidence",
    "dedup_window_s",
    "frame_interval",
    "blur_sigma",
    "reject_threshold",
}
_INT_KEYS = {"stride", "blur_ksize"}
_STR_KEYS = {"store_dir", "bind", "plate_pattern", "backend", "input_size"}
KNOWN_KEYS = _FLOAT_KEYS | _INT_KEYS | _STR_KEYS


def load_config(path: str) -> dict:
    """Parse `key = value` lines; '#' starts a comment, blank lines skip."""
    values: dict[str, object] = {}
    with open(path) as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ConfigError(f"{path}:{lineno}: expected key=value, got {raw.strip()!r}")
            key, _, value = line.partition("=")
            key = key.strip()
            value = value.strip()
            if key not in KNOWN_KEYS:
                raise ConfigError(f"{path}:{lineno}: unknown key {key!r}")
            try:
                if key in _FLOAT_KEYS:
                    values[key] = float(value)
                elif key in _INT_KEYS:
                    values[key] = int(value)
                else:
                    values[key] = value
            except ValueError as exc:
                raise ConfigError(f"{path}:{lineno}: bad value for {key}: {exc}") from None
    return values


def parse_input_size(value: str | None) -> tuple[int, int] | None:
    if value is None or value in ("", "none", "None"):
        return None
    try:
        w, _, h = value.partition("x")
        return int(w), int(h)
    except ValueError as exc:
        raise ConfigError(f"input_size must be WxH or 'none', got {value!r}") from None


def pipeline_config_from(values: dict, backend: str | None = None) -> PipelineConfig:
    """Build a PipelineConfig from config-file values plus overrides."""
    detector = DetectorConfig(
        score_threshold=values.get("score_threshold", 0.8),
        nms_iou_threshold=values.get("nms_iou_threshold", 0.2),
        stride=values.get("stride", 4),
        min_area=values.get("min_area", 250.0),
        max_area=values.get("max_area", 250_000.0),
        min_aspect=values.get("min_aspect", 1.5),
        max_aspect=values.get("max_aspect", 8.0),
        min_mean_value=values.get("min_mean_value", 0.0),
    )
    reader = ReaderParams(
        blur_sigma=values.get("blur_sigma", 1.0),
        blur_ksize=values.get("blur_ksize", 3),
        reject_threshold=values.get("reject_threshold", 0.55),
    )
    pattern = values.get("plate_pattern", DEFAULT_PLATE_PATTERN)
    compile_plate_pattern(str(pattern))
    return PipelineConfig(
        backend=backend or str(values.get("backend", "heuristic")),
        detector=detector,
        reader=reader,
        plate_pattern=str(pattern),
        min_confidence=values.get("min_confidence", 0.6),
        dedup_window_s=values.get("dedup_window_s", 5.0),
        input_size=parse_input_size(values.get("input_size", "1280x720")),
    )
