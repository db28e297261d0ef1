"""Key-value configuration files for the full pipeline.

Format: one "key = value" per line, "#" comments, blank lines ignored.
Keys are exactly the field names of the dataclasses they feed; one
geometry block applies to all three linkages. The config path comes
from an explicit flag, else the MUSINGER_CONFIG environment variable,
else built-in defaults.
"""

from __future__ import annotations

import os

from .display import DisplayConfig
from .linkage import Branch, LinkageGeometry
from .model import NUM_CHANNELS
from .pipeline import PipelineConfig
from .protocol import JitterBufferConfig
from .recorder import SensorConfig

ENV_CONFIG = "MUSINGER_CONFIG"

_GEOMETRY_KEYS = ("base_separation_mm", "proximal_length_mm",
                  "distal_length_mm", "angle_min_rad", "angle_max_rad",
                  "branch")
_DISPLAY_KEYS = ("skin_plane_y_mm", "depth_max_mm", "servo_max_speed_rad_s",
                 "tick_rate_hz")
_SENSOR_KEYS = ("sample_rate_hz", "adc_bits", "activation_threshold_n")
_JITTER_KEYS = ("target_latency_ms", "gap_timeout_ms", "capacity_frames")
_PIPELINE_KEYS = ("settle_ms",)
_INT_KEYS = {"adc_bits", "capacity_frames"}

KNOWN_KEYS = (_GEOMETRY_KEYS + _DISPLAY_KEYS + _SENSOR_KEYS + _JITTER_KEYS
              + _PIPELINE_KEYS)


class ConfigError(ValueError):
    """Unreadable or invalid configuration input."""


def parse_config_text(text: str) -> dict[str, str]:
    values: dict[str, str] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        body = raw.split("#", 1)[0].strip()
        if not body:
            continue
        if "=" in body:
            key, _, value = body.partition("=")
        else:
            parts = body.split(None, 1)
            if len(parts) != 2:
                raise ConfigError(f"line {lineno}: expected 'key = value'")
            key, value = parts
        key, value = key.strip(), value.strip()
        if key not in KNOWN_KEYS:
            raise ConfigError(f"line {lineno}: unknown key {key!r}")
        if not value:
            raise ConfigError(f"line {lineno}: empty value for {key!r}")
        values[key] = value
    return values


def _coerce(key: str, value: str):
    if key == "branch":
        try:
            return Branch(value.lower())
        except ValueError:
            raise ConfigError(
                f"branch must be one of "
                f"{[b.value for b in Branch]}, got {value!r}") from None
    try:
        return int(value) if key in _INT_KEYS else float(value)
    except ValueError:
        raise ConfigError(f"bad numeric value for {key!r}: {value!r}") from None


def build_pipeline_config(values: dict[str, str]) -> PipelineConfig:
    """Defaults overridden by parsed key-value pairs."""
    typed = {key: _coerce(key, value) for key, value in values.items()}

    def pick(keys, cls, **extra):
        chosen = {k: typed[k] for k in keys if k in typed}
        try:
            return cls(**chosen, **extra)
        except ValueError as exc:
            raise ConfigError(str(exc)) from None

    geometry = pick(_GEOMETRY_KEYS, LinkageGeometry)
    display = pick(_DISPLAY_KEYS, DisplayConfig,
                   geometries=tuple(geometry for _ in range(NUM_CHANNELS)))
    sensor = pick(_SENSOR_KEYS, SensorConfig)
    jitter = pick(_JITTER_KEYS, JitterBufferConfig)
    extra = {k: typed[k] for k in _PIPELINE_KEYS if k in typed}
    try:
        return PipelineConfig(sensor=sensor, display=display, jitter=jitter,
                              **extra)
    except ValueError as exc:
        raise ConfigError(str(exc)) from None


def resolve_config_path(explicit: str | None) -> str | None:
    if explicit:
        return explicit
    return os.environ.get(ENV_CONFIG) or None


def load_pipeline_config(path: str | None) -> PipelineConfig:
    """Config from path (or env fallback); defaults when neither is set."""
    resolved = resolve_config_path(path)
    if resolved is None:
        return PipelineConfig()
    try:
        with open(resolved, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise ConfigError(f"cannot read config {resolved!r}: {exc}") from None
    return build_pipeline_config(parse_config_text(text))
