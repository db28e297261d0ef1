"""Key-value config parsing and pipeline assembly."""

import math

import pytest

from musinger.config import (ENV_CONFIG, KNOWN_KEYS, ConfigError,
                             build_pipeline_config, load_pipeline_config,
                             parse_config_text, resolve_config_path)
from musinger.linkage import Branch
from musinger.pipeline import PipelineConfig


def test_parse_both_key_value_forms():
    values = parse_config_text(
        "# comment\n"
        "\n"
        "skin_plane_y_mm = -54.0\n"
        "tick_rate_hz 200   # spaced form\n"
        "adc_bits=12\n")
    assert values == {"skin_plane_y_mm": "-54.0", "tick_rate_hz": "200",
                      "adc_bits": "12"}


def test_parse_rejects_unknown_key():
    with pytest.raises(ConfigError, match="line 2: unknown key 'colour'"):
        parse_config_text("tick_rate_hz = 100\ncolour = red\n")


def test_parse_rejects_malformed_lines():
    with pytest.raises(ConfigError, match="line 1"):
        parse_config_text("tick_rate_hz\n")
    with pytest.raises(ConfigError, match="empty value"):
        parse_config_text("tick_rate_hz =\n")


def test_build_defaults_when_empty():
    config = build_pipeline_config({})
    assert config == PipelineConfig()


def test_build_applies_overrides_everywhere():
    config = build_pipeline_config({
        "base_separation_mm": "32",
        "branch": "ELBOW_OUT",
        "skin_plane_y_mm": "-54",
        "sample_rate_hz": "50",
        "adc_bits": "12",
        "target_latency_ms": "60",
        "capacity_frames": "128",
        "settle_ms": "250",
    })
    for geom in config.display.geometries:
        assert geom.base_separation_mm == 32.0
        assert geom.branch is Branch.ELBOW_OUT
    assert config.display.skin_plane_y_mm == -54.0
    assert config.sensor.sample_rate_hz == 50.0
    assert config.sensor.adc_bits == 12
    assert isinstance(config.sensor.adc_bits, int)
    assert config.jitter.target_latency_ms == 60.0
    assert config.jitter.capacity_frames == 128
    assert config.settle_ms == 250.0


def test_build_rejects_bad_values():
    with pytest.raises(ConfigError, match="bad numeric value"):
        build_pipeline_config({"tick_rate_hz": "fast"})
    with pytest.raises(ConfigError, match="branch must be one of"):
        build_pipeline_config({"branch": "sideways"})
    # geometry that cannot reach the skin plane surfaces as ConfigError
    with pytest.raises(ConfigError):
        build_pipeline_config({"skin_plane_y_mm": "-64"})
    with pytest.raises(ConfigError):
        build_pipeline_config({"capacity_frames": "0"})


def test_resolve_config_path_precedence(monkeypatch):
    monkeypatch.delenv(ENV_CONFIG, raising=False)
    assert resolve_config_path(None) is None
    assert resolve_config_path("a.cfg") == "a.cfg"
    monkeypatch.setenv(ENV_CONFIG, "env.cfg")
    assert resolve_config_path(None) == "env.cfg"
    assert resolve_config_path("a.cfg") == "a.cfg"  # flag wins
    monkeypatch.setenv(ENV_CONFIG, "")
    assert resolve_config_path(None) is None


def test_load_pipeline_config(tmp_path, monkeypatch):
    monkeypatch.delenv(ENV_CONFIG, raising=False)
    assert load_pipeline_config(None) == PipelineConfig()

    path = tmp_path / "musinger.cfg"
    path.write_text("tick_rate_hz = 200\n")
    config = load_pipeline_config(str(path))
    assert config.display.tick_rate_hz == 200.0
    assert math.isclose(config.display.dt_s, 0.005)

    monkeypatch.setenv(ENV_CONFIG, str(path))
    assert load_pipeline_config(None).display.tick_rate_hz == 200.0

    with pytest.raises(ConfigError, match="cannot read config"):
        load_pipeline_config(str(tmp_path / "missing.cfg"))


def test_known_keys_cover_every_block():
    assert "branch" in KNOWN_KEYS
    assert "gap_timeout_ms" in KNOWN_KEYS
    assert "activation_threshold_n" in KNOWN_KEYS
    assert len(set(KNOWN_KEYS)) == len(KNOWN_KEYS)
