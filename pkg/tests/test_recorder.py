"""Sensor chain: FSR response, ADC quantization, tap sampling, encoding."""

import random

import pytest

from musinger.model import ModelError, Onset, PatternError, RhythmPattern
from musinger.recorder import (SensorConfig, TapEvent, TapKind, adc_to_force,
                               encode_pattern, fsr_response, quantize_force,
                               sample_taps)
from tests.helpers import TEST_RANDOM_SEED


def test_sensor_config_defaults():
    config = SensorConfig()
    assert config.sample_rate_hz == 100.0
    assert config.adc_bits == 12
    assert config.full_scale_counts == 4095
    assert config.frame_interval_us == 10_000.0
    assert config.activation_threshold_n == 0.2


def test_sensor_config_rejects_silly_values():
    with pytest.raises(ModelError):
        SensorConfig(sample_rate_hz=5)
    with pytest.raises(ModelError):
        SensorConfig(adc_bits=4)
    with pytest.raises(ModelError):
        SensorConfig(activation_threshold_n=-0.1)


def test_fsr_response_thresholds_and_saturates():
    assert fsr_response(0.0) == 0
    assert fsr_response(0.199) == 0  # below activation
    assert fsr_response(10.0) == 4095
    assert fsr_response(12.0) == 4095  # clamped at full scale
    with pytest.raises(ModelError):
        fsr_response(-0.5)


def test_fsr_response_monotone():
    rng = random.Random(TEST_RANDOM_SEED)
    for _ in range(2000):
        low = rng.uniform(0.0, 10.0)
        high = rng.uniform(low, 10.0)
        assert fsr_response(low) <= fsr_response(high)


def test_adc_to_force_bounds():
    assert adc_to_force(0) == 0.0
    assert adc_to_force(4095) == 10.0
    with pytest.raises(ModelError):
        adc_to_force(4096)
    with pytest.raises(ModelError):
        adc_to_force(-1)


def test_quantize_force_error_within_one_adc_step():
    # one step is 10/4095 N ~ 2.44 mN; rounding is half a step
    step = 10.0 / 4095
    rng = random.Random(TEST_RANDOM_SEED)
    for _ in range(5000):
        force = rng.uniform(0.2, 10.0)
        quantized = quantize_force(force)
        assert abs(quantized - force) <= step / 2 + 1e-12, force


def test_quantize_force_is_idempotent():
    rng = random.Random(TEST_RANDOM_SEED + 1)
    for _ in range(500):
        force = rng.uniform(0.0, 10.0)
        once = quantize_force(force)
        assert quantize_force(once) == once


def test_quantize_force_kills_sub_threshold_presses():
    assert quantize_force(0.1) == 0.0
    assert quantize_force(0.0) == 0.0


def test_sample_taps_press_release_window():
    events = [
        TapEvent(2, TapKind.PRESS, 5.0, 20_000),
        TapEvent(2, TapKind.RELEASE, 0.0, 50_000),
    ]
    frames = list(sample_taps(events))
    assert [f.timestamp_us for f in frames[:3]] == [0, 10_000, 20_000]
    by_time = {f.timestamp_us: f.forces for f in frames}
    assert by_time[10_000] == (0.0, 0.0, 0.0)
    assert by_time[20_000][1] == pytest.approx(5.0, abs=0.01)
    assert by_time[40_000][1] == pytest.approx(5.0, abs=0.01)
    assert by_time[50_000] == (0.0, 0.0, 0.0)  # release at frame time
    # seq increments by one per frame
    assert [f.seq for f in frames] == list(range(len(frames)))


def test_sample_taps_ignores_duplicate_press_and_orphan_release():
    events = [
        TapEvent(1, TapKind.PRESS, 4.0, 0),
        TapEvent(1, TapKind.PRESS, 9.0, 10_000),  # held: ignored
        TapEvent(3, TapKind.RELEASE, 0.0, 10_000),  # nothing held: ignored
        TapEvent(1, TapKind.RELEASE, 0.0, 30_000),
    ]
    frames = list(sample_taps(events))
    forces = [f.forces[0] for f in frames]
    assert forces[0] == pytest.approx(4.0, abs=0.01)
    assert forces[1] == pytest.approx(4.0, abs=0.01)  # not restamped to 9 N
    assert forces[-1] == 0.0


def test_sample_taps_until_us_extends_the_stream():
    frames = list(sample_taps([], until_us=50_000))
    assert len(frames) == 6  # t = 0..50 ms inclusive
    assert all(f.forces == (0.0, 0.0, 0.0) for f in frames)


def test_tap_event_validation():
    with pytest.raises(ModelError):
        TapEvent(0, TapKind.PRESS, 5.0, 0)
    with pytest.raises(ModelError):
        TapEvent(1, TapKind.PRESS, 0.0, 0)  # press needs force
    with pytest.raises(ModelError):
        TapEvent(1, TapKind.RELEASE, 1.0, 0)  # release carries none


def test_encode_pattern_frame_window_and_trailing_zero():
    pattern = RhythmPattern(onsets=[Onset(0.0, 1, 95.0, 1.0)])
    frames = encode_pattern(pattern)
    # force applies on frames with t in [0, 95) ms; one trailing zero frame
    assert len(frames) == 11
    assert [f.forces[0] for f in frames[:10]] == [10.0] * 10
    assert frames[10].forces == (0.0, 0.0, 0.0)


def test_encode_pattern_intensity_scales_force():
    pattern = RhythmPattern(onsets=[Onset(0.0, 3, 20.0, 0.4)])
    frames = encode_pattern(pattern)
    assert frames[0].forces == (0.0, 0.0, 4.0)


def test_encode_pattern_rejects_invalid_patterns():
    with pytest.raises(PatternError):
        encode_pattern(RhythmPattern(onsets=[Onset(0.0, 7, 10.0, 1.0)]))


def test_encode_pattern_empty_gives_single_zero_frame():
    frames = encode_pattern(RhythmPattern())
    assert len(frames) == 1
    assert frames[0].forces == (0.0, 0.0, 0.0)


def test_encode_pattern_custom_rate():
    config = SensorConfig(sample_rate_hz=200.0)
    pattern = RhythmPattern(onsets=[Onset(0.0, 1, 50.0, 1.0)])
    frames = encode_pattern(pattern, config)
    assert frames[1].timestamp_us == 5000
    assert len(frames) == 11  # 10 active 5 ms frames + trailing zero
