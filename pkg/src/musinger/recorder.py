"""Touch-sensitive recorder model.

Turns tap events or scripted rhythm patterns into a timed ForceFrame
stream. The sensing chain is modeled as a force-sensitive resistor with
conductance linear in force, read by an n-bit ADC: force maps linearly to
counts above an activation threshold, and counts map back to force on the
display side. Quantization is therefore one ADC step.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Iterable, Iterator

from .model import FORCE_MAX_N, ForceFrame, ModelError, RhythmPattern


@dataclass(frozen=True)
class SensorConfig:
    """Capture parameters for the three-pad recorder."""

    sample_rate_hz: float = 100.0
    adc_bits: int = 12
    activation_threshold_n: float = 0.2

    def __post_init__(self):
        if not 10 <= self.sample_rate_hz <= 1000:
            raise ModelError(f"sample_rate_hz {self.sample_rate_hz} outside [10, 1000]")
        if not 8 <= self.adc_bits <= 16:
            raise ModelError(f"adc_bits {self.adc_bits} outside [8, 16]")
        if self.activation_threshold_n < 0:
            raise ModelError("activation_threshold_n must be >= 0")

    @property
    def full_scale_counts(self) -> int:
        return (1 << self.adc_bits) - 1

    @property
    def frame_interval_us(self) -> float:
        return 1e6 / self.sample_rate_hz


class TapKind(Enum):
    PRESS = "press"
    RELEASE = "release"


@dataclass(frozen=True)
class TapEvent:
    """A press or release on one pad. Release carries force 0."""

    channel: int
    kind: TapKind
    force_n: float
    timestamp_us: int

    def __post_init__(self):
        if self.channel not in (1, 2, 3):
            raise ModelError(f"channel {self.channel} outside 1..3")
        if self.kind is TapKind.PRESS and not 0.0 < self.force_n <= FORCE_MAX_N:
            raise ModelError(f"press force {self.force_n} outside (0, {FORCE_MAX_N}]")
        if self.kind is TapKind.RELEASE and self.force_n != 0.0:
            raise ModelError("release events carry force 0")


def _round_half_away(x: float) -> int:
    return int(x + 0.5) if x >= 0 else -int(-x + 0.5)


def fsr_response(force_n: float, config: SensorConfig = SensorConfig()) -> int:
    """ADC counts for an applied force.

    Zero below the activation threshold, then linear up to full scale:
    counts = round((2^bits - 1) * min(force, 10) / 10), half away from zero.
    """
    if force_n < 0:
        raise ModelError(f"force {force_n} N is negative")
    if force_n < config.activation_threshold_n:
        return 0
    return _round_half_away(config.full_scale_counts * min(force_n, FORCE_MAX_N) / FORCE_MAX_N)


def adc_to_force(adc_counts: int, config: SensorConfig = SensorConfig()) -> float:
    """Inverse sensor map: counts back to newtons (display side)."""
    if not 0 <= adc_counts <= config.full_scale_counts:
        raise ModelError(
            f"counts {adc_counts} outside [0, {config.full_scale_counts}]")
    return FORCE_MAX_N * adc_counts / config.full_scale_counts


def quantize_force(force_n: float, config: SensorConfig = SensorConfig()) -> float:
    """Round-trip a force through the sensing chain (one ADC step of error)."""
    return adc_to_force(fsr_response(force_n, config), config)


def sample_taps(events: Iterable[TapEvent],
                config: SensorConfig = SensorConfig(),
                until_us: int | None = None,
                start_seq: int = 0) -> Iterator[ForceFrame]:
    """Sample a finite, time-ordered tap event stream into frames.

    Emits frames at the configured rate from t=0 up to ``until_us``
    (default: past the last event). Each frame holds, per channel, the
    quantized force of the most recent press not yet released at that
    frame time; a release takes effect at the first frame at or after its
    timestamp. Duplicate presses on a held channel are ignored, as are
    releases with nothing held.
    """
    events = sorted(events, key=lambda e: e.timestamp_us)
    if until_us is None:
        until_us = (events[-1].timestamp_us if events else 0) + int(config.frame_interval_us)

    held: dict[int, float] = {}  # channel -> raw held force
    idx = 0
    seq = start_seq
    n = 0
    while True:
        t = int(n * config.frame_interval_us)
        if t > until_us:
            break
        while idx < len(events) and events[idx].timestamp_us <= t:
            ev = events[idx]
            idx += 1
            if ev.kind is TapKind.PRESS:
                held.setdefault(ev.channel, ev.force_n)
            else:
                held.pop(ev.channel, None)
        forces = tuple(quantize_force(held.get(ch, 0.0), config) for ch in (1, 2, 3))
        yield ForceFrame(seq=seq, timestamp_us=t, forces=forces)
        seq += 1
        n += 1


def encode_pattern(pattern: RhythmPattern,
                   config: SensorConfig = SensorConfig()) -> list[ForceFrame]:
    """Deterministic scripted playback of a rhythm pattern.

    An onset (t, ch, dur, intensity) puts intensity * 10 N on its channel
    for every frame with timestamp in [t, t+dur). Output covers the last
    onset end plus one trailing zero frame; an empty pattern yields a
    single zero frame.
    """
    pattern.validate()
    interval_us = config.frame_interval_us
    last_end_us = pattern.length_ms * 1000.0
    # frames 0..N-1 where N-1 is the first frame index at/after the last end
    n_frames = int(-(-last_end_us // interval_us)) + 1  # ceil + trailing zero

    frames = []
    for n in range(n_frames):
        t_us = int(n * interval_us)
        t_ms = n * interval_us / 1000.0
        forces = [0.0, 0.0, 0.0]
        for onset in pattern.onsets:
            if onset.time_ms <= t_ms < onset.end_ms:
                forces[onset.channel - 1] = onset.intensity * FORCE_MAX_N
        frames.append(ForceFrame(seq=n, timestamp_us=t_us, forces=tuple(forces)))
    return frames
