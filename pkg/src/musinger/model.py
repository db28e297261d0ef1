"""Shared domain types for the tap-to-haptics pipeline.

Everything that moves between the recorder, the wire, and the display is
defined here: force frames, rhythm patterns, and the monotonic clock
contract. All types are plain values and safe to copy across threads.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from enum import Enum

# Sensor full scale in newtons (10 N nominal pad rating).
FORCE_MAX_N = 10.0

NUM_CHANNELS = 3


class ModelError(ValueError):
    """Invalid value for one of the core domain types."""


class PatternError(ModelError):
    """A rhythm pattern violates its invariants.

    Carries ``offenders``: a list of (onset_index, reason) pairs.
    """

    def __init__(self, offenders):
        self.offenders = list(offenders)
        detail = "; ".join(f"onset {i}: {why}" for i, why in self.offenders)
        super().__init__(f"invalid rhythm pattern: {detail}")


def monotonic_now() -> int:
    """Microseconds on a monotonic clock. Only differences are meaningful."""
    return time.monotonic_ns() // 1000


@dataclass(frozen=True)
class ForceFrame:
    """One 3-channel force sample; the unit flowing through the pipeline.

    forces are newtons in [0, 10]. seq increments by 1 per frame within a
    stream; timestamp_us is monotonic-clock microseconds, non-decreasing.
    """

    seq: int
    timestamp_us: int
    forces: tuple[float, float, float]

    def __post_init__(self):
        if not 0 <= self.seq <= 0xFFFFFFFF:
            raise ModelError(f"seq {self.seq} outside unsigned 32-bit range")
        if not 0 <= self.timestamp_us <= 0xFFFFFFFFFFFFFFFF:
            raise ModelError(f"timestamp_us {self.timestamp_us} outside unsigned 64-bit range")
        if len(self.forces) != NUM_CHANNELS:
            raise ModelError(f"expected {NUM_CHANNELS} channel forces, got {len(self.forces)}")
        for i, f in enumerate(self.forces):
            if not 0.0 <= f <= FORCE_MAX_N:
                raise ModelError(f"forces[{i}] = {f} outside [0, {FORCE_MAX_N}] N")


class Condition(Enum):
    """Listening condition label for a trial. Two values only; the noise
    itself is not modeled."""

    NO_NOISE = "none"
    WHITE_NOISE = "white"

    @classmethod
    def parse(cls, text: str) -> "Condition":
        for c in cls:
            if c.value == text:
                return c
        raise ModelError(f"unknown condition {text!r} (use 'none' or 'white')")


@dataclass(frozen=True)
class Onset:
    """One tap in a rhythm pattern.

    time_ms: onset start, milliseconds from pattern start.
    channel: finger pad 1..3 (index/middle/ring).
    duration_ms: hold time, > 0.
    intensity: fraction of full-scale force, (0, 1].
    """

    time_ms: float
    channel: int
    duration_ms: float
    intensity: float

    @property
    def end_ms(self) -> float:
        return self.time_ms + self.duration_ms

    def problems(self) -> list[str]:
        out = []
        if self.time_ms < 0:
            out.append(f"time_ms {self.time_ms} is negative")
        if self.channel not in (1, 2, 3):
            out.append(f"channel {self.channel} outside 1..3")
        if self.duration_ms <= 0:
            out.append(f"duration_ms {self.duration_ms} not positive")
        if not 0.0 < self.intensity <= 1.0:
            out.append(f"intensity {self.intensity} outside (0, 1]")
        return out


@dataclass
class RhythmPattern:
    """A melody as timed onsets; both scripted input and classification target."""

    onsets: list[Onset] = field(default_factory=list)
    melody_id: str | None = None  # one of "A".."D" when known

    def validate(self) -> "RhythmPattern":
        """Raise PatternError listing every offending onset; return self."""
        offenders = []
        for i, onset in enumerate(self.onsets):
            for why in onset.problems():
                offenders.append((i, why))
        for i in range(1, len(self.onsets)):
            if self.onsets[i].time_ms < self.onsets[i - 1].time_ms:
                offenders.append((i, "onsets not sorted by time_ms"))
        last_by_channel: dict[int, tuple[int, Onset]] = {}
        for i, onset in enumerate(self.onsets):
            prev = last_by_channel.get(onset.channel)
            if prev is not None:
                j, p = prev
                if p.end_ms > onset.time_ms:
                    offenders.append(
                        (i, f"overlaps onset {j} on channel {onset.channel} "
                            f"(prev ends {p.end_ms} ms, next starts {onset.time_ms} ms)"))
            last_by_channel[onset.channel] = (i, onset)
        if offenders:
            raise PatternError(offenders)
        return self

    @property
    def length_ms(self) -> float:
        """End of the last onset, or 0 for an empty pattern."""
        return max((o.end_ms for o in self.onsets), default=0.0)

    def scaled_tempo(self, factor: float) -> "RhythmPattern":
        """Uniformly stretch all onset times and durations by ``factor``."""
        return RhythmPattern(
            onsets=[Onset(o.time_ms * factor, o.channel, o.duration_ms * factor,
                          o.intensity) for o in self.onsets],
            melody_id=self.melody_id)

    def shifted(self, offset_ms: float) -> "RhythmPattern":
        """Shift all onsets so the first starts at ``offset_ms``."""
        if not self.onsets:
            return RhythmPattern(onsets=[], melody_id=self.melody_id)
        t0 = self.onsets[0].time_ms
        return RhythmPattern(
            onsets=[Onset(o.time_ms - t0 + offset_ms, o.channel, o.duration_ms,
                          o.intensity) for o in self.onsets],
            melody_id=self.melody_id)
