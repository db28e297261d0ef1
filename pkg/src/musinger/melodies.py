"""Benchmark melody patterns, the MRF1 rhythm format, and a classifier.

Four bundled transcriptions cover the opening rhythm of each benchmark
song; melodic contour maps to channels by pitch tercile (low ch1, mid
ch2, high ch3). The classifier is channel-agnostic: it compares
normalized inter-onset-interval signatures under dynamic time warping,
which makes it a machine proxy for rhythm recognition and keeps it
invariant to uniform tempo changes.
"""

from __future__ import annotations

import functools
import math
from dataclasses import dataclass
from enum import Enum
from importlib import resources

from .model import Onset, RhythmPattern

MRF_HEADER = "MRF1"


class MelodyId(Enum):
    A = "A"  # Baby Shark
    B = "B"  # Happy Birthday
    C = "C"  # Jingle Bells
    D = "D"  # William Tell Overture finale

    @classmethod
    def parse(cls, text: str) -> "MelodyId":
        try:
            return cls(text.strip().upper())
        except ValueError:
            raise ValueError(f"unknown melody id {text!r}, expected A..D") from None


class RhythmFileError(ValueError):
    """Base for MRF1 parse failures; line is 1-based, 0 for the header."""

    def __init__(self, message: str, line: int = 0):
        super().__init__(f"line {line}: {message}" if line else message)
        self.line = line


class BadFormat(RhythmFileError):
    """Missing header, wrong field count, or an unparseable field."""


class BadChannel(RhythmFileError):
    """Channel outside 1..3."""


class BadOrder(RhythmFileError):
    """Onset times decrease."""


class TooShort(ValueError):
    """Pattern has too few onsets to form an interval signature."""


def parse_rhythm_file(text: str) -> RhythmPattern:
    """Parse MRF1 text into a validated pattern.

    Format: first line "MRF1", then "time_ms channel duration_ms
    intensity" per onset; "#" starts a comment; times non-decreasing.
    """
    lines = text.splitlines()
    if not lines or lines[0].split("#", 1)[0].strip() != MRF_HEADER:
        raise BadFormat(f"expected {MRF_HEADER!r} header")
    onsets = []
    prev_time = None
    for lineno, raw in enumerate(lines[1:], start=2):
        body = raw.split("#", 1)[0].strip()
        if not body:
            continue
        fields = body.split()
        if len(fields) != 4:
            raise BadFormat(f"expected 4 fields, got {len(fields)}", line=lineno)
        try:
            time_ms = float(fields[0])
            channel = int(fields[1])
            duration_ms = float(fields[2])
            intensity = float(fields[3])
        except ValueError:
            raise BadFormat(f"unparseable onset {body!r}", line=lineno) from None
        if channel not in (1, 2, 3):
            raise BadChannel(f"channel {channel} outside 1..3", line=lineno)
        if prev_time is not None and time_ms < prev_time:
            raise BadOrder(f"time {time_ms} ms before previous {prev_time} ms",
                           line=lineno)
        prev_time = time_ms
        onsets.append(Onset(time_ms, channel, duration_ms, intensity))
    return RhythmPattern(onsets=onsets).validate()


def _fmt(value: float) -> str:
    return str(int(value)) if float(value).is_integer() else repr(float(value))


def serialize_rhythm_file(pattern: RhythmPattern) -> str:
    """Canonical MRF1 text: header plus one line per onset, no comments."""
    lines = [MRF_HEADER]
    for o in pattern.onsets:
        lines.append(f"{_fmt(o.time_ms)} {o.channel} "
                     f"{_fmt(o.duration_ms)} {_fmt(o.intensity)}")
    return "\n".join(lines) + "\n"


def load_rhythm_file(path) -> RhythmPattern:
    with open(path, encoding="utf-8") as fh:
        return parse_rhythm_file(fh.read())


@functools.lru_cache(maxsize=None)
def builtin_melody(melody: MelodyId) -> RhythmPattern:
    """The bundled transcription for one melody id."""
    name = f"assets/melody_{melody.value.lower()}.mrf"
    text = resources.files(__package__).joinpath(name).read_text(encoding="utf-8")
    pattern = parse_rhythm_file(text)
    return RhythmPattern(onsets=pattern.onsets, melody_id=melody.value)


@dataclass(frozen=True)
class IoiSignature:
    """Inter-onset intervals normalized to sum to one."""

    values: tuple[float, ...]

    def __post_init__(self):
        if any(v <= 0 for v in self.values):
            raise ValueError("signature entries must be positive")
        if abs(sum(self.values) - 1.0) > 1e-12:
            raise ValueError("signature must sum to 1")

    def __len__(self):
        return len(self.values)

    def __iter__(self):
        return iter(self.values)


def ioi_signature(pattern: RhythmPattern) -> IoiSignature:
    """Channel-agnostic rhythm feature; needs at least 3 onsets.

    Simultaneous onsets across channels collapse to one time point, so
    the signature reflects when anything happens, not how many pads.
    """
    if len(pattern.onsets) < 3:
        raise TooShort(f"need >= 3 onsets, got {len(pattern.onsets)}")
    times = sorted({o.time_ms for o in pattern.onsets})
    if len(times) < 3:
        raise TooShort("fewer than 3 distinct onset times")
    iois = [b - a for a, b in zip(times, times[1:])]
    total = sum(iois)
    return IoiSignature(tuple(v / total for v in iois))


def dtw_distance(a: IoiSignature, b: IoiSignature) -> float:
    """DTW alignment cost with squared local differences.

    Squaring punishes the large mismatches that distinguish rhythms
    while staying nearly flat for small timing jitter.
    """
    av, bv = tuple(a), tuple(b)
    inf = math.inf
    prev = [0.0] + [inf] * len(bv)
    for ai in av:
        cur = [inf] * (len(bv) + 1)
        for j, bj in enumerate(bv, start=1):
            d = ai - bj
            cur[j] = d * d + min(prev[j], cur[j - 1], prev[j - 1])
        prev = cur
    return prev[len(bv)]


@functools.lru_cache(maxsize=None)
def _builtin_signature(melody: MelodyId) -> IoiSignature:
    return ioi_signature(builtin_melody(melody))


def classify_melody(pattern: RhythmPattern,
                    candidates: frozenset[MelodyId] | None = None) -> MelodyId:
    """Nearest builtin melody by signature DTW; ties go to the smaller id."""
    pool = sorted(list(MelodyId) if candidates is None else candidates,
                  key=lambda m: m.value)
    if not pool:
        raise ValueError("no candidate melodies")
    sig = ioi_signature(pattern)
    return min(pool, key=lambda m: (dtw_distance(sig, _builtin_signature(m)),
                                    m.value))
