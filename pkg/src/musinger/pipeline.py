"""Virtual-time pipeline: pattern -> wire -> jitter buffer -> display.

Runs the whole streaming path on a simulated clock, so a ten-second
melody with loss and jitter replays in milliseconds and is exactly
reproducible from a seed. This is the presenter used by machine-answer
experiment sessions and by the play command.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .display import DisplayConfig, HapticDisplay, LinkageState, extract_onsets
from .melodies import MelodyId, builtin_melody, classify_melody
from .model import RhythmPattern
from .protocol import (JitterBuffer, JitterBufferConfig, PopKind,
                       ProtocolError, decode_frame, encode_frame)
from .recorder import SensorConfig, encode_pattern
from .transport import FaultProfile, LoopbackLink


@dataclass(frozen=True)
class PipelineConfig:
    sensor: SensorConfig = SensorConfig()
    display: DisplayConfig = field(default_factory=DisplayConfig)
    jitter: JitterBufferConfig = JitterBufferConfig()
    faults: FaultProfile = FaultProfile()
    settle_ms: float = 400.0  # run-out after the stream so contacts resolve

    def __post_init__(self):
        if self.settle_ms < 0:
            raise ValueError("settle_ms must be non-negative")
        self.jitter.check_rate(self.sensor.sample_rate_hz)


@dataclass
class PipelineResult:
    history: list[tuple[LinkageState, ...]]
    pattern: RhythmPattern  # onsets recovered from the rendered history
    frames_sent: int
    frames_accepted: int
    frames_played: int
    ticks_concealed: int
    datagrams_dropped: int
    datagrams_duplicated: int
    rejected_dup: int
    rejected_late: int


def stream_pattern(pattern: RhythmPattern,
                   config: PipelineConfig | None = None,
                   seed: int = 0) -> PipelineResult:
    """Replay one pattern through the full simulated path."""
    cfg = config or PipelineConfig()
    frames = list(encode_pattern(pattern, cfg.sensor))
    datagrams = [encode_frame(f, last=(i == len(frames) - 1))
                 for i, f in enumerate(frames)]

    link = LoopbackLink(cfg.faults, seed=seed)
    jbuf = JitterBuffer(cfg.jitter)
    display = HapticDisplay(cfg.display)
    history: list[tuple[LinkageState, ...]] = []

    tick_us = round(1_000_000 / cfg.display.tick_rate_hz)
    settle_ticks = int(cfg.settle_ms * 1000 / tick_us)
    frames_played = 0
    concealed = 0
    next_send = 0
    now = 0
    quiet = 0
    while True:
        while next_send < len(frames) and frames[next_send].timestamp_us <= now:
            link.send(datagrams[next_send], now)
            next_send += 1
        for arrival_us, data in link.receive(now):
            try:
                frame, _ = decode_frame(data)
            except ProtocolError:
                continue
            jbuf.push(frame, arrival_us)
        result = jbuf.pop(now)
        if result.kind is PopKind.FRAME:
            frames_played += 1
        elif result.kind is PopKind.CONCEALED:
            concealed += 1
        history.append(display.render_tick(result.frame))
        now += tick_us
        drained = (next_send >= len(frames) and link.in_flight == 0
                   and jbuf.depth == 0)
        quiet = quiet + 1 if drained else 0
        if quiet > settle_ticks:
            break
    return PipelineResult(history=history,
                          pattern=extract_onsets(history, cfg.display),
                          frames_sent=len(frames),
                          frames_accepted=jbuf.pushed,
                          frames_played=frames_played,
                          ticks_concealed=concealed,
                          datagrams_dropped=link.dropped,
                          datagrams_duplicated=link.duplicated,
                          rejected_dup=jbuf.rejected_dup,
                          rejected_late=jbuf.rejected_late)


def stream_melody(melody: MelodyId, config: PipelineConfig | None = None,
                  seed: int = 0) -> PipelineResult:
    return stream_pattern(builtin_melody(melody), config, seed)


def recognize_melody(melody: MelodyId, config: PipelineConfig | None = None,
                     seed: int = 0) -> MelodyId:
    """Stream a builtin melody and classify what came out the far end."""
    return classify_melody(stream_melody(melody, config, seed).pattern)
