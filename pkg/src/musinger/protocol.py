"""Datagram format and receive-side jitter buffer.

Frames travel as fixed 24-byte datagrams over an unreliable transport:
no retransmit, loss and reordering tolerated. Layout (big-endian):

    0-1    magic 0x4D 0x53
    2      version 0x01
    3      flags (bit 0: last frame of stream)
    4-7    seq, u32
    8-15   timestamp_us, u64
    16-21  three forces, u16 each, millinewtons 0..10000
    22-23  CRC-16/CCITT-FALSE over bytes 0..21

Forces are fixed-point millinewtons so the wire is bit-exact; poly 0x1021,
init 0xFFFF, no reflection, no final xor.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass
from enum import Enum

from .model import FORCE_MAX_N, ForceFrame

MAGIC = b"\x4d\x53"
VERSION = 0x01
FLAG_LAST_FRAME = 0x01
DATAGRAM_SIZE = 24
DEFAULT_PORT = 47533

_MN_MAX = 10000  # 10 N in millinewtons

_HEADER = struct.Struct(">2sBBIQ3H")
assert _HEADER.size == DATAGRAM_SIZE - 2


def _make_crc_table(poly: int = 0x1021) -> tuple[int, ...]:
    table = []
    for byte in range(256):
        crc = byte << 8
        for _ in range(8):
            crc = ((crc << 1) ^ poly) if crc & 0x8000 else (crc << 1)
            crc &= 0xFFFF
        table.append(crc)
    return tuple(table)


_CRC_TABLE = _make_crc_table()


def crc16_ccitt_false(data: bytes) -> int:
    """CRC-16/CCITT-FALSE (check value of b'123456789' is 0x29B1)."""
    crc = 0xFFFF
    for b in data:
        crc = ((crc << 8) & 0xFFFF) ^ _CRC_TABLE[(crc >> 8) ^ b]
    return crc


class ProtocolError(Exception):
    """Base for all decode failures."""


class FrameLengthError(ProtocolError):
    """Datagram is not exactly 24 bytes."""


class BadHeaderError(ProtocolError):
    """Magic or version mismatch."""


class CorruptError(ProtocolError):
    """CRC mismatch, or a payload no valid encoder can produce."""


class RangeError(ProtocolError):
    """Encoder input outside wire limits."""


def force_to_millinewtons(force_n: float) -> int:
    if not 0.0 <= force_n <= FORCE_MAX_N:
        raise RangeError(f"force {force_n} N outside [0, {FORCE_MAX_N}]")
    return int(force_n * 1000.0 + 0.5)


def encode_frame(frame: ForceFrame, last: bool = False) -> bytes:
    """Serialize one frame to its 24-byte datagram."""
    flags = FLAG_LAST_FRAME if last else 0
    mn = tuple(force_to_millinewtons(f) for f in frame.forces)
    body = _HEADER.pack(MAGIC, VERSION, flags, frame.seq, frame.timestamp_us, *mn)
    return body + crc16_ccitt_false(body).to_bytes(2, "big")


def decode_frame(data: bytes) -> tuple[ForceFrame, bool]:
    """Parse a datagram; returns (frame, is_last_of_stream).

    Raises FrameLengthError / BadHeaderError / CorruptError; never
    misbehaves on arbitrary input.
    """
    if len(data) != DATAGRAM_SIZE:
        raise FrameLengthError(f"expected {DATAGRAM_SIZE} bytes, got {len(data)}")
    magic, version, flags, seq, ts, f0, f1, f2 = _HEADER.unpack(data[:22])
    if magic != MAGIC or version != VERSION:
        raise BadHeaderError(f"magic {magic!r} version {version:#x}")
    stored = int.from_bytes(data[22:24], "big")
    if crc16_ccitt_false(data[:22]) != stored:
        raise CorruptError("CRC mismatch")
    if f0 > _MN_MAX or f1 > _MN_MAX or f2 > _MN_MAX:
        raise CorruptError("force field above 10000 mN")
    frame = ForceFrame(seq=seq, timestamp_us=ts,
                       forces=(f0 / 1000.0, f1 / 1000.0, f2 / 1000.0))
    return frame, bool(flags & FLAG_LAST_FRAME)


# --- jitter buffer -----------------------------------------------------------


@dataclass(frozen=True)
class JitterBufferConfig:
    target_latency_ms: float = 40.0
    gap_timeout_ms: float = 100.0
    capacity_frames: int = 64

    def __post_init__(self):
        if not self.target_latency_ms < self.gap_timeout_ms:
            raise ValueError("target_latency_ms must be below gap_timeout_ms")
        if self.capacity_frames < 2:
            raise ValueError("capacity_frames must be at least 2")

    def check_rate(self, frame_rate_hz: float):
        """Capacity must cover twice the target latency at the stream rate."""
        need = 2 * self.target_latency_ms / 1000.0 * frame_rate_hz
        if self.capacity_frames < need:
            raise ValueError(
                f"capacity {self.capacity_frames} below 2*latency*rate = {need:.0f}")


class PopKind(Enum):
    FRAME = "frame"          # a real stream frame, in seq order
    CONCEALED = "concealed"  # hold-last copy masking a gap
    SILENCE = "silence"      # all-zero output (gap timed out, or warmup)
    STALLED = "stalled"      # nothing has ever arrived


@dataclass(frozen=True)
class PopResult:
    kind: PopKind
    frame: ForceFrame | None = None

    @property
    def forces(self) -> tuple[float, float, float]:
        if self.frame is not None:
            return self.frame.forces
        return (0.0, 0.0, 0.0)


class JitterBuffer:
    """Single-producer single-consumer reorder buffer with fixed latency.

    Frames play out target_latency after their (offset-corrected) send
    time. A missing next frame is concealed by repeating the last one
    until gap_timeout, then the output falls to silence. Late arrivals
    and duplicates are rejected on push.
    """

    def __init__(self, config: JitterBufferConfig = JitterBufferConfig()):
        self.config = config
        self._frames: dict[int, ForceFrame] = {}
        self._seen: set[int] = set()
        self._base_offset_us: int | None = None  # arrival - timestamp of first frame
        self._last_emitted: ForceFrame | None = None
        self._last_progress_us: int | None = None  # time of last real emission
        self._target_us = int(config.target_latency_ms * 1000)
        self._gap_us = int(config.gap_timeout_ms * 1000)
        self.pushed = 0
        self.rejected_late = 0
        self.rejected_dup = 0
        self.concealed = 0

    def _playout_us(self, frame: ForceFrame) -> int:
        return frame.timestamp_us + (self._base_offset_us or 0) + self._target_us

    def push(self, frame: ForceFrame, arrival_us: int) -> bool:
        """Insert a received frame; False if duplicate, late, or full."""
        if self._base_offset_us is None:
            self._base_offset_us = max(0, arrival_us - frame.timestamp_us)
        if frame.seq in self._seen or frame.seq in self._frames:
            self.rejected_dup += 1
            return False
        if self._last_emitted is not None and frame.seq <= self._last_emitted.seq:
            self.rejected_late += 1
            return False
        if self._playout_us(frame) < arrival_us:
            self.rejected_late += 1
            return False
        if len(self._frames) >= self.config.capacity_frames:
            return False
        self._frames[frame.seq] = frame
        self._seen.add(frame.seq)
        self.pushed += 1
        return True

    def pop(self, now_us: int) -> PopResult:
        """Consumer tick: next due frame, a concealment, silence, or stalled."""
        if self._base_offset_us is None:
            return PopResult(PopKind.STALLED)
        if self._frames:
            head_seq = min(self._frames)
            head = self._frames[head_seq]
            if self._playout_us(head) <= now_us:
                del self._frames[head_seq]
                self._last_emitted = head
                self._last_progress_us = now_us
                self._seen = {s for s in self._seen if s > head_seq}
                return PopResult(PopKind.FRAME, head)
        if self._last_emitted is None:
            return PopResult(PopKind.SILENCE)  # warming up to target latency
        if now_us - (self._last_progress_us or 0) < self._gap_us:
            self.concealed += 1
            return PopResult(PopKind.CONCEALED, self._last_emitted)
        return PopResult(PopKind.SILENCE)

    @property
    def depth(self) -> int:
        return len(self._frames)
