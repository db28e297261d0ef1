"""Frame transports: an in-process fault-injecting loopback, and UDP.

The loopback link carries raw datagrams with seeded loss, duplication
and jitter, so streaming behaviour is reproducible in tests and demos
without touching a socket. The UDP pair is the real thing; both ends
speak the 24-byte datagram format from protocol.py.
"""

from __future__ import annotations

import heapq
import random
import socket
from dataclasses import dataclass

from .model import ForceFrame
from .protocol import (DATAGRAM_SIZE, DEFAULT_PORT, ProtocolError,
                       decode_frame, encode_frame)


@dataclass(frozen=True)
class FaultProfile:
    """Impairments applied per datagram, all probabilities in [0, 1]."""

    loss: float = 0.0        # drop probability
    dup: float = 0.0         # duplicate probability
    jitter_ms: float = 0.0   # delay drawn uniformly from [0, jitter_ms]
    base_delay_ms: float = 1.0

    def __post_init__(self):
        for name in ("loss", "dup"):
            p = getattr(self, name)
            if not 0.0 <= p <= 1.0:
                raise ValueError(f"{name} probability {p} outside [0, 1]")
        if self.jitter_ms < 0 or self.base_delay_ms < 0:
            raise ValueError("delays must be non-negative")


class LoopbackLink:
    """Deterministic unreliable channel keyed on a virtual clock.

    send() enqueues a datagram with a seeded random delay (or drops or
    duplicates it); receive(now_us) drains everything whose delivery
    time has passed. Arrival order follows delivery time, so reordering
    emerges naturally from jitter.
    """

    def __init__(self, profile: FaultProfile = FaultProfile(), seed: int = 0):
        self.profile = profile
        self._rng = random.Random(seed)
        self._queue: list[tuple[int, int, bytes]] = []  # (deliver_us, tiebreak, data)
        self._counter = 0
        self.sent = 0
        self.dropped = 0
        self.duplicated = 0

    def _delay_us(self) -> int:
        d = self.profile.base_delay_ms + self._rng.uniform(0, self.profile.jitter_ms)
        return int(d * 1000)

    def send(self, data: bytes, now_us: int):
        self.sent += 1
        if self._rng.random() < self.profile.loss:
            self.dropped += 1
            return
        copies = 1
        if self._rng.random() < self.profile.dup:
            copies = 2
            self.duplicated += 1
        for _ in range(copies):
            self._counter += 1
            heapq.heappush(self._queue,
                           (now_us + self._delay_us(), self._counter, data))

    def receive(self, now_us: int) -> list[tuple[int, bytes]]:
        """All (arrival_us, datagram) pairs due by now, in arrival order."""
        out = []
        while self._queue and self._queue[0][0] <= now_us:
            deliver, _, data = heapq.heappop(self._queue)
            out.append((deliver, data))
        return out

    @property
    def in_flight(self) -> int:
        return len(self._queue)


class UdpSender:
    """Fire-and-forget frame sender."""

    def __init__(self, host: str = "127.0.0.1", port: int = DEFAULT_PORT):
        self._addr = (host, port)
        self._sock = socket.socket(socket.AF_INET, socket.SOCK_DGRAM)

    def send(self, frame: ForceFrame, last: bool = False):
        self._sock.sendto(encode_frame(frame, last=last), self._addr)

    def close(self):
        self._sock.close()

    def __enter__(self):
        return self

    def __exit__(self, *exc):
        self.close()


class UdpReceiver:
    """Blocking frame receiver; undecodable datagrams are counted, not raised."""

    def __init__(self, host: str = "0.0.0.0", port: int = DEFAULT_PORT,
                 timeout_s: float | None = 0.5):
        # no SO_REUSEADDR: a second listener on the port must fail loudly
        self._sock = socket.socket(socket.AF_INET, socket.SOCK_DGRAM)
        self._sock.bind((host, port))
        self._sock.settimeout(timeout_s)
        self.bad_datagrams = 0

    @property
    def port(self) -> int:
        return self._sock.getsockname()[1]

    def receive(self) -> tuple[ForceFrame, bool] | None:
        """Next valid frame, or None on timeout."""
        while True:
            try:
                data, _ = self._sock.recvfrom(DATAGRAM_SIZE * 4)
            except (socket.timeout, BlockingIOError):
                # timeout 0 means non-blocking and raises the latter
                return None
            try:
                return decode_frame(data)
            except ProtocolError:
                self.bad_datagrams += 1

    def close(self):
        self._sock.close()

    def __enter__(self):
        return self

    def __exit__(self, *exc):
        self.close()
