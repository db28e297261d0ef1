"""WebSocket bridge between the core process and the browser console.

One port serves both the static console assets and a JSON message
socket at /bridge. Message types: "tap" and "answer" flow from the
browser in; "state" and "prompt" flow out. The browser never sees the
binary datagram protocol — taps are synthesized into force frames by
the core so the wire codec stays in one implementation.
"""

from __future__ import annotations

import importlib.resources
import json
import logging
import mimetypes
import queue
import threading
from typing import Iterable

from websockets.datastructures import Headers
from websockets.http11 import Response
from websockets.sync.server import serve

from .display import LinkageState
from .melodies import MelodyId
from .model import FORCE_MAX_N, ForceFrame
from .recorder import SensorConfig, quantize_force

DEFAULT_UI_PORT = 8765
BRIDGE_PATH = "/bridge"

log = logging.getLogger(__name__)


class BridgeError(RuntimeError):
    """The UI side could not be brought up or never connected."""


def _static_response(path: str) -> Response:
    name = "index.html" if path in ("", "/") else path.lstrip("/")
    if ".." in name or name.startswith("/"):
        return _plain_response(403, "Forbidden", b"forbidden\n")
    resource = importlib.resources.files("musinger") / "webui" / name
    try:
        body = resource.read_bytes()
    except (FileNotFoundError, IsADirectoryError, NotADirectoryError):
        return _plain_response(404, "Not Found", b"not found\n")
    ctype = mimetypes.guess_type(name)[0] or "application/octet-stream"
    headers = Headers([("Content-Type", ctype),
                       ("Content-Length", str(len(body)))])
    return Response(200, "OK", headers, body)


def _plain_response(status: int, reason: str, body: bytes) -> Response:
    headers = Headers([("Content-Type", "text/plain"),
                       ("Content-Length", str(len(body)))])
    return Response(status, reason, headers, body)


class BridgeServer:
    """Threaded bridge endpoint shared by cmd_stream and cmd_trial.

    The simulation loop calls publish_state/poll_taps/request_answer
    from its own thread; client handlers run on server threads and only
    touch queues and the connection set under a lock.
    """

    def __init__(self, port: int = DEFAULT_UI_PORT, host: str = "127.0.0.1"):
        self.host = host
        self.port = port
        self._clients = set()
        self._lock = threading.Lock()
        self._taps: queue.SimpleQueue = queue.SimpleQueue()
        self._answers: queue.SimpleQueue = queue.SimpleQueue()
        self._connected = threading.Event()
        self._server = None
        self._thread = None

    def start(self) -> None:
        if self._server is not None:
            raise BridgeError("bridge already started")
        try:
            self._server = serve(self._handler, self.host, self.port,
                                 process_request=self._process_request)
        except OSError as exc:
            raise BridgeError(
                f"cannot bind bridge to {self.host}:{self.port}: {exc}"
            ) from exc
        if self.port == 0:  # ephemeral bind: expose the real port
            self.port = self._server.socket.getsockname()[1]
        self._thread = threading.Thread(target=self._server.serve_forever,
                                        name="bridge", daemon=True)
        self._thread.start()
        log.info("bridge listening on http://%s:%d%s",
                 self.host, self.port, BRIDGE_PATH)

    def stop(self) -> None:
        if self._server is not None:
            self._server.shutdown()
            self._thread.join(timeout=5)
            self._server = None

    def wait_for_client(self, timeout_s: float) -> bool:
        return self._connected.wait(timeout_s)

    @property
    def client_count(self) -> int:
        with self._lock:
            return len(self._clients)

    # --- server side ---

    def _process_request(self, connection, request):
        if request.path.split("?")[0] == BRIDGE_PATH:
            return None  # proceed with the websocket handshake
        return _static_response(request.path.split("?")[0])

    def _handler(self, connection) -> None:
        with self._lock:
            self._clients.add(connection)
        self._connected.set()
        try:
            for raw in connection:
                try:
                    message = json.loads(raw)
                except ValueError:
                    log.warning("bridge: discarding non-JSON message")
                    continue
                kind = message.get("type")
                if kind == "tap":
                    self._taps.put(message)
                elif kind == "answer":
                    self._answers.put(message)
                else:
                    log.warning("bridge: ignoring message type %r", kind)
        except Exception:
            pass  # disconnects are routine
        finally:
            with self._lock:
                self._clients.discard(connection)

    def _broadcast(self, payload: str) -> None:
        with self._lock:
            clients = list(self._clients)
        for client in clients:
            try:
                client.send(payload)
            except Exception:
                with self._lock:
                    self._clients.discard(client)

    # --- simulation side ---

    def publish_state(self, tick: int, states: Iterable[LinkageState],
                      geometry: dict | None = None) -> None:
        linkages = [{
            "x_mm": s.effector_mm[0],
            "y_mm": s.effector_mm[1],
            "in_contact": s.in_contact,
            "depth_mm": s.contact_depth_mm,
            "theta1_rad": s.theta1_rad,
            "theta2_rad": s.theta2_rad,
        } for s in states]
        message = {"type": "state", "tick": tick, "linkages": linkages}
        if geometry is not None:
            message["geometry"] = geometry
        self._broadcast(json.dumps(message))

    def poll_taps(self) -> list[dict]:
        taps = []
        while True:
            try:
                taps.append(self._taps.get_nowait())
            except queue.Empty:
                return taps

    def request_answer(self, trial_index: int,
                       timeout_s: float) -> MelodyId | None:
        while True:  # stale answers from a previous prompt are void
            try:
                self._answers.get_nowait()
            except queue.Empty:
                break
        self._broadcast(json.dumps({"type": "prompt",
                                    "trial_index": trial_index}))
        try:
            message = self._answers.get(timeout=timeout_s)
        except queue.Empty:
            log.warning("bridge: no answer for trial %d within %.0f s",
                        trial_index, timeout_s)
            return None
        try:
            return MelodyId.parse(str(message.get("melody")))
        except ValueError:
            log.warning("bridge: unparseable answer %r", message)
            return None


class TapSynth:
    """Paces browser Press/Release events into sensor-rate force frames.

    Emits frames only while a press is active or shortly after, so an
    idle console adds no traffic. Sequence numbers and timestamps live
    in the caller's monotonic clock domain.
    """

    IDLE_TAIL_US = 300_000  # keep emitting zeros briefly after release

    def __init__(self, sensor: SensorConfig):
        self._sensor = sensor
        self._forces = [0.0, 0.0, 0.0]
        self._seq = 0
        self._next_us: int | None = None
        self._active_until_us = 0

    def apply(self, message: dict, now_us: int) -> None:
        try:
            channel = int(message["channel"])
            kind = str(message.get("kind", "Press"))
        except (KeyError, TypeError, ValueError):
            log.warning("bridge: malformed tap %r", message)
            return
        if channel not in (1, 2, 3):
            log.warning("bridge: tap on bad channel %r", channel)
            return
        if kind == "Press":
            force = float(message.get("force_n", FORCE_MAX_N))
            force = min(max(force, 0.0), FORCE_MAX_N)
            self._forces[channel - 1] = quantize_force(force, self._sensor)
        else:
            self._forces[channel - 1] = 0.0
        if self._next_us is None:
            self._next_us = now_us
        self._active_until_us = now_us + self.IDLE_TAIL_US

    def frames(self, now_us: int) -> list[ForceFrame]:
        out = []
        while self._next_us is not None and self._next_us <= now_us:
            out.append(ForceFrame(seq=self._seq, timestamp_us=self._next_us,
                                  forces=tuple(self._forces)))
            self._seq += 1
            self._next_us += self._sensor.frame_interval_us
            if (self._next_us > self._active_until_us
                    and not any(self._forces)):
                self._next_us = None
        return out


class UiAnswerSource:
    """run_session answer source backed by the bridge prompt/answer flow."""

    def __init__(self, port: int = DEFAULT_UI_PORT, host: str = "127.0.0.1",
                 timeout_s: float = 60.0, connect_timeout_s: float = 30.0):
        self.server = BridgeServer(port, host)
        self.timeout_s = timeout_s
        self.connect_timeout_s = connect_timeout_s

    def start(self) -> None:
        self.server.start()
        print(f"waiting for the console to connect on "
              f"http://{self.server.host}:{self.server.port}/ ...")
        if not self.server.wait_for_client(self.connect_timeout_s):
            self.server.stop()
            raise BridgeError("no UI client connected")

    def stop(self) -> None:
        self.server.stop()

    def __call__(self, observation, trial_index: int) -> MelodyId | None:
        del observation  # the subject answers from what was rendered
        return self.server.request_answer(trial_index, self.timeout_s)
