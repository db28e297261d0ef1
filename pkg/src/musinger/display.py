"""Simulated wearable display: three five-bar linkages along the forearm.

Each channel maps incoming force to a penetration depth below the skin
plane, runs inverse kinematics to get motor targets, and slews the
motors under a speed limit. All motion is kinematic; there is no
dynamics model. States are immutable snapshots safe to hand to
observers on other threads.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field

from .linkage import (LinkageGeometry, Unreachable, forward_kinematics,
                      inverse_kinematics)
from .model import (FORCE_MAX_N, NUM_CHANNELS, ForceFrame, Onset,
                    RhythmPattern)

ACTIVATION_THRESHOLD_N = 0.2  # forces below this render nothing
HOME_CLEARANCE_MM = 5.0       # idle effector height above the skin plane


def _default_geometries() -> tuple[LinkageGeometry, ...]:
    return tuple(LinkageGeometry() for _ in range(NUM_CHANNELS))


@dataclass(frozen=True)
class DisplayConfig:
    geometries: tuple[LinkageGeometry, ...] = field(
        default_factory=_default_geometries)
    skin_plane_y_mm: float = -55.0
    depth_max_mm: float = 3.0
    servo_max_speed_rad_s: float = 8.0
    tick_rate_hz: float = 100.0

    def __post_init__(self):
        if len(self.geometries) != NUM_CHANNELS:
            raise ValueError(f"need {NUM_CHANNELS} linkage geometries")
        if self.depth_max_mm <= 0:
            raise ValueError("depth_max_mm must be positive")
        if self.servo_max_speed_rad_s <= 0 or self.tick_rate_hz <= 0:
            raise ValueError("servo speed and tick rate must be positive")
        for i, geom in enumerate(self.geometries):
            for label, y in (("skin plane", self.skin_plane_y_mm),
                             ("full depth", self.skin_plane_y_mm - self.depth_max_mm),
                             ("home pose", self.skin_plane_y_mm + HOME_CLEARANCE_MM)):
                try:
                    inverse_kinematics(geom, (geom.x_center, y))
                except Unreachable as exc:
                    raise ValueError(
                        f"linkage {i}: {label} y={y} mm unreachable") from exc

    @property
    def dt_s(self) -> float:
        return 1.0 / self.tick_rate_hz

    def home_point(self, channel_index: int) -> tuple[float, float]:
        geom = self.geometries[channel_index]
        return (geom.x_center, self.skin_plane_y_mm + HOME_CLEARANCE_MM)


def force_to_depth(force_n: float, config: DisplayConfig) -> float:
    """Penetration command in mm; zero below the activation threshold."""
    if force_n < ACTIVATION_THRESHOLD_N:
        return 0.0
    return config.depth_max_mm * min(force_n, FORCE_MAX_N) / FORCE_MAX_N


@dataclass(frozen=True)
class LinkageState:
    """Snapshot of one linkage after a tick."""

    theta1_rad: float
    theta2_rad: float
    effector_mm: tuple[float, float]
    in_contact: bool
    contact_depth_mm: float
    clamped: bool = False  # target was unreachable and got projected back


class HapticDisplay:
    """Steps three independent linkages from force frames.

    Owned by a single simulation loop; render_tick mutates motor angles
    and returns the per-channel states for that tick.
    """

    def __init__(self, config: DisplayConfig | None = None):
        self.config = config or DisplayConfig()
        self._angles: list[tuple[float, float]] = []
        # forces repeat, so goal angles are cached per (channel, depth)
        self._goal_cache: dict[tuple[int, float], tuple[tuple[float, float], bool]] = {}
        states = []
        for ch in range(NUM_CHANNELS):
            geom = self.config.geometries[ch]
            angles = inverse_kinematics(geom, self.config.home_point(ch))
            self._angles.append(angles)
            states.append(self._snapshot(ch, angles, clamped=False))
        self.states: tuple[LinkageState, ...] = tuple(states)
        self.tick = 0

    def _snapshot(self, channel_index: int, angles: tuple[float, float],
                  clamped: bool) -> LinkageState:
        geom = self.config.geometries[channel_index]
        effector = forward_kinematics(geom, *angles)
        depth = max(0.0, self.config.skin_plane_y_mm - effector[1])
        return LinkageState(theta1_rad=angles[0], theta2_rad=angles[1],
                            effector_mm=effector,
                            in_contact=effector[1] <= self.config.skin_plane_y_mm,
                            contact_depth_mm=depth, clamped=clamped)

    def _goal_angles(self, channel_index: int,
                     depth: float) -> tuple[tuple[float, float], bool]:
        key = (channel_index, depth)
        hit = self._goal_cache.get(key)
        if hit is not None:
            return hit
        cfg = self.config
        geom = cfg.geometries[channel_index]
        if depth == 0.0:
            target = cfg.home_point(channel_index)
        else:
            target = (geom.x_center, cfg.skin_plane_y_mm - depth)
        try:
            result = (inverse_kinematics(geom, target), False)
        except Unreachable as exc:
            if exc.nearest is None:
                return (self._angles[channel_index], True)  # hold, don't cache
            result = (inverse_kinematics(geom, exc.nearest), True)
        self._goal_cache[key] = result
        return result

    def _step_channel(self, channel_index: int, force_n: float,
                      dt_s: float) -> LinkageState:
        cfg = self.config
        depth = force_to_depth(force_n, cfg)
        goal, clamped = self._goal_angles(channel_index, depth)
        limit = cfg.servo_max_speed_rad_s * dt_s
        cur = self._angles[channel_index]
        new = tuple(c + max(-limit, min(limit, g - c))
                    for c, g in zip(cur, goal))
        self._angles[channel_index] = new
        return self._snapshot(channel_index, new, clamped)

    def render_tick(self, frame_or_silence: ForceFrame | None,
                    dt_s: float | None = None) -> tuple[LinkageState, ...]:
        """Advance one tick toward the frame's forces (None = silence)."""
        dt = self.config.dt_s if dt_s is None else dt_s
        if dt <= 0:
            raise ValueError("dt_s must be positive")
        forces = (frame_or_silence.forces if frame_or_silence is not None
                  else (0.0,) * NUM_CHANNELS)
        self.states = tuple(self._step_channel(ch, forces[ch], dt)
                            for ch in range(NUM_CHANNELS))
        self.tick += 1
        return self.states


def render_tick(display: HapticDisplay, frame_or_silence: ForceFrame | None,
                dt_s: float) -> tuple[LinkageState, ...]:
    return display.render_tick(frame_or_silence, dt_s)


def extract_onsets(history: list[tuple[LinkageState, ...]],
                   config: DisplayConfig) -> RhythmPattern:
    """Recover the played pattern from a tick-rate state history.

    Each maximal in_contact run on a channel becomes one onset: start
    at the first contact tick, duration the run length, intensity the
    peak depth over depth_max.
    """
    dt_ms = 1000.0 / config.tick_rate_hz
    onsets = []
    for ch in range(NUM_CHANNELS):
        start = None
        peak = 0.0
        for tick, states in enumerate(history):
            state = states[ch]
            if state.in_contact:
                if start is None:
                    start = tick
                    peak = 0.0
                peak = max(peak, state.contact_depth_mm)
            elif start is not None:
                onsets.append(_run_onset(ch, start, tick, peak, dt_ms, config))
                start = None
        if start is not None:
            onsets.append(_run_onset(ch, start, len(history), peak, dt_ms, config))
    onsets.sort(key=lambda o: (o.time_ms, o.channel))
    return RhythmPattern(onsets=onsets).validate()


def _run_onset(channel_index: int, start_tick: int, end_tick: int,
               peak_depth: float, dt_ms: float, config: DisplayConfig) -> Onset:
    intensity = min(1.0, max(1e-6, peak_depth / config.depth_max_mm))
    return Onset(time_ms=start_tick * dt_ms, channel=channel_index + 1,
                 duration_ms=(end_tick - start_tick) * dt_ms,
                 intensity=intensity)


STATE_HISTORY_COLUMNS = ("tick", "channel", "theta1_rad", "theta2_rad",
                         "x_mm", "y_mm", "in_contact", "depth_mm")


def write_state_history(path, history: list[tuple[LinkageState, ...]]):
    """One CSV row per (tick, channel); in_contact serialized as 0/1."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(STATE_HISTORY_COLUMNS)
        for tick, states in enumerate(history):
            for ch, s in enumerate(states):
                writer.writerow([tick, ch + 1,
                                 repr(s.theta1_rad), repr(s.theta2_rad),
                                 repr(s.effector_mm[0]), repr(s.effector_mm[1]),
                                 int(s.in_contact), repr(s.contact_depth_mm)])


def read_state_history(path) -> list[tuple[LinkageState, ...]]:
    by_tick: dict[int, dict[int, LinkageState]] = {}
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None or tuple(reader.fieldnames) != STATE_HISTORY_COLUMNS:
            raise ValueError(f"bad state-history header: {reader.fieldnames}")
        for row in reader:
            state = LinkageState(
                theta1_rad=float(row["theta1_rad"]),
                theta2_rad=float(row["theta2_rad"]),
                effector_mm=(float(row["x_mm"]), float(row["y_mm"])),
                in_contact=bool(int(row["in_contact"])),
                contact_depth_mm=float(row["depth_mm"]))
            by_tick.setdefault(int(row["tick"]), {})[int(row["channel"])] = state
    history = []
    for tick in sorted(by_tick):
        channels = by_tick[tick]
        if sorted(channels) != [1, 2, 3]:
            raise ValueError(f"tick {tick} missing channels")
        history.append(tuple(channels[ch] for ch in (1, 2, 3)))
    return history
