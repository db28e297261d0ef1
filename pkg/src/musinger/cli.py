"""Command-line entry point.

Subcommands: play (replay a pattern through the simulated pipeline),
stream (live UDP sender/listener or loopback demo), trial (blind
recognition session), analyze (trial-log statistics), kinematics
(FK/IK/workspace queries). Exit codes are a stable contract: 0 success,
2 input or parse error, 3 network error, 4 UI unavailable.
"""

from __future__ import annotations

import argparse
import json
import logging
import math
import os
import random
import select
import socket
import sys
import time

from .config import ConfigError, load_pipeline_config
from .display import HapticDisplay, extract_onsets, write_state_history
from .experiment import (DEFAULT_REPS, build_session_plan, check_trial_records,
                         read_trial_log, run_session, write_trial_log)
from .linkage import (Unreachable, forward_kinematics, inverse_kinematics,
                      workspace_contains)
from .melodies import (MelodyId, RhythmFileError, TooShort, builtin_melody,
                       classify_melody, load_rhythm_file)
from .model import Condition, ForceFrame, RhythmPattern, monotonic_now
from .pipeline import PipelineConfig, stream_pattern
from .protocol import JitterBuffer, PopKind, decode_frame, encode_frame
from .recorder import encode_pattern, quantize_force
from .report import (build_report, format_report_text, render_confusion_figure,
                     render_depth_figure, render_workspace_figure)
from .transport import FaultProfile, UdpReceiver

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_NETWORK = 3
EXIT_NO_UI = 4

KEY_CHANNELS = {"j": 1, "k": 2, "l": 3}  # live tapping on a plain terminal
AUTO_RELEASE_MS = 120.0                  # terminals have no key-up events
LIVE_TAP_FORCE_N = 5.0


def derive_seed(seed: int, label: str) -> int:
    """Independent per-purpose streams from the single --seed flag."""
    return random.Random(f"{seed}:{label}").getrandbits(32)


def parse_endpoint(text: str) -> tuple[str, int]:
    host, sep, port_text = text.rpartition(":")
    if not sep or not host:
        raise argparse.ArgumentTypeError(f"expected HOST:PORT, got {text!r}")
    try:
        port = int(port_text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad port in {text!r}") from None
    if not 1 <= port <= 65535:
        raise argparse.ArgumentTypeError(f"port {port} outside 1..65535")
    return host, port


def probability(text: str) -> float:
    value = float(text)
    if not 0.0 <= value <= 1.0:
        raise argparse.ArgumentTypeError(f"probability {value} outside [0, 1]")
    return value


def nonnegative(text: str) -> float:
    value = float(text)
    if value < 0:
        raise argparse.ArgumentTypeError(f"{value} must be non-negative")
    return value


def positive(text: str) -> float:
    value = float(text)
    if value <= 0:
        raise argparse.ArgumentTypeError(f"{value} must be positive")
    return value


def _fault_profile(args) -> FaultProfile:
    return FaultProfile(loss=args.loss, dup=args.dup, jitter_ms=args.jitter)


def _with_faults(cfg: PipelineConfig, args) -> PipelineConfig:
    return PipelineConfig(sensor=cfg.sensor, display=cfg.display,
                          jitter=cfg.jitter, faults=_fault_profile(args),
                          settle_ms=cfg.settle_ms)


def _load_pattern(args) -> RhythmPattern:
    if args.melody:
        return builtin_melody(MelodyId.parse(args.melody))
    if not args.file:
        raise ValueError("need --melody or --file")
    return load_rhythm_file(args.file)


def _classify_or_none(pattern: RhythmPattern) -> MelodyId | None:
    try:
        return classify_melody(pattern)
    except TooShort:
        return None


def _figure_path(out_path: str) -> str:
    return os.path.splitext(out_path)[0] + ".png"


# --- play -------------------------------------------------------------------


def _send_pattern_udp(pattern: RhythmPattern, endpoint: tuple[str, int],
                      cfg: PipelineConfig) -> int:
    """Pace frames at sensor rate over a connected UDP socket.

    A connected socket surfaces ICMP port-unreachable as a send error,
    which is the only way to notice a missing listener over UDP.
    """
    frames = list(encode_pattern(pattern, cfg.sensor))
    sock = socket.socket(socket.AF_INET, socket.SOCK_DGRAM)
    try:
        sock.connect(endpoint)
    except OSError as exc:
        print(f"network error: cannot reach {endpoint[0]}:{endpoint[1]}: {exc}",
              file=sys.stderr)
        return EXIT_NETWORK
    start = time.monotonic()
    try:
        for i, frame in enumerate(frames):
            delay = start + frame.timestamp_us / 1e6 - time.monotonic()
            if delay > 0:
                time.sleep(delay)
            sock.send(encode_frame(frame, last=(i == len(frames) - 1)))
    except OSError as exc:
        print(f"network error: send to {endpoint[0]}:{endpoint[1]} failed: "
              f"{exc}", file=sys.stderr)
        return EXIT_NETWORK
    finally:
        sock.close()
    print(f"sent {len(frames)} frames to {endpoint[0]}:{endpoint[1]}")
    return EXIT_OK


def cmd_play(args, cfg: PipelineConfig) -> int:
    try:
        pattern = _load_pattern(args)
    except (RhythmFileError, ValueError) as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except OSError as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    if args.connect:
        return _send_pattern_udp(pattern, args.connect, cfg)

    result = stream_pattern(pattern, _with_faults(cfg, args),
                            seed=derive_seed(args.seed, "link"))
    guess = _classify_or_none(result.pattern)
    if args.out:
        write_state_history(args.out, result.history)
        render_depth_figure(result.history, cfg.display, _figure_path(args.out))
    summary = {
        "frames_sent": result.frames_sent,
        "frames_played": result.frames_played,
        "ticks_concealed": result.ticks_concealed,
        "datagrams_dropped": result.datagrams_dropped,
        "onsets_rendered": len(result.pattern.onsets),
        "classified": guess.value if guess else None,
    }
    if args.out:
        summary["history_csv"] = args.out
        summary["figure"] = _figure_path(args.out)
    if args.json:
        print(json.dumps(summary, indent=2))
    else:
        for key, value in summary.items():
            print(f"{key}: {value}")
    return EXIT_OK


# --- stream -----------------------------------------------------------------


def _stream_report(args, received: int, bad: int, concealed: int,
                   history, cfg: PipelineConfig) -> None:
    pattern = extract_onsets(history, cfg.display)
    guess = _classify_or_none(pattern)
    if args.out:
        write_state_history(args.out, history)
    summary = {
        "frames_received": received,
        "bad_datagrams": bad,
        "ticks_concealed": concealed,
        "ticks_rendered": len(history),
        "onsets_rendered": len(pattern.onsets),
        "classified": guess.value if guess else None,
    }
    if args.json:
        print(json.dumps(summary, indent=2))
    else:
        for key, value in summary.items():
            print(f"{key}: {value}")


def _geometry_payload(cfg: PipelineConfig) -> dict:
    geom = cfg.display.geometries[0]
    return {
        "base_separation_mm": geom.base_separation_mm,
        "proximal_length_mm": geom.proximal_length_mm,
        "distal_length_mm": geom.distal_length_mm,
        "skin_plane_y_mm": cfg.display.skin_plane_y_mm,
        "depth_max_mm": cfg.display.depth_max_mm,
    }


def _run_listener(args, cfg: PipelineConfig) -> int:
    host, port = args.listen
    try:
        receiver = UdpReceiver(host, port, timeout_s=0.0)
    except OSError as exc:
        print(f"network error: cannot bind {host}:{port}: {exc}",
              file=sys.stderr)
        return EXIT_NETWORK

    bridge_server = synth = None
    if args.ui_port:
        try:
            from . import bridge
            bridge_server = bridge.BridgeServer(args.ui_port)
            bridge_server.start()
            synth = bridge.TapSynth(cfg.sensor)
        except Exception as exc:  # missing dependency or bind failure
            print(f"ui error: cannot start bridge on port {args.ui_port}: "
                  f"{exc}", file=sys.stderr)
            receiver.close()
            return EXIT_NO_UI

    jbuf = JitterBuffer(cfg.jitter)
    display = HapticDisplay(cfg.display)
    geometry = _geometry_payload(cfg)
    history = []
    tick_us = round(1_000_000 / cfg.display.tick_rate_hz)
    settle_ticks = int(cfg.settle_ms * 1000 / tick_us)
    received = concealed = 0
    saw_last = False
    deadline_us = (monotonic_now() + int(args.duration * 1e6)
                   if args.duration else None)
    next_tick = monotonic_now()
    quiet = 0
    print(f"listening on {host}:{port} (Ctrl-C to stop)", file=sys.stderr)
    try:
        while True:
            got = receiver.receive()
            while got is not None:
                frame, last = got
                saw_last = saw_last or last
                if jbuf.push(frame, monotonic_now()):
                    received += 1
                got = receiver.receive()
            if bridge_server:
                now = monotonic_now()
                for message in bridge_server.poll_taps():
                    synth.apply(message, now)
                for frame in synth.frames(now):
                    # round-trip the codec so taps share the wire contract
                    decoded, _ = decode_frame(encode_frame(frame))
                    if jbuf.push(decoded, monotonic_now()):
                        received += 1
            now = monotonic_now()
            if now >= next_tick:
                result = jbuf.pop(now)
                if result.kind is PopKind.CONCEALED:
                    concealed += 1
                history.append(display.render_tick(result.frame))
                if bridge_server:
                    bridge_server.publish_state(display.tick, history[-1],
                                                geometry)
                next_tick += tick_us
                drained = saw_last and jbuf.depth == 0
                quiet = quiet + 1 if drained else 0
                if quiet > settle_ticks:
                    break
            else:
                time.sleep(min(0.0005, (next_tick - now) / 1e6))
            if deadline_us is not None and monotonic_now() >= deadline_us:
                break
    except KeyboardInterrupt:
        pass
    finally:
        receiver.close()
        if bridge_server:
            bridge_server.stop()
    _stream_report(args, received, receiver.bad_datagrams, concealed,
                   history, cfg)
    return EXIT_OK


class _RawTerminal:
    """Best-effort cbreak mode; inert when stdin is not a tty."""

    def __init__(self):
        self.enabled = sys.stdin.isatty()
        self._saved = None

    def __enter__(self):
        if self.enabled:
            import termios
            import tty
            self._saved = termios.tcgetattr(sys.stdin.fileno())
            tty.setcbreak(sys.stdin.fileno())
        return self

    def __exit__(self, *exc):
        if self._saved is not None:
            import termios
            termios.tcsetattr(sys.stdin.fileno(), termios.TCSADRAIN,
                              self._saved)


def _run_live_sender(args, cfg: PipelineConfig) -> int:
    """Tap on j/k/l; presses auto-release after AUTO_RELEASE_MS."""
    endpoint = args.connect
    sock = socket.socket(socket.AF_INET, socket.SOCK_DGRAM)
    try:
        sock.connect(endpoint)
    except OSError as exc:
        print(f"network error: cannot reach {endpoint[0]}:{endpoint[1]}: {exc}",
              file=sys.stderr)
        return EXIT_NETWORK
    interval_s = 1.0 / cfg.sensor.sample_rate_hz
    release_at = [0.0, 0.0, 0.0]
    seq = 0
    start = time.monotonic()
    print("tap with j/k/l (channels 1-3), q to finish", file=sys.stderr)
    try:
        with _RawTerminal():
            while True:
                ready, _, _ = select.select([sys.stdin], [], [], interval_s)
                now = time.monotonic()
                if ready:
                    ch = sys.stdin.read(1).lower()
                    if ch == "q" or ch == "":
                        break
                    if ch in KEY_CHANNELS:
                        release_at[KEY_CHANNELS[ch] - 1] = now + AUTO_RELEASE_MS / 1000.0
                forces = tuple(
                    quantize_force(LIVE_TAP_FORCE_N, cfg.sensor)
                    if release_at[i] > now else 0.0 for i in range(3))
                frame = ForceFrame(seq=seq,
                                   timestamp_us=int((now - start) * 1e6),
                                   forces=forces)
                sock.send(encode_frame(frame))
                seq += 1
    except OSError as exc:
        print(f"network error: {exc}", file=sys.stderr)
        return EXIT_NETWORK
    except KeyboardInterrupt:
        pass
    finally:
        try:
            final = ForceFrame(seq=seq, timestamp_us=int(
                (time.monotonic() - start) * 1e6), forces=(0.0, 0.0, 0.0))
            sock.send(encode_frame(final, last=True))
        except OSError:
            pass
        sock.close()
    print(f"sent {seq + 1} frames", file=sys.stderr)
    return EXIT_OK


def cmd_stream(args, cfg: PipelineConfig) -> int:
    if args.loopback:
        try:
            pattern = _load_pattern(args) if (args.melody or args.file) else None
        except (RhythmFileError, ValueError, OSError) as exc:
            print(f"input error: {exc}", file=sys.stderr)
            return EXIT_INPUT
        if pattern is None:
            print("input error: loopback stream needs --melody or --file",
                  file=sys.stderr)
            return EXIT_INPUT
        result = stream_pattern(pattern, _with_faults(cfg, args),
                                seed=derive_seed(args.seed, "link"))
        _stream_report(args, result.frames_accepted, 0,
                       result.ticks_concealed, result.history, cfg)
        return EXIT_OK
    if args.listen:
        return _run_listener(args, cfg)
    if args.connect:
        if args.melody or args.file:
            try:
                pattern = _load_pattern(args)
            except (RhythmFileError, ValueError, OSError) as exc:
                print(f"input error: {exc}", file=sys.stderr)
                return EXIT_INPUT
            return _send_pattern_udp(pattern, args.connect, cfg)
        return _run_live_sender(args, cfg)
    print("input error: stream needs --listen, --connect, or --loopback",
          file=sys.stderr)
    return EXIT_INPUT


# --- trial ------------------------------------------------------------------


def _stdin_answer(observation, trial_index: int) -> MelodyId | None:
    del observation  # the subject felt the device, not the data
    prompt = f"trial {trial_index}: which melody (A-D, blank to skip)? "
    try:
        reply = input(prompt).strip()
    except EOFError:
        return None
    if not reply:
        return None
    try:
        return MelodyId.parse(reply)
    except ValueError:
        print(f"unrecognized answer {reply!r}, trial skipped", file=sys.stderr)
        return None


def cmd_trial(args, cfg: PipelineConfig) -> int:
    try:
        condition = Condition.parse(args.condition)
    except ValueError as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    plan = build_session_plan(reps=args.reps,
                              seed=derive_seed(args.seed, "plan"))
    played_cfg = _with_faults(cfg, args)

    ui = None
    if args.answers == "machine":
        def answer_source(observation, index):
            del index
            return _classify_or_none(observation)
    elif args.answers == "stdin":
        answer_source = _stdin_answer
    else:  # ui
        try:
            from . import bridge
            ui = bridge.UiAnswerSource(args.ui_port or bridge.DEFAULT_UI_PORT,
                                       timeout_s=args.answer_timeout,
                                       connect_timeout_s=args.answer_timeout)
            ui.start()
        except Exception as exc:
            print(f"ui error: {exc}", file=sys.stderr)
            return EXIT_NO_UI
        answer_source = ui

    trial_counter = {"n": 0}
    geometry = _geometry_payload(cfg)

    def presenter(melody: MelodyId) -> RhythmPattern:
        run_seed = derive_seed(args.seed, f"trial-{trial_counter['n']}")
        trial_counter["n"] += 1
        result = stream_pattern(builtin_melody(melody), played_cfg,
                                seed=run_seed)
        if ui is not None:
            # replay at tick rate so the subject watches it in real time
            for tick, states in enumerate(result.history):
                ui.server.publish_state(tick, states, geometry)
                time.sleep(cfg.display.dt_s / args.replay_speed)
        return result.pattern

    try:
        records = run_session(plan, condition, presenter, answer_source,
                              participant=args.participant)
    finally:
        if ui is not None:
            ui.stop()

    path = args.out or "trials.csv"
    existing = []
    if os.path.exists(path):
        try:
            existing = read_trial_log(path)
        except ValueError as exc:
            print(f"input error: existing log {path}: {exc}", file=sys.stderr)
            return EXIT_INPUT
    merged = existing + records
    try:
        check_trial_records(merged)
    except ValueError as exc:
        print(f"input error: {exc} (already ran this session?)",
              file=sys.stderr)
        return EXIT_INPUT
    write_trial_log(path, merged)
    correct = sum(r.correct for r in records)
    summary = {"participant": args.participant, "condition": condition.value,
               "trials": len(records), "correct": correct, "log": path}
    if args.json:
        print(json.dumps(summary, indent=2))
    else:
        print(f"{len(records)} trials recorded for {args.participant} "
              f"({condition.value}), {correct} correct, log: {path}")
    return EXIT_OK


# --- analyze ----------------------------------------------------------------


def cmd_analyze(args, cfg: PipelineConfig) -> int:
    del cfg
    try:
        records = read_trial_log(args.log)
    except OSError as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except ValueError as exc:
        print(f"input error: {args.log}: {exc}", file=sys.stderr)
        return EXIT_INPUT
    if not records:
        print(f"input error: {args.log}: log has no trials", file=sys.stderr)
        return EXIT_INPUT
    report = build_report(records)
    if args.out:
        os.makedirs(args.out, exist_ok=True)
        text_path = os.path.join(args.out, "report.txt")
        with open(text_path, "w", encoding="utf-8") as fh:
            fh.write(format_report_text(report))
        json_path = os.path.join(args.out, "report.json")
        with open(json_path, "w", encoding="utf-8") as fh:
            json.dump(report, fh, indent=2)
            fh.write("\n")
        figures = []
        for name, block in report["conditions"].items():
            figure_path = os.path.join(args.out, f"confusion_{name}.png")
            render_confusion_figure(block["counts"], f"condition {name}",
                                    figure_path)
            figures.append(figure_path)
        report["outputs"] = {"text": text_path, "json": json_path,
                             "figures": figures}
    if args.json:
        print(json.dumps(report, indent=2))
    else:
        print(format_report_text(report), end="")
    return EXIT_OK


# --- kinematics -------------------------------------------------------------


def cmd_kinematics(args, cfg: PipelineConfig) -> int:
    geom = cfg.display.geometries[0]
    overrides = {}
    for flag, field_name in (("base_mm", "base_separation_mm"),
                             ("proximal_mm", "proximal_length_mm"),
                             ("distal_mm", "distal_length_mm")):
        value = getattr(args, flag)
        if value is not None:
            overrides[field_name] = value
    if overrides:
        from dataclasses import replace
        try:
            geom = replace(geom, **overrides)
        except ValueError as exc:
            print(f"input error: {exc}", file=sys.stderr)
            return EXIT_INPUT

    if args.fk:
        theta1, theta2 = (math.radians(v) for v in args.fk)
        if not (geom.in_limits(theta1) and geom.in_limits(theta2)):
            print(f"input error: angles {args.fk[0]} {args.fk[1]} deg outside "
                  f"limits [{math.degrees(geom.angle_min_rad):.1f}, "
                  f"{math.degrees(geom.angle_max_rad):.1f}]", file=sys.stderr)
            return EXIT_INPUT
        try:
            x, y = forward_kinematics(geom, theta1, theta2)
        except Unreachable as exc:
            print(f"unreachable: {exc}")
            return EXIT_OK
        if args.json:
            print(json.dumps({"x_mm": x, "y_mm": y}))
        else:
            print(f"{x:.3f} {y:.3f}")
        return EXIT_OK

    if args.ik:
        target = (args.ik[0], args.ik[1])
        try:
            theta1, theta2 = inverse_kinematics(geom, target)
        except Unreachable as exc:
            if exc.nearest is None:
                print("unreachable")
            else:
                print(f"unreachable nearest {exc.nearest[0]:.3f} "
                      f"{exc.nearest[1]:.3f}")
            return EXIT_OK
        if args.json:
            print(json.dumps({"theta1_deg": math.degrees(theta1),
                              "theta2_deg": math.degrees(theta2)}))
        else:
            print(f"{math.degrees(theta1):.3f} {math.degrees(theta2):.3f}")
        return EXIT_OK

    # workspace grid
    reach = geom.proximal_length_mm + geom.distal_length_mm
    step = args.step
    xs, points = [], []
    x = -reach
    while x <= geom.base_separation_mm + reach + 1e-9:
        xs.append(round(x, 9))
        x += step
    y = -reach
    rows = ["x_mm,y_mm,reachable"]
    while y <= reach + 1e-9:
        for gx in xs:
            ok = workspace_contains(geom, (gx, round(y, 9)))
            rows.append(f"{gx:g},{round(y, 9):g},{int(ok)}")
            points.append((gx, y, ok))
        y += step
    text = "\n".join(rows) + "\n"
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
        render_workspace_figure(points, _figure_path(args.out))
        print(f"workspace grid: {args.out}, figure: {_figure_path(args.out)}")
    else:
        sys.stdout.write(text)
    return EXIT_OK


# --- parser -----------------------------------------------------------------


def _add_fault_flags(parser):
    parser.add_argument("--loopback", action="store_true",
                        help="run producer and consumer in-process")
    parser.add_argument("--loss", type=probability, default=0.0,
                        help="loopback drop probability")
    parser.add_argument("--jitter", type=nonnegative, default=0.0,
                        help="loopback jitter in ms")
    parser.add_argument("--dup", type=probability, default=0.0,
                        help="loopback duplication probability")


def _add_out_flags(parser):
    parser.add_argument("--out", help="output path")
    parser.add_argument("--json", action="store_true",
                        help="machine-readable output")


def _add_global_overrides(parser):
    # also accepted after the subcommand; SUPPRESS keeps the root value
    # when the flag is absent instead of clobbering it with a default
    parser.add_argument("--config", default=argparse.SUPPRESS,
                        help=argparse.SUPPRESS)
    parser.add_argument("--seed", type=int, default=argparse.SUPPRESS,
                        help=argparse.SUPPRESS)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="musinger",
        description="tap-to-tactile melody streaming and analysis")
    parser.add_argument("--config", help="key=value config file "
                        "(else $MUSINGER_CONFIG, else defaults)")
    parser.add_argument("--seed", type=int, default=0,
                        help="root seed for all randomness")
    parser.add_argument("-v", "--verbose", action="count", default=0)
    sub = parser.add_subparsers(dest="command", required=True)

    p_play = sub.add_parser("play", help="replay a melody or rhythm file")
    p_play.add_argument("--melody", help="builtin melody id A-D")
    p_play.add_argument("--file", help="MRF1 rhythm file")
    p_play.add_argument("--connect", type=parse_endpoint, metavar="HOST:PORT",
                        help="send over UDP instead of the local simulator")
    _add_fault_flags(p_play)
    _add_out_flags(p_play)
    _add_global_overrides(p_play)
    p_play.set_defaults(func=cmd_play)

    p_stream = sub.add_parser("stream", help="live streaming endpoints")
    p_stream.add_argument("--listen", type=parse_endpoint, metavar="HOST:PORT")
    p_stream.add_argument("--connect", type=parse_endpoint, metavar="HOST:PORT")
    p_stream.add_argument("--melody", help="builtin melody id A-D")
    p_stream.add_argument("--file", help="MRF1 rhythm file")
    p_stream.add_argument("--ui-port", type=int,
                          help="serve the web console bridge on this port")
    p_stream.add_argument("--duration", type=positive,
                          help="stop the listener after this many seconds")
    _add_fault_flags(p_stream)
    _add_out_flags(p_stream)
    _add_global_overrides(p_stream)
    p_stream.set_defaults(func=cmd_stream)

    p_trial = sub.add_parser("trial", help="run a blind recognition session")
    p_trial.add_argument("--participant", default="P1")
    p_trial.add_argument("--condition", default="none",
                         help="none or white")
    p_trial.add_argument("--answers", choices=("machine", "ui", "stdin"),
                         default="machine")
    p_trial.add_argument("--reps", type=int, default=DEFAULT_REPS)
    p_trial.add_argument("--ui-port", type=int)
    p_trial.add_argument("--answer-timeout", type=positive, default=60.0,
                         help="seconds to wait for a UI answer")
    p_trial.add_argument("--replay-speed", type=positive, default=1.0,
                         help="UI presentation speed multiplier")
    _add_fault_flags(p_trial)
    _add_out_flags(p_trial)
    _add_global_overrides(p_trial)
    p_trial.set_defaults(func=cmd_trial)

    p_analyze = sub.add_parser("analyze", help="statistics from a trial log")
    p_analyze.add_argument("log", help="trial-log CSV path")
    _add_out_flags(p_analyze)
    _add_global_overrides(p_analyze)
    p_analyze.set_defaults(func=cmd_analyze)

    p_kin = sub.add_parser("kinematics", help="FK/IK/workspace queries")
    group = p_kin.add_mutually_exclusive_group(required=True)
    group.add_argument("--fk", nargs=2, type=float,
                       metavar=("THETA1_DEG", "THETA2_DEG"))
    group.add_argument("--ik", nargs=2, type=float, metavar=("X_MM", "Y_MM"))
    group.add_argument("--workspace", action="store_true")
    p_kin.add_argument("--step", type=positive, default=1.0,
                       help="workspace grid spacing in mm")
    p_kin.add_argument("--base-mm", type=positive, dest="base_mm")
    p_kin.add_argument("--proximal-mm", type=positive, dest="proximal_mm")
    p_kin.add_argument("--distal-mm", type=positive, dest="distal_mm")
    _add_out_flags(p_kin)
    _add_global_overrides(p_kin)
    p_kin.set_defaults(func=cmd_kinematics)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    level = (logging.WARNING, logging.INFO, logging.DEBUG)[min(args.verbose, 2)]
    logging.basicConfig(level=level, format="%(levelname)s %(name)s: %(message)s")
    try:
        cfg = load_pipeline_config(args.config)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    return args.func(args, cfg)


if __name__ == "__main__":
    sys.exit(main())
