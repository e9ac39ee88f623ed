"""Recorded metric streams: .ajsonl files, reading, and replay.

A trace is a header line followed by one metrics message per line, in
non-decreasing t_ms order:

    {"type":"trace_header","version":1,"session":S,"config":{...}}
    {"type":"metrics",...}
    ...

Replay has two targets. Engine-direct replay recomputes gestures from
the recorded pose stream and runs the session offline; it is a pure
function of the trace bytes plus the seed, so re-running it reproduces
the decision log byte for byte. Live replay pushes the frames over the
wire protocol to a running server, paced by recorded t_ms divided by a
speed factor (the server still windows by receipt time, so live
decisions reflect arrival cadence, not recorded timestamps).
"""
from __future__ import annotations

import asyncio
import json
import math
from dataclasses import dataclass
from pathlib import Path

from .affect import MetricFrame
from .engine import SessionConfig, SpotlightDecision, run_session
from .gestures import DetectorConfig, estimate_frames
from .wire import (
    Join,
    WireError,
    decode,
    decode_session_config,
    encode,
    encode_session_config,
)

TRACE_VERSION = 1


class TraceError(ValueError):
    """Raised for unreadable or ill-formed trace files."""


@dataclass
class Trace:
    session: str
    config: SessionConfig
    frames: list[MetricFrame]


def header_line(session: str, config: SessionConfig) -> str:
    return json.dumps(
        {
            "type": "trace_header",
            "version": TRACE_VERSION,
            "session": session,
            "config": encode_session_config(config),
        },
        separators=(",", ":"),
    )


def write_trace(frames, config: SessionConfig, sink, session: str = "trace") -> int:
    """Write header plus one metrics line per frame. Frames must arrive
    in non-decreasing t_ms order. Returns the number of frames written."""
    sink.write(header_line(session, config) + "\n")
    last_t = None
    count = 0
    for frame in frames:
        if last_t is not None and frame.t_ms < last_t:
            raise TraceError(f"frames not sorted by t_ms: {frame.t_ms} after {last_t}")
        last_t = frame.t_ms
        sink.write(encode(frame) + "\n")
        count += 1
    return count


def save_trace(frames, config: SessionConfig, path, session: str = "trace") -> int:
    with open(path, "w", encoding="utf-8") as sink:
        return write_trace(frames, config, sink, session=session)


def read_trace(source) -> Trace:
    """Parse a trace from a path or open file object.

    Errors carry 1-based line numbers. Unknown extra fields on any line
    are ignored.
    """
    if isinstance(source, (str, Path)):
        text = Path(source).read_text(encoding="utf-8")
    else:
        text = source.read()
    lines = text.splitlines()
    if not lines:
        raise TraceError("line 1: missing trace header")
    try:
        head = json.loads(lines[0])
    except json.JSONDecodeError as exc:
        raise TraceError(f"line 1: {exc}") from exc
    if not isinstance(head, dict) or head.get("type") != "trace_header":
        raise TraceError("line 1: missing trace header")
    if head.get("version") != TRACE_VERSION:
        raise TraceError(f"line 1: unsupported trace version {head.get('version')!r}")
    session = head.get("session")
    if not isinstance(session, str) or not session:
        raise TraceError("line 1: trace header needs a session id")
    try:
        config = decode_session_config(head.get("config"))
    except WireError as exc:
        raise TraceError(f"line 1: {exc}") from exc

    frames: list[MetricFrame] = []
    last_t = None
    for lineno, line in enumerate(lines[1:], start=2):
        if not line.strip():
            continue
        try:
            message = decode(line)
        except WireError as exc:
            raise TraceError(f"line {lineno}: {exc}") from exc
        if not isinstance(message, MetricFrame):
            raise TraceError(f"line {lineno}: expected a metrics message")
        if last_t is not None and message.t_ms < last_t:
            raise TraceError(
                f"line {lineno}: t_ms goes backwards ({message.t_ms} after {last_t})"
            )
        last_t = message.t_ms
        frames.append(message)
    return Trace(session=session, config=config, frames=frames)


def replay_decisions(
    trace: Trace, detector: DetectorConfig | None = None
) -> list[SpotlightDecision]:
    """Engine-direct replay: recompute gestures, run the session."""
    estimates = estimate_frames(trace.frames, detector)
    return run_session(zip(trace.frames, estimates), trace.config)


def decision_log(decisions: list[SpotlightDecision]) -> str:
    """Canonical one-line-per-decision log (stable bytes for a stable
    decision sequence)."""
    return "".join(encode(d) + "\n" for d in decisions)


async def replay_live(trace: Trace, uri: str, speed: float = 1.0) -> int:
    """Push a trace to a live server over the wire protocol.

    Opens a presenter connection (creating the session) plus one
    audience connection per recorded participant, then sends each frame
    at recorded_t / speed. speed=inf sends as fast as possible.
    Returns the number of frames sent.
    """
    from websockets.asyncio.client import connect

    if speed <= 0:
        raise ValueError("speed must be > 0")
    presenter = trace.config.presenter or "presenter"
    participants = sorted({f.participant for f in trace.frames} - {presenter})

    async with connect(uri) as host_conn:
        await host_conn.send(encode(Join(session=trace.session, participant=presenter, role="presenter")))
        await host_conn.recv()  # config ack
        conns = {}
        try:
            for pid in participants:
                conn = await connect(uri)
                conns[pid] = conn
                await conn.send(encode(Join(session=trace.session, participant=pid, role="audience")))
                await conn.recv()  # config ack
            loop = asyncio.get_running_loop()
            started = loop.time()
            sent = 0
            for frame in trace.frames:
                if frame.participant == presenter:
                    continue
                if math.isfinite(speed):
                    target = started + frame.t_ms / 1000.0 / speed
                    delay = target - loop.time()
                    if delay > 0:
                        await asyncio.sleep(delay)
                await conns[frame.participant].send(encode(frame))
                sent += 1
            return sent
        finally:
            for conn in conns.values():
                await conn.close()
