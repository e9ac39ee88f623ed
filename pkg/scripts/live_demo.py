"""End-to-end demo: synthetic audience replayed into a live server.

Generates a scenario trace, starts an in-process server, attaches a
console client that prints every spotlight decision, and replays the
trace over the wire. With --speed max this doubles as a throughput
measurement of the full websocket path.

    python3 scripts/live_demo.py --duration-ms 60000 --speed x10
    python3 scripts/live_demo.py --duration-ms 300000 --speed max
"""
import argparse
import asyncio
import math
import sys
import time

from websockets.asyncio.client import connect
from websockets.exceptions import ConnectionClosed

from spotlight import (
    AudienceMember,
    Join,
    ScenarioSpec,
    SessionConfig,
    SpotlightDecision,
    archetype,
    decode,
    encode,
    gen_frames,
)
from spotlight.cli import _parse_speed
from spotlight.server import SpotlightServer
from spotlight.traces import Trace, replay_live


def demo_scenario(duration_ms: int, fps: float) -> ScenarioSpec:
    return ScenarioSpec(
        duration_ms=duration_ms,
        fps=fps,
        audience=(
            AudienceMember("nodder", archetype("nodder")),
            AudienceMember("smiler", archetype("smiler")),
            AudienceMember("confused", archetype("confused")),
            AudienceMember("stoic", archetype("stoic")),
        ),
        presenter="host",
        seed=1,
    )


async def watch_console(port: int, session: str, stop: asyncio.Event) -> int:
    conn = await connect(f"ws://127.0.0.1:{port}")
    await conn.send(encode(Join(session=session, participant="demo-console", role="console")))
    await conn.recv()  # config ack
    shown = 0
    try:
        while not stop.is_set():
            try:
                raw = await asyncio.wait_for(conn.recv(), 0.2)
            except asyncio.TimeoutError:
                continue
            except ConnectionClosed:
                break  # session ended with the presenter
            message = decode(raw)
            if isinstance(message, SpotlightDecision):
                shown += 1
                who = message.participant or "(none)"
                print(f"window {message.window_index:>3}  {who:<10} "
                      f"score={message.score:.3f} reason={message.reason.value}")
    finally:
        await conn.close()
    return shown


async def run(args) -> int:
    speed = _parse_speed(args.speed)
    scenario = demo_scenario(args.duration_ms, args.fps)
    frames = gen_frames(scenario)
    config = SessionConfig(window_ms=args.window_ms, presenter="host")
    trace = Trace(session="demo", config=config, frames=frames)

    # scale the real-time window with the replay speed so accelerated
    # runs still close the same number of windows; at speed=max the run
    # is a pure throughput measurement and decisions are not expected
    if math.isfinite(speed):
        server_config = SessionConfig(
            window_ms=max(200, int(args.window_ms / speed)), presenter="host"
        )
    else:
        server_config = config
    server = SpotlightServer(server_config)
    port = await server.start("127.0.0.1", 0)
    print(f"# server on 127.0.0.1:{port}, {len(frames)} frames, speed={args.speed}, "
          f"server window {server_config.window_ms} ms")
    stop = asyncio.Event()
    try:
        t0 = time.monotonic()
        sender = asyncio.create_task(replay_live(trace, f"ws://127.0.0.1:{port}", speed))
        # the console can only join once the presenter created the session
        while "demo" not in server.sessions:
            await asyncio.sleep(0.01)
        watcher = asyncio.create_task(watch_console(port, "demo", stop))
        sent = await sender
        elapsed = time.monotonic() - t0
        await asyncio.sleep(0.3)  # let the last broadcast land
        stop.set()
        shown = await watcher
        rate = sent / elapsed if elapsed > 0 else math.inf
        print(f"# sent {sent} frames in {elapsed:.2f}s ({rate:,.0f} frames/s), "
              f"saw {shown} decisions")
    finally:
        await server.stop()
    return 0


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--duration-ms", type=int, default=60_000)
    parser.add_argument("--fps", type=float, default=15.0)
    parser.add_argument("--window-ms", type=int, default=5_000)
    parser.add_argument("--speed", default="x10", help="real, max or xN")
    args = parser.parse_args(argv)
    return asyncio.run(run(args))


if __name__ == "__main__":
    sys.exit(main())
