"""Cross-check the browser console against the real session server.

Runs a short live session (presenter, two audience members, one console),
captures every line the console connection receives, then folds that
transcript through the compiled TypeScript console (frontend/dist) in Node
and asserts the resulting view model matches what the session did.

Build the frontend first: cd frontend && npm install && npm run build
"""
from __future__ import annotations

import asyncio
import json
import subprocess
import sys
import tempfile
from pathlib import Path

from websockets.asyncio.client import connect

from spotlight.affect import ExpressionVector, HeadPoseSample, MetricFrame
from spotlight.engine import Policy, SessionConfig
from spotlight.server import SpotlightServer
from spotlight.wire import Join, encode

FRONTEND = Path(__file__).resolve().parent.parent / "frontend"

SET_WEIGHTS = (
    '{"type":"set_weights","profile":{"happiness":0.4,"sadness":0.05,"surprise":0.4,'
    '"neutral":0.05,"brow_furrow":0.7,"head_nod":0.6,"head_shake":0.3}}'
)

NODE_FOLD = """
import { readFileSync } from 'node:fs';
const { decode } = await import('./dist/wire.js');
const { initialState, reduce } = await import('./dist/state.js');
const { render } = await import('./dist/view.js');
const lines = readFileSync(process.argv[1], 'utf8').trim().split('\\n');
let state = reduce(initialState(), { kind: 'socket_open', atMs: 0 });
let t = 0;
for (const line of lines) {
  decode(line);
  state = reduce(state, { kind: 'message', line, atMs: (t += 100) });
}
const view = render(state, t);
console.log(JSON.stringify({
  decoded: lines.length,
  windows: state.timeline.map((d) => d.window),
  profile: view.session.profile,
  pinned: view.session.pinned,
  paused: view.session.paused,
}));
"""


async def capture_transcript() -> list[str]:
    server = SpotlightServer(SessionConfig(window_ms=300, policy=Policy.AFFECTIVE, seed=0))
    port = await server.start("127.0.0.1", 0)
    uri = f"ws://127.0.0.1:{port}"
    lines: list[str] = []

    presenter = await connect(uri)
    await presenter.send(encode(Join(session="talk", participant="host", role="presenter")))
    await presenter.recv()

    console = await connect(uri)
    await console.send(encode(Join(session="talk", participant="console-1", role="console")))

    async def read_console() -> None:
        try:
            async for line in console:
                lines.append(line)
        except Exception:
            pass

    reader = asyncio.create_task(read_console())

    audience = {}
    for name in ("ada", "bo"):
        conn = await connect(uri)
        await conn.send(encode(Join(session="talk", participant=name, role="audience")))
        await conn.recv()
        audience[name] = conn

    async def stream(name: str, happiness: float, n: int, start_t: int) -> None:
        for i in range(n):
            frame = MetricFrame(
                participant=name,
                t_ms=start_t + i * 66,
                face_detected=True,
                expressions=ExpressionVector(happiness=happiness),
                head=HeadPoseSample(yaw_deg=0.0, roll_deg=0.0, y=0.5),
            )
            await audience[name].send(encode(frame))
            await asyncio.sleep(0.02)

    await asyncio.gather(stream("ada", 0.9, 10, 0), stream("bo", 0.1, 10, 0))
    await asyncio.sleep(0.35)
    await console.send(SET_WEIGHTS)  # byte-for-byte what the console emits
    await asyncio.sleep(0.1)
    await console.send('{"type":"pin","participant":"ghost"}')  # rejected
    await asyncio.sleep(0.1)
    await asyncio.gather(stream("ada", 0.1, 10, 700), stream("bo", 0.8, 10, 700))
    await asyncio.sleep(0.35)
    await console.send('{"type":"pause"}')
    await asyncio.sleep(0.45)
    await console.send('{"type":"resume"}')
    await asyncio.sleep(0.35)
    await console.send('{"type":"pin","participant":"bo"}')
    await asyncio.sleep(0.1)
    await console.send('{"type":"unpin"}')
    await asyncio.sleep(0.4)

    for conn in audience.values():
        await conn.close()
    await presenter.close()  # presenter leaving ends the session
    await asyncio.sleep(0.2)
    reader.cancel()
    await server.stop()
    return lines


def main() -> int:
    if not (FRONTEND / "dist" / "wire.js").exists():
        print("error: frontend/dist is missing; run `npm run build` in frontend/ first", file=sys.stderr)
        return 1
    lines = asyncio.run(capture_transcript())
    kinds = [json.loads(line)["type"] for line in lines]
    print(f"captured {len(lines)} console lines: " + ", ".join(sorted(set(kinds))))
    if "spotlight" not in kinds or "config" not in kinds or "error" not in kinds:
        print("error: transcript is missing expected message kinds", file=sys.stderr)
        return 1

    with tempfile.NamedTemporaryFile("w", suffix=".jsonl", delete=False) as fh:
        fh.write("\n".join(lines) + "\n")
        transcript = fh.name
    result = subprocess.run(
        ["node", "--input-type=module", "-e", NODE_FOLD, transcript],
        cwd=FRONTEND,
        capture_output=True,
        text=True,
    )
    if result.returncode != 0:
        print("error: console failed to fold the transcript", file=sys.stderr)
        print(result.stderr, file=sys.stderr)
        return 1
    summary = json.loads(result.stdout)
    assert summary["decoded"] == len(lines)
    assert summary["profile"]["brow_furrow"] == 0.7, summary["profile"]
    assert summary["pinned"] is None and summary["paused"] is False
    assert summary["windows"] == sorted(summary["windows"])
    print(f"console decoded all {summary['decoded']} lines; "
          f"timeline windows {summary['windows']}; steered brow_furrow=0.7 live")
    print("PASS: console view agrees with the live session")
    return 0


if __name__ == "__main__":
    sys.exit(main())
