"""Live session server over the line-JSON wire protocol.

One process hosts many sessions. A session is created when its
presenter joins and torn down when the presenter's connection closes.
Every effect on a session's state — joins, metric frames, steering
controls, window ticks — is funneled through one queue and applied by
one task, so effects have a single total order and scoreboard math
never interleaves.

Frames are windowed by server receipt time: the tick task closes the
open window every ``window_ms`` against absolute targets
(started_at + k * window_ms), so the cadence does not drift. Client
t_ms is kept only for traces. Each decision is broadcast to the
presenter and consoles; the spotlighted member alone gets a personal
notice.
"""
from __future__ import annotations

import asyncio
import logging
from dataclasses import dataclass, replace

from websockets.asyncio.server import serve
from websockets.exceptions import ConnectionClosed

from .affect import MetricFrame, ProfileError
from .engine import (
    ControlError,
    Pause,
    Pin,
    Resume,
    SessionConfig,
    SetWeights,
    SpotlightSession,
    Unpin,
)
from .gestures import DetectorConfig, ParticipantGestures
from .wire import ConfigSnapshot, ErrorMessage, Join, Notice, WireError, decode, encode

log = logging.getLogger(__name__)

_CONTROLS = (SetWeights, Pin, Unpin, Pause, Resume)


@dataclass
class _Client:
    participant: str
    role: str
    conn: object


async def _send(conn, message) -> None:
    try:
        await conn.send(encode(message))
    except ConnectionClosed:
        pass


class SessionRuntime:
    """All state for one live session; mutated only by its serializer."""

    def __init__(
        self,
        session_id: str,
        config: SessionConfig,
        detector: DetectorConfig,
        on_end=None,
    ):
        self.session_id = session_id
        self.engine = SpotlightSession(config)
        self.detector_config = detector
        self.on_end = on_end
        self.detectors: dict[str, ParticipantGestures] = {}
        self.clients: dict[str, _Client] = {}
        self.queue: asyncio.Queue = asyncio.Queue()
        self.ended = False
        self.accepted_frames = 0
        self.last_t: dict[str, int] = {}
        self.decision_log: list = []
        self.decision_times: list[float] = []  # loop clock at each broadcast
        loop = asyncio.get_running_loop()
        self.started_at = loop.time()
        self._ticker = asyncio.create_task(self._tick_loop(loop))
        self._serializer = asyncio.create_task(self._serialize())

    def snapshot(self) -> ConfigSnapshot:
        cfg, state = self.engine.config, self.engine.state
        return ConfigSnapshot(
            window_ms=cfg.window_ms,
            policy=cfg.policy,
            profile=cfg.profile,
            paused=state.paused,
            pinned=state.pinned,
            presenter=cfg.presenter,
        )

    async def _tick_loop(self, loop) -> None:
        # absolute targets keep the cadence drift-free
        w = self.engine.config.window_ms / 1000.0
        k = 1
        while True:
            delay = self.started_at + k * w - loop.time()
            if delay > 0:
                await asyncio.sleep(delay)
            await self.queue.put(("tick", k, None))
            k += 1

    async def _serialize(self) -> None:
        while True:
            kind, payload, conn = await self.queue.get()
            try:
                if kind == "join":
                    await self._on_join(*payload, conn)
                elif kind == "metrics":
                    await self._on_metrics(*payload, conn)
                elif kind == "control":
                    await self._on_control(*payload, conn)
                elif kind == "tick":
                    await self._on_tick(payload)
                elif kind == "leave":
                    if await self._on_leave(payload):
                        break
            except Exception:  # keep the session alive on bugs in one event
                log.exception("error handling %s event", kind)

    async def _on_join(self, join: Join, fut: asyncio.Future, conn) -> None:
        if self.ended:
            await _send(conn, ErrorMessage("session_ended", "session has ended"))
            fut.set_result(False)
            return
        presenter = self.engine.config.presenter
        if join.role == "presenter" and any(
            c.role == "presenter" for c in self.clients.values()
        ):
            await _send(conn, ErrorMessage("second_presenter", "session already has a presenter"))
            fut.set_result(False)
            return
        if join.participant in self.clients:
            await _send(
                conn,
                ErrorMessage("duplicate_participant", f"{join.participant!r} already joined"),
            )
            fut.set_result(False)
            return
        if join.role == "audience" and join.participant == presenter:
            await _send(conn, ErrorMessage("bad_role", "presenter id cannot join as audience"))
            fut.set_result(False)
            return
        client = _Client(join.participant, join.role, conn)
        self.clients[join.participant] = client
        if join.role == "audience":
            self.engine.register(join.participant)
        await _send(conn, self.snapshot())
        fut.set_result(True)

    async def _on_metrics(self, client: _Client, frame: MetricFrame, conn) -> None:
        if self.ended:
            await _send(conn, ErrorMessage("session_ended", "session has ended"))
            return
        if client.role != "audience":
            return  # presenter/console frames are dropped
        if frame.participant != client.participant:
            await _send(
                conn,
                ErrorMessage(
                    "participant_mismatch",
                    f"frame for {frame.participant!r} from {client.participant!r}",
                ),
            )
            return
        last = self.last_t.get(frame.participant)
        if last is not None and frame.t_ms < last:
            await _send(
                conn,
                ErrorMessage("t_regression", f"t_ms {frame.t_ms} after {last}"),
            )
            return
        self.last_t[frame.participant] = frame.t_ms
        gestures = self.detectors.get(frame.participant)
        if gestures is None:
            gestures = ParticipantGestures(self.detector_config)
            self.detectors[frame.participant] = gestures
        estimate = gestures.update(frame)
        self.engine.ingest(frame, estimate)
        self.accepted_frames += 1

    async def _on_control(self, client: _Client, command, conn) -> None:
        if self.ended:
            await _send(conn, ErrorMessage("session_ended", "session has ended"))
            return
        if client.role == "audience":
            await _send(conn, ErrorMessage("control_forbidden", "audience cannot steer"))
            return
        try:
            self.engine.control(command)
        except (ControlError, ProfileError, WireError) as exc:
            await _send(conn, ErrorMessage("bad_control", str(exc)))
            return
        snapshot = self.snapshot()
        for target in self._steering_clients():
            await _send(target.conn, snapshot)

    def _steering_clients(self) -> list[_Client]:
        return [c for c in self.clients.values() if c.role in ("presenter", "console")]

    async def _on_tick(self, k: int) -> None:
        if self.ended:
            return
        decision = self.engine.close()
        self.decision_log.append(decision)
        for target in self._steering_clients():
            await _send(target.conn, decision)
        if decision.participant is not None:
            watcher = self.clients.get(decision.participant)
            if watcher is not None:
                await _send(watcher.conn, Notice(window=decision.window_index))
        self.decision_times.append(asyncio.get_running_loop().time())

    async def _on_leave(self, client: _Client) -> bool:
        """Returns True when the session ended (serializer should stop)."""
        current = self.clients.get(client.participant)
        if current is client:
            del self.clients[client.participant]
        if client.role != "presenter" or self.ended:
            return False
        self.ended = True
        self._ticker.cancel()
        for other in list(self.clients.values()):
            try:
                await other.conn.close()
            except ConnectionClosed:
                pass
        self.clients.clear()
        if self.on_end is not None:
            self.on_end(self)
        return True

    async def shutdown(self) -> None:
        self.ended = True
        self._ticker.cancel()
        self._serializer.cancel()
        for client in list(self.clients.values()):
            try:
                await client.conn.close()
            except ConnectionClosed:
                pass


class SpotlightServer:
    """Hub: accepts connections, routes them to session runtimes."""

    def __init__(self, config: SessionConfig | None = None, detector: DetectorConfig | None = None):
        self.base_config = config or SessionConfig()
        self.detector = detector or DetectorConfig()
        self.sessions: dict[str, SessionRuntime] = {}
        self._server = None

    async def start(self, host: str = "127.0.0.1", port: int = 8765) -> int:
        self._server = await serve(self._handler, host, port)
        return self._server.sockets[0].getsockname()[1]

    def _forget(self, runtime: SessionRuntime) -> None:
        if self.sessions.get(runtime.session_id) is runtime:
            del self.sessions[runtime.session_id]

    async def stop(self) -> None:
        for runtime in list(self.sessions.values()):
            await runtime.shutdown()
        self.sessions.clear()
        if self._server is not None:
            self._server.close()
            await self._server.wait_closed()

    async def serve_forever(self, host: str, port: int) -> None:
        await self.start(host, port)
        await asyncio.get_running_loop().create_future()

    async def _handler(self, conn) -> None:
        try:
            raw = await conn.recv()
        except ConnectionClosed:
            return
        try:
            message = decode(raw)
        except WireError as exc:
            await _send(conn, ErrorMessage("bad_message", str(exc)))
            return
        if not isinstance(message, Join):
            await _send(conn, ErrorMessage("expected_join", "first message must be a join"))
            return
        runtime = self.sessions.get(message.session)
        if runtime is None or runtime.ended:
            if message.role != "presenter":
                await _send(
                    conn, ErrorMessage("unknown_session", f"no session {message.session!r}")
                )
                return
            config = replace(self.base_config, presenter=message.participant)
            runtime = SessionRuntime(
                message.session, config, self.detector, on_end=self._forget
            )
            self.sessions[message.session] = runtime
        fut = asyncio.get_running_loop().create_future()
        await runtime.queue.put(("join", (message, fut), conn))
        if not await fut:
            return
        client = runtime.clients[message.participant]
        try:
            await self._client_loop(runtime, client, conn)
        finally:
            if not runtime.ended:
                await runtime.queue.put(("leave", client, None))

    async def _client_loop(self, runtime: SessionRuntime, client: _Client, conn) -> None:
        try:
            async for raw in conn:
                try:
                    message = decode(raw)
                except WireError as exc:
                    await _send(conn, ErrorMessage("bad_message", str(exc)))
                    continue
                if runtime.ended:
                    await _send(conn, ErrorMessage("session_ended", "session has ended"))
                    continue
                if isinstance(message, MetricFrame):
                    if client.role != "audience":
                        continue  # dropped, not an error
                    await runtime.queue.put(("metrics", (client, message), conn))
                elif isinstance(message, _CONTROLS):
                    await runtime.queue.put(("control", (client, message), conn))
                elif isinstance(message, Join):
                    await _send(conn, ErrorMessage("already_joined", "connection already joined"))
                else:
                    await _send(
                        conn,
                        ErrorMessage("unexpected_type", "server does not accept this message"),
                    )
        except ConnectionClosed:
            pass


async def run_server(
    host: str,
    port: int,
    config: SessionConfig,
    detector: DetectorConfig | None = None,
) -> None:
    server = SpotlightServer(config, detector)
    await server.serve_forever(host, port)
