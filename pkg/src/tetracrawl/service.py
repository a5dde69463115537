"""WebSocket console service: one simulator, many screens.

A single owner task advances the simulator at the configured tick rate and
broadcasts one telemetry frame per tick.  Connection handlers never touch
the simulator directly: joystick input lands in a last-writer-wins slot and
every other command goes through a queue the owner drains at the next tick
boundary.  Each client gets a bounded outgoing buffer with drop-oldest
overflow, so a stalled viewer costs itself frames instead of stalling the
tick loop.

The first live connection becomes the driver; everyone after that is a
viewer until the driver disconnects and the oldest viewer is promoted.
Replay sessions have no driver at all: recorded frames are re-emitted at a
scaled cadence and every command is refused.
"""
from __future__ import annotations

import asyncio
import contextlib
import dataclasses
import json
from collections import deque
from contextlib import asynccontextmanager
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, IO, List, Optional, Tuple, Union

from fastapi import FastAPI, WebSocket, WebSocketDisconnect

from .config import (
    ConfigError,
    SessionConfig,
    config_hash,
    default_config,
    to_sim_params,
)
from .locomotion_sim import (
    LOG_FORMAT_NAME,
    Simulator,
    TelemetryFrame,
    TelemetryLogError,
    TelemetryWriter,
)
from .protocol import (
    CommandMessage,
    ProtocolError,
    ack_message,
    error_message,
    frame_message,
    hello_message,
    orientation_from_payload,
    parse_command,
    role_message,
)
from .teleop_map import JoystickState, TeleopParams
from .topple import CANONICAL

__all__ = [
    "BUFFER_FRAMES",
    "ConsoleService",
    "ReplayMismatchError",
    "create_app",
    "load_replay",
    "stick_for_mode",
]

#: outgoing frames buffered per client before the oldest are dropped
BUFFER_FRAMES = 64

NEUTRAL_STICK = JoystickState(0.0, 0.0)


class ReplayMismatchError(RuntimeError):
    """Log was recorded under a different configuration (use force to override)."""


def load_replay(
    path: Union[str, Path],
    expected_hash: Optional[str] = None,
    force: bool = False,
) -> Tuple[dict, List[str]]:
    """Load a telemetry log for re-broadcast, validating every line up front.

    Returns the header and the raw frame lines (exact bytes, so the replay
    payloads match the original session).  Truncated or corrupt logs fail
    here, before a server ever starts.
    """
    with open(path, "r", encoding="utf-8") as fh:
        header_line = fh.readline()
        if not header_line.strip():
            raise TelemetryLogError("empty log: missing header line")
        try:
            header = json.loads(header_line)
        except json.JSONDecodeError as exc:
            raise TelemetryLogError(f"header is not valid JSON: {exc}") from None
        if not isinstance(header, dict) or header.get("format") != LOG_FORMAT_NAME:
            raise TelemetryLogError("not a telemetry log (bad format marker)")
        lines: List[str] = []
        for lineno, raw in enumerate(fh, start=2):
            line = raw.rstrip("\n")
            if not line.strip():
                continue
            try:
                TelemetryFrame.from_json_line(line)
            except (json.JSONDecodeError, KeyError, TypeError) as exc:
                raise TelemetryLogError(
                    f"line {lineno}: corrupt or truncated frame ({exc})"
                ) from None
            lines.append(line)
    if expected_hash is not None and header.get("config_hash") != expected_hash:
        if not force:
            raise ReplayMismatchError(
                f"log config_hash {header.get('config_hash')!r} does not match "
                f"the session config {expected_hash!r}"
            )
    return header, lines


def stick_for_mode(mode: str, rho: Optional[float], teleop: TeleopParams) -> JoystickState:
    """Synthesize the stick position whose classification is the asked mode.

    A requested radius at or below the deadzone cannot leave the neutral
    band, so it degrades to idle rather than being silently inflated.
    """
    dz = teleop.deadzone
    r = teleop.rho_max if rho is None else min(rho, teleop.rho_max)
    if mode == "idle" or r <= dz:
        return NEUTRAL_STICK
    if mode == "forward":
        # classification recovers rho = 2v - dz exactly
        return JoystickState(0.0, (r + dz) / 2.0)
    if mode == "backward":
        return JoystickState(0.0, -(r + dz) / 2.0)
    if mode == "in_place_right":
        return JoystickState(r, 0.0)
    if mode == "in_place_left":
        return JoystickState(-r, 0.0)
    raise ValueError(f"unknown mode {mode!r}")


@dataclass
class _Client:
    ws: Any
    role: str
    buffer: deque = field(default_factory=lambda: deque(maxlen=BUFFER_FRAMES))
    wake: asyncio.Event = field(default_factory=asyncio.Event)
    last_seq: int = -1
    sender: Optional[asyncio.Task] = None

    def push(self, text: str) -> None:
        self.buffer.append(text)  # deque maxlen evicts the oldest frame
        self.wake.set()


class ConsoleService:
    """Owns the simulator and fans telemetry out to websocket clients."""

    def __init__(
        self,
        config: Optional[SessionConfig] = None,
        *,
        record: Optional[IO[str]] = None,
        replay: Optional[Tuple[dict, List[str]]] = None,
        replay_speed: float = 1.0,
    ) -> None:
        self.config = config or default_config()
        self.params = to_sim_params(self.config)
        self.launch_hash = config_hash(self.config)
        self.sim = Simulator(self.params)
        self.paused = False
        self.latest_stick = NEUTRAL_STICK
        self._pending: deque = deque()
        self._clients: Dict[int, _Client] = {}
        self._next_client_id = 0
        self._recorder = TelemetryWriter(
            record, self.launch_hash, self.config.tick_hz
        ) if record is not None else None
        self._last_recorded_tick: Optional[int] = None
        if replay is not None:
            header, lines = replay
            if replay_speed <= 0.0:
                raise ValueError("replay_speed must be positive")
            self.replay_lines: Optional[List[str]] = lines
            self._replay_hz = float(header.get("tick_hz", self.config.tick_hz))
            self.replay_speed = replay_speed
        else:
            self.replay_lines = None
        self._task: Optional[asyncio.Task] = None
        self._audience = asyncio.Event()
        self.frames_sent = 0

    # -- lifecycle ---------------------------------------------------------

    @property
    def is_replay(self) -> bool:
        return self.replay_lines is not None

    @property
    def tick_period(self) -> float:
        if self.is_replay:
            return 1.0 / (self._replay_hz * self.replay_speed)
        return 1.0 / self.config.tick_hz

    def start(self) -> None:
        if self._task is None:
            runner = self._run_replay if self.is_replay else self._run_live
            self._task = asyncio.create_task(runner())

    async def stop(self) -> None:
        tasks = [c.sender for c in self._clients.values() if c.sender]
        if self._task is not None:
            tasks.append(self._task)
        for task in tasks:
            task.cancel()
        for task in tasks:
            with contextlib.suppress(asyncio.CancelledError):
                await task
        self._task = None
        self._clients.clear()

    # -- connections -------------------------------------------------------

    def register(self, ws: Any) -> int:
        if self.is_replay:
            role = "viewer"
        else:
            role = "viewer" if any(
                c.role == "driver" for c in self._clients.values()
            ) else "driver"
        client = _Client(ws=ws, role=role)
        client_id = self._next_client_id
        self._next_client_id += 1
        self._clients[client_id] = client
        client.push(hello_message(
            role,
            config_hash=self.launch_hash,
            tick_hz=self._replay_hz if self.is_replay else self.config.tick_hz,
            deadzone=self.config.deadzone,
            rho_max=self.config.rho_max,
            replay=self.is_replay,
        ))
        client.sender = asyncio.create_task(self._send_loop(client))
        self._audience.set()
        return client_id

    async def unregister(self, client_id: int) -> None:
        client = self._clients.pop(client_id, None)
        if client is None:
            return
        if client.sender is not None:
            client.sender.cancel()
            with contextlib.suppress(asyncio.CancelledError):
                await client.sender
        if client.role == "driver":
            # dead-man behavior: a vanished driver must not keep steering
            self.latest_stick = NEUTRAL_STICK
            successor = next(iter(self._clients.values()), None)
            if successor is not None:
                successor.role = "driver"
                successor.push(role_message("driver"))

    async def _send_loop(self, client: _Client) -> None:
        try:
            while True:
                await client.wake.wait()
                client.wake.clear()
                while client.buffer:
                    await client.ws.send_text(client.buffer.popleft())
        except asyncio.CancelledError:
            raise
        except Exception:
            pass  # dead socket; the reader side unregisters us

    # -- command ingestion (runs in each connection's reader) ---------------

    def handle_text(self, client_id: int, text: str) -> None:
        client = self._clients.get(client_id)
        if client is None:
            return
        try:
            cmd = parse_command(text)
        except ProtocolError as exc:
            client.push(error_message(str(exc), _best_effort_seq(text)))
            return
        if cmd.seq <= client.last_seq:
            client.push(error_message(
                f"seq {cmd.seq} not greater than {client.last_seq}", cmd.seq))
            return
        client.last_seq = cmd.seq
        if self.is_replay:
            client.push(error_message("replay session is read-only", cmd.seq))
            return
        if client.role != "driver":
            client.push(error_message("driver role required", cmd.seq))
            return
        extra: Any = None
        if cmd.kind == "set_params":
            # validate now so the ack means "accepted", not "parsed"
            try:
                extra = self._retuned(cmd.payload["params"])
            except ConfigError as exc:
                client.push(error_message(str(exc), cmd.seq))
                return
        if cmd.kind == "joystick":
            # last writer wins; the owner samples this at the tick boundary
            self.latest_stick = JoystickState(
                float(cmd.payload["sx"]), float(cmd.payload["sy"]))
        else:
            self._pending.append((cmd, extra))
        client.push(ack_message(cmd.seq))

    def _retuned(self, overrides: Dict[str, Any]) -> Tuple[SessionConfig, Any]:
        try:
            new_config = dataclasses.replace(self.config, **overrides)
        except TypeError as exc:
            raise ConfigError(str(exc)) from None
        return new_config, to_sim_params(new_config)

    # -- owner loop ---------------------------------------------------------

    def _apply(self, cmd: CommandMessage, extra: Any) -> None:
        if cmd.kind == "set_mode":
            self.latest_stick = stick_for_mode(
                cmd.payload["mode"], cmd.payload.get("rho"), self.params.teleop)
        elif cmd.kind == "remap":
            self.sim.remap()
        elif cmd.kind == "correct_orientation":
            target = (orientation_from_payload(cmd.payload["target"])
                      if "target" in cmd.payload else CANONICAL)
            self.sim.correct_orientation(target)
        elif cmd.kind == "inject_topple":
            orientation = (orientation_from_payload(cmd.payload["orientation"])
                           if "orientation" in cmd.payload else None)
            self.sim.inject_topple(orientation)
        elif cmd.kind == "pause":
            self.paused = True
        elif cmd.kind == "resume":
            self.paused = False
        elif cmd.kind == "set_params":
            self.config, self.params = extra
            self.sim.params = self.params

    def tick_once(self) -> str:
        """One owner iteration: drain commands, advance, emit the frame line.

        Factored out of the async loop so tests and the record path can run
        the exact same transition without a running event loop.
        """
        while self._pending:
            cmd, extra = self._pending.popleft()
            self._apply(cmd, extra)
        if not self.paused:
            self.sim.step(self.latest_stick)
        line = self.sim.snapshot().to_json_line()
        state_tick = self.sim.state.tick
        if self._recorder is not None and state_tick != self._last_recorded_tick:
            self._recorder.append_line(line)
            self._last_recorded_tick = state_tick
        return line

    def _broadcast(self, text: str) -> None:
        self.frames_sent += 1
        for client in self._clients.values():
            client.push(text)

    async def _run_live(self) -> None:
        loop = asyncio.get_running_loop()
        next_t = loop.time()
        while True:
            self._broadcast(frame_message(self.tick_once()))
            next_t += self.tick_period
            delay = next_t - loop.time()
            if delay > 0.0:
                await asyncio.sleep(delay)
            else:
                next_t = loop.time()  # fell behind; resync, never burst

    async def _run_replay(self) -> None:
        # a replay exists only for its audience; hold until someone connects
        # so the first viewer sees the log from its first frame
        await self._audience.wait()
        loop = asyncio.get_running_loop()
        next_t = loop.time()
        for line in self.replay_lines or ():
            self._broadcast(frame_message(line))
            next_t += self.tick_period
            delay = next_t - loop.time()
            if delay > 0.0:
                await asyncio.sleep(delay)
            else:
                next_t = loop.time()
        self._broadcast(json.dumps(
            {"kind": "replay_end", "frames": len(self.replay_lines or ())},
            sort_keys=True, separators=(",", ":")))


def _best_effort_seq(text: str) -> Optional[int]:
    # malformed commands still echo their seq when one is recognizable
    try:
        data = json.loads(text)
    except (json.JSONDecodeError, TypeError, ValueError):
        return None
    if isinstance(data, dict):
        seq = data.get("seq")
        if isinstance(seq, int) and not isinstance(seq, bool):
            return seq
    return None


def create_app(
    service: ConsoleService,
    static_dir: Optional[Union[str, Path]] = None,
) -> FastAPI:
    """FastAPI app exposing /ws, /status, and (optionally) the built UI."""

    @asynccontextmanager
    async def lifespan(_app):
        service.start()
        try:
            yield
        finally:
            await service.stop()

    app = FastAPI(lifespan=lifespan)
    app.state.service = service

    @app.get("/status")
    async def status() -> dict:
        frame = None if service.is_replay else service.sim.state.tick
        return {
            "replay": service.is_replay,
            "paused": service.paused,
            "tick": frame,
            "clients": len(service._clients),
            "config_hash": service.launch_hash,
            "frames_sent": service.frames_sent,
        }

    @app.websocket("/ws")
    async def ws_endpoint(ws: WebSocket) -> None:
        await ws.accept()
        client_id = service.register(ws)
        try:
            while True:
                service.handle_text(client_id, await ws.receive_text())
        except WebSocketDisconnect:
            pass
        finally:
            await service.unregister(client_id)

    if static_dir is not None and Path(static_dir).is_dir():
        from fastapi.staticfiles import StaticFiles

        app.mount("/", StaticFiles(directory=str(static_dir), html=True), name="ui")

    return app
