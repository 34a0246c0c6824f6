"""Interactive lockstep simulation server.

Runs the locomotion simulator at a fixed 1 ms physics step and exchanges
JSON messages with WebSocket clients.  The first connected client is the
controller (may send set_fins / reset / pause / resume / set_rate); later
clients are observers and receive state only.

Determinism: fin commands take effect at the next physics tick and every
applied command is appended to a replay file as one JSON line
``{"tick": T, "message": {...}}`` where T is the tick at which the command
took effect (the command shapes the step from T to T+1).  The state
sequence depends only on the scenario and that tick-stamped log, never on
wall-clock jitter; pacing only decides when snapshots are emitted.  A
``reset`` line restarts the tick counter at zero, so a log replays as
segments; replay_log() re-executes the final segment through the same
integrator the server uses and reproduces its states bit for bit.

Wire protocol (one JSON object per WebSocket text frame)
  client -> server:
    {"type": "hello", "protocol_version": 1}
    {"type": "reset", "scenario": "floating_balls"}     (name or inline object)
    {"type": "set_fins", "left": false, "right": false, "caudal": true}
    {"type": "set_rate", "snapshots_per_s": 30}
    {"type": "pause"} | {"type": "resume"}
  server -> client:
    {"type": "welcome", "server_version": "...", "scenarios": [...], ...}
    {"type": "state", "tick": N, "t": ..., "x": ..., "y": ..., "theta": ...,
     "u": ..., "v": ..., "r": ..., "fins": {...}, "events": [...]}
    {"type": "error", "code": "...", "message": "..."}
"""

from __future__ import annotations

import asyncio
import json
import threading
from collections import deque
from dataclasses import dataclass, field

from .config import ToolkitConfig, calibrated_config
from .errors import ValidationError
from .locomotion import ScenarioRunner, Trajectory, replay_commands
from .scenarios import get_scenario, scenario_from_dict, scenario_names

__all__ = ["SimServer", "replay_log", "parse_replay_file", "PROTOCOL_VERSION"]

PROTOCOL_VERSION = 1
SERVER_VERSION = "1.0.0"

PHYSICS_DT = 1.0e-3
DEFAULT_SNAPSHOT_RATE = 30.0
DEFAULT_SCENARIO = "open_water"

# physics scheduling quantum in real-pace mode; ticks run in catch-up batches
_PACE_SLICE = 0.005
_MAX_BATCH = 200


def _fins_dict(fins):
    return {"left": bool(fins[0]), "right": bool(fins[1]), "caudal": bool(fins[2])}


def _event_dict(e):
    return {"t": e.t, "obstacle_index": e.obstacle_index,
            "contact_point": [e.contact_point[0], e.contact_point[1]]}


@dataclass
class _Client:
    """Per-connection outbox: ordered control messages plus a latest-wins
    state slot (events of a displaced snapshot carry over to the next)."""

    ws: object
    role: str  # "controller" | "observer"
    control: deque = field(default_factory=deque)
    pending_state: dict | None = None
    wake: asyncio.Event = field(default_factory=asyncio.Event)

    def push_snapshot(self, msg: dict) -> None:
        old = self.pending_state
        if old is not None and old.get("events"):
            msg = dict(msg)
            msg["events"] = old["events"] + msg["events"]
        self.pending_state = msg
        self.wake.set()

    def push_control(self, msg: dict) -> None:
        self.control.append(msg)
        self.wake.set()


class SimServer:
    """Physics loop + WebSocket fanout around a ScenarioRunner."""

    def __init__(self, config: ToolkitConfig | None = None, host: str = "127.0.0.1",
                 port: int = 0, snapshot_rate: float = DEFAULT_SNAPSHOT_RATE,
                 replay_path: str | None = None, pace: str = "real",
                 initial_scenario: str = DEFAULT_SCENARIO,
                 thrust_lag_tau: float = 0.2):
        if pace not in ("real", "turbo"):
            raise ValidationError("pace must be 'real' or 'turbo'")
        self.config = config or calibrated_config()
        self.host = host
        self.port = port
        self.snapshot_rate = float(snapshot_rate)
        self.replay_path = replay_path
        self.pace = pace
        self.initial_scenario = initial_scenario
        self.thrust_lag_tau = thrust_lag_tau

        self.runner: ScenarioRunner | None = None
        self.scenario_name = ""
        self.paused = False
        self.clients: list[_Client] = []
        self.controller: _Client | None = None
        self._pending: list[dict] = []
        self._pending_events: list = []
        self._last_snapshot_tick = -1
        self._replay_fh = None
        self._stop = None  # asyncio.Event, created on loop
        self._loop = None
        self._thread = None
        self.bound_port = None

    # ---------------------------------------------------------------- physics

    def _log_command(self, tick: int, message: dict) -> None:
        if self._replay_fh is not None:
            self._replay_fh.write(json.dumps({"tick": tick, "message": message},
                                             separators=(",", ":")) + "\n")
            self._replay_fh.flush()

    def _scenario_message(self) -> dict:
        from .scenarios import scenario_to_dict

        detail = scenario_to_dict(self.runner.scenario)
        detail["name"] = self.scenario_name
        return {"type": "scenario", "scenario": detail}

    def _reset(self, scenario_spec) -> None:
        if isinstance(scenario_spec, str):
            scenario = get_scenario(scenario_spec)
            name = scenario_spec
        else:
            scenario = scenario_from_dict(scenario_spec)
            name = scenario.name or "inline"
        self.runner = ScenarioRunner(scenario, self.config.body, self.thrust_lag_tau)
        self.scenario_name = name
        self.paused = False  # an explicit reset always starts running
        self._pending_events = []
        self._last_snapshot_tick = -1
        self._log_command(0, {"type": "reset", "scenario": scenario_spec})
        msg = self._scenario_message()
        for client in self.clients:
            client.pending_state = None  # drop stale pre-reset snapshots
            client.push_control(msg)

    def _apply_pending(self) -> None:
        for msg in self._pending:
            kind = msg["type"]
            if kind == "set_fins":
                self.runner.set_fins((msg["left"], msg["right"], msg["caudal"]))
                self._log_command(self.runner.tick, msg)
            elif kind == "reset":
                self._reset(msg["scenario"])
            elif kind == "pause":
                self.paused = True
                self._log_command(self.runner.tick, msg)
            elif kind == "resume":
                self.paused = False
                self._log_command(self.runner.tick, msg)
        self._pending.clear()

    def _tick_batch(self, n: int) -> None:
        for _ in range(n):
            self._apply_pending()
            if self.paused:
                break
            events = self.runner.advance()
            self._pending_events.extend(events)

    def _snapshot_message(self) -> dict:
        state = self.runner.state()
        msg = {
            "type": "state",
            "tick": self.runner.tick,
            "t": state.t,
            "x": state.x,
            "y": state.y,
            "theta": state.theta,
            "u": state.u,
            "v": state.v,
            "r": state.r,
            "fins": _fins_dict(self.runner.targets),
            "events": [_event_dict(e) for e in self._pending_events],
        }
        self._pending_events = []
        self._last_snapshot_tick = self.runner.tick
        return msg

    def _broadcast_snapshot(self) -> None:
        if not self.clients:
            return
        msg = self._snapshot_message()
        for client in self.clients:
            client.push_snapshot(msg)

    async def _physics_loop(self) -> None:
        loop = asyncio.get_running_loop()
        anchor = loop.time()
        done_ticks = 0
        next_emit = loop.time()
        while not self._stop.is_set():
            if self.pace == "real":
                await asyncio.sleep(_PACE_SLICE)
                if self.paused:
                    self._apply_pending()
                    anchor = loop.time() - done_ticks * PHYSICS_DT
                else:
                    due = int((loop.time() - anchor) / PHYSICS_DT)
                    batch = min(max(due - done_ticks, 0), _MAX_BATCH)
                    self._tick_batch(batch)
                    done_ticks = self.runner.tick
            else:
                self._tick_batch(_MAX_BATCH)
                await asyncio.sleep(0)
            now = loop.time()
            if now >= next_emit:
                self._broadcast_snapshot()
                next_emit = now + 1.0 / self.snapshot_rate

    # ------------------------------------------------------------ connections

    async def _send_error(self, ws, code: str, message: str) -> None:
        await ws.send(json.dumps({"type": "error", "code": code, "message": message}))

    async def _sender(self, client: _Client) -> None:
        while True:
            await client.wake.wait()
            client.wake.clear()
            while client.control:
                await client.ws.send(json.dumps(client.control.popleft()))
            if client.pending_state is not None:
                msg, client.pending_state = client.pending_state, None
                await client.ws.send(json.dumps(msg))

    def _validate(self, msg: dict) -> None:
        kind = msg.get("type")
        if kind == "set_fins":
            for key in ("left", "right", "caudal"):
                if not isinstance(msg.get(key), bool):
                    raise ValidationError(f"set_fins.{key} must be a boolean")
        elif kind == "reset":
            scenario = msg.get("scenario")
            if isinstance(scenario, str):
                if scenario not in scenario_names():
                    raise ValidationError(f"unknown scenario {scenario!r}")
            elif not isinstance(scenario, dict):
                raise ValidationError("reset.scenario must be a name or an object")
        elif kind == "set_rate":
            rate = msg.get("snapshots_per_s")
            if not isinstance(rate, (int, float)) or not 1 <= rate <= 60:
                raise ValidationError("snapshots_per_s must be within [1, 60]")
        elif kind in ("pause", "resume"):
            pass
        else:
            raise ValidationError(f"unknown message type {kind!r}")

    async def _handler(self, ws) -> None:
        # first frame must be a valid hello
        try:
            raw = await asyncio.wait_for(ws.recv(), timeout=10.0)
            hello = json.loads(raw)
            if hello.get("type") != "hello":
                raise ValidationError("first message must be hello")
            if int(hello.get("protocol_version", -1)) != PROTOCOL_VERSION:
                raise ValidationError(
                    f"protocol_version must be {PROTOCOL_VERSION}"
                )
        except (json.JSONDecodeError, ValidationError, ValueError, TypeError) as exc:
            await self._send_error(ws, "bad_hello", str(exc))
            await ws.close()
            return
        except (asyncio.TimeoutError, Exception):
            return

        role = "observer" if self.controller is not None else "controller"
        client = _Client(ws=ws, role=role)
        self.clients.append(client)
        if role == "controller":
            self.controller = client
        await ws.send(json.dumps({
            "type": "welcome",
            "server_version": SERVER_VERSION,
            "protocol_version": PROTOCOL_VERSION,
            "scenarios": list(scenario_names()),
            "role": role,
            "scenario": self.scenario_name,
            "dt_s": PHYSICS_DT,
            "body_length_m": self.config.body.body_length,
        }))
        client.push_control(self._scenario_message())
        sender = asyncio.create_task(self._sender(client))
        try:
            async for raw in ws:
                try:
                    msg = json.loads(raw)
                    if not isinstance(msg, dict):
                        raise ValidationError("message must be a JSON object")
                    self._validate(msg)
                except (json.JSONDecodeError, ValidationError) as exc:
                    client.push_control({"type": "error", "code": "malformed",
                                         "message": str(exc)})
                    await asyncio.sleep(0.1)  # let the outbox drain
                    break
                if client.role != "controller":
                    client.push_control({"type": "error", "code": "observer",
                                         "message": "observers cannot send commands"})
                    continue
                if msg["type"] == "set_rate":
                    self.snapshot_rate = float(msg["snapshots_per_s"])
                else:
                    self._pending.append(msg)
        finally:
            sender.cancel()
            if client in self.clients:
                self.clients.remove(client)
            if self.controller is client:
                self.controller = None
                # dead-man switch: stop thrusting and freeze the sim
                self._pending.append({"type": "set_fins", "left": False,
                                      "right": False, "caudal": False})
                self._pending.append({"type": "pause"})
            await ws.close()

    # -------------------------------------------------------------- lifecycle

    async def _main(self, ready: threading.Event | None = None) -> None:
        from websockets.asyncio.server import serve

        self._stop = asyncio.Event()
        self._loop = asyncio.get_running_loop()
        if self.replay_path:
            self._replay_fh = open(self.replay_path, "w")
        self._reset(self.initial_scenario)
        async with serve(self._handler, self.host, self.port) as server:
            self.bound_port = next(iter(server.sockets)).getsockname()[1]
            physics = asyncio.create_task(self._physics_loop())
            if ready is not None:
                ready.set()
            await self._stop.wait()
            physics.cancel()
        if self._replay_fh is not None:
            self._replay_fh.close()
            self._replay_fh = None

    def run_forever(self) -> None:
        """Run the server in the current thread until interrupted."""
        try:
            asyncio.run(self._main())
        except KeyboardInterrupt:
            pass

    def start_background(self) -> int:
        """Start the server on a daemon thread; returns the bound port."""
        ready = threading.Event()
        self._thread = threading.Thread(
            target=lambda: asyncio.run(self._main(ready)), daemon=True
        )
        self._thread.start()
        if not ready.wait(timeout=10.0):
            raise RuntimeError("server failed to start")
        return self.bound_port

    def stop(self) -> None:
        if self._loop is not None:
            try:
                self._loop.call_soon_threadsafe(self._stop.set)
            except RuntimeError:
                pass  # loop already closed
            self._loop = None
        if self._thread is not None:
            self._thread.join(timeout=10.0)
            self._thread = None


# ------------------------------------------------------------------- replay


def parse_replay_file(path) -> list[tuple[int, dict]]:
    """Read a replay file into (tick, message) pairs."""
    out = []
    with open(path) as fh:
        for line in fh:
            line = line.strip()
            if not line:
                continue
            entry = json.loads(line)
            out.append((int(entry["tick"]), entry["message"]))
    return out


def replay_log(config: ToolkitConfig, log: list[tuple[int, dict]],
               n_ticks: int, thrust_lag_tau: float = 0.2) -> Trajectory:
    """Re-execute the final segment of a command log offline.

    Only the portion after the last reset is replayed (a reset restarts the
    tick counter).  Pause/resume need no handling here: the log is indexed
    by physics tick, and paused spans advance no ticks.
    """
    last_reset = None
    for i, (_, msg) in enumerate(log):
        if msg.get("type") == "reset":
            last_reset = i
    if last_reset is None:
        raise ValidationError("command log contains no reset line")
    scenario_spec = log[last_reset][1]["scenario"]
    scenario = (get_scenario(scenario_spec) if isinstance(scenario_spec, str)
                else scenario_from_dict(scenario_spec))
    commands = [
        (tick, (msg["left"], msg["right"], msg["caudal"]))
        for tick, msg in log[last_reset + 1:]
        if msg.get("type") == "set_fins"
    ]
    return replay_commands(scenario, config.body, commands, n_ticks, thrust_lag_tau)


def main(argv=None) -> None:
    """Run a server from the command line; prints ``PORT <n>`` once bound."""
    import argparse

    parser = argparse.ArgumentParser(description="vibrafin simulation server")
    parser.add_argument("--host", default="127.0.0.1")
    parser.add_argument("--port", type=int, default=0)
    parser.add_argument("--snapshot-rate", type=float, default=DEFAULT_SNAPSHOT_RATE)
    parser.add_argument("--pace", choices=("real", "turbo"), default="real")
    parser.add_argument("--scenario", default=DEFAULT_SCENARIO)
    parser.add_argument("--replay-file", default=None)
    args = parser.parse_args(argv)
    server = SimServer(host=args.host, port=args.port,
                       snapshot_rate=args.snapshot_rate, pace=args.pace,
                       initial_scenario=args.scenario,
                       replay_path=args.replay_file)
    port = server.start_background()
    print(f"PORT {port}", flush=True)
    try:
        server._thread.join()
    except KeyboardInterrupt:
        server.stop()


if __name__ == "__main__":
    main()
