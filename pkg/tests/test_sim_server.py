"""Interactive server: protocol, roles, determinism and replay."""

import json
import time

import pytest
from websockets.sync.client import connect

from vibrafin.config import calibrated_config
from vibrafin.sim_server import PROTOCOL_VERSION, SimServer, parse_replay_file, replay_log


@pytest.fixture()
def server(tmp_path):
    srv = SimServer(pace="turbo", replay_path=str(tmp_path / "replay.jsonl"))
    port = srv.start_background()
    yield srv, port
    srv.stop()


@pytest.fixture()
def paced_server(tmp_path):
    srv = SimServer(pace="real", replay_path=str(tmp_path / "replay.jsonl"))
    port = srv.start_background()
    yield srv, port
    srv.stop()


def client(port, **kw):
    return connect(f"ws://127.0.0.1:{port}", open_timeout=10, **kw)


def hello(ws):
    ws.send(json.dumps({"type": "hello", "protocol_version": PROTOCOL_VERSION}))
    msg = json.loads(ws.recv(timeout=10))
    assert msg["type"] == "welcome"
    return msg


def recv_state(ws, timeout=10):
    while True:
        msg = json.loads(ws.recv(timeout=timeout))
        if msg["type"] == "state":
            return msg


class TestHandshake:
    def test_welcome_once_with_scenarios(self, server):
        _, port = server
        with client(port) as ws:
            welcome = hello(ws)
            assert welcome["server_version"]
            assert "floating_balls" in welcome["scenarios"]
            assert welcome["role"] == "controller"
            # next message is a state, not a second welcome
            assert recv_state(ws)["type"] == "state"

    def test_bad_protocol_version_rejected(self, server):
        _, port = server
        with client(port) as ws:
            ws.send(json.dumps({"type": "hello", "protocol_version": 99}))
            msg = json.loads(ws.recv(timeout=10))
            assert msg["type"] == "error"

    def test_first_message_must_be_hello(self, server):
        _, port = server
        with client(port) as ws:
            ws.send(json.dumps({"type": "set_fins", "left": True, "right": False,
                                "caudal": False}))
            msg = json.loads(ws.recv(timeout=10))
            assert msg["type"] == "error"


class TestCommands:
    def test_caudal_thrust_from_rest_increases_surge(self, paced_server):
        _, port = paced_server
        with client(port) as ws:
            hello(ws)
            ws.send(json.dumps({"type": "reset", "scenario": "open_water"}))
            ws.send(json.dumps({"type": "set_fins", "left": False, "right": False,
                                "caudal": True}))
            # wait for motion to start, then check surge rises monotonically
            while True:
                msg = recv_state(ws)
                if msg["u"] > 1e-6:
                    break
            values = [msg["u"]]
            while len(values) < 50:
                values.append(recv_state(ws)["u"])
            assert all(b > a for a, b in zip(values, values[1:]))

    def test_state_ticks_monotone(self, server):
        _, port = server
        with client(port) as ws:
            hello(ws)
            ticks = [recv_state(ws)["tick"] for _ in range(10)]
            assert all(b >= a for a, b in zip(ticks, ticks[1:]))

    def test_reset_to_obstacle_scenario(self, server):
        _, port = server
        with client(port) as ws:
            hello(ws)
            ws.send(json.dumps({"type": "reset", "scenario": "floating_balls"}))
            deadline = time.time() + 10
            while time.time() < deadline:
                msg = json.loads(ws.recv(timeout=10))
                if msg["type"] == "scenario" and msg["scenario"]["name"] == "floating_balls":
                    assert len(msg["scenario"]["obstacles"]) == 9
                    return
            pytest.fail("no scenario message after reset")

    def test_malformed_message_errors_and_closes(self, server):
        _, port = server
        with client(port) as ws:
            hello(ws)
            ws.send("this is not json")
            deadline = time.time() + 10
            saw_error = False
            try:
                while time.time() < deadline:
                    msg = json.loads(ws.recv(timeout=10))
                    if msg["type"] == "error":
                        saw_error = True
            except Exception:
                pass
            assert saw_error

    def test_set_rate_validation(self, server):
        _, port = server
        with client(port) as ws:
            hello(ws)
            ws.send(json.dumps({"type": "set_rate", "snapshots_per_s": 500}))
            deadline = time.time() + 10
            while time.time() < deadline:
                msg = json.loads(ws.recv(timeout=10))
                if msg["type"] == "error":
                    return
            pytest.fail("expected an error for out-of-range rate")


class TestObserverIsolation:
    def test_observer_commands_rejected_without_effect(self, server):
        _, port = server
        with client(port) as controller, client(port) as observer:
            assert hello(controller)["role"] == "controller"
            assert hello(observer)["role"] == "observer"
            observer.send(json.dumps({"type": "set_fins", "left": True,
                                      "right": True, "caudal": True}))
            deadline = time.time() + 10
            saw_error = False
            while time.time() < deadline and not saw_error:
                msg = json.loads(observer.recv(timeout=10))
                saw_error = msg["type"] == "error"
            assert saw_error
            # physics state unaffected: fins still all off
            state = recv_state(controller)
            assert state["fins"] == {"left": False, "right": False, "caudal": False}

    def test_controller_disconnect_pauses_and_clears_fins(self, server):
        srv, port = server
        with client(port) as ws:
            hello(ws)
            ws.send(json.dumps({"type": "set_fins", "left": False, "right": False,
                                "caudal": True}))
            recv_state(ws)
        # reconnect as the new controller and observe the dead-man state
        with client(port) as ws:
            welcome = hello(ws)
            assert welcome["role"] == "controller"
            state = recv_state(ws)
            assert state["fins"] == {"left": False, "right": False, "caudal": False}
            # paused: the tick counter freezes
            a = recv_state(ws)["tick"]
            b = recv_state(ws)["tick"]
            assert a == b


class TestReplayParsing:
    def test_log_without_reset_rejected(self, tmp_path):
        from vibrafin.errors import ValidationError

        path = tmp_path / "log.jsonl"
        path.write_text('{"tick": 3, "message": {"type": "set_fins", '
                        '"left": true, "right": false, "caudal": false}}\n')
        log = parse_replay_file(path)
        assert log == [(3, {"type": "set_fins", "left": True, "right": False,
                            "caudal": False})]
        with pytest.raises(ValidationError):
            replay_log(calibrated_config(), log, n_ticks=10)

    def test_replay_uses_last_reset_segment(self, tmp_path):
        path = tmp_path / "log.jsonl"
        path.write_text(
            '{"tick": 0, "message": {"type": "reset", "scenario": "open_water"}}\n'
            '{"tick": 5, "message": {"type": "set_fins", "left": true, "right": true, "caudal": true}}\n'
            '{"tick": 0, "message": {"type": "reset", "scenario": "open_water"}}\n'
            '{"tick": 2, "message": {"type": "set_fins", "left": false, "right": false, "caudal": true}}\n'
        )
        traj = replay_log(calibrated_config(), parse_replay_file(path), n_ticks=10)
        # only the post-reset caudal command applies: fins off for ticks 0-2
        assert traj.fins[1] == (False, False, False)
        assert traj.fins[5] == (False, False, True)


class TestEvents:
    def test_collision_events_reach_snapshots(self, server):
        # drive straight into the measurement post; the contact events must
        # surface in a snapshot even though snapshots decimate the ticks
        _, port = server
        with client(port) as ws:
            hello(ws)
            ws.send(json.dumps({"type": "reset", "scenario": "measurement_post"}))
            ws.send(json.dumps({"type": "set_fins", "left": False, "right": False,
                                "caudal": True}))
            deadline = time.time() + 30
            while time.time() < deadline:
                msg = json.loads(ws.recv(timeout=30))
                if msg["type"] == "state" and msg["events"]:
                    event = msg["events"][0]
                    assert event["obstacle_index"] == 0
                    assert len(event["contact_point"]) == 2
                    return
            pytest.fail("no collision event surfaced in any snapshot")


class TestReplayDeterminism:
    def test_offline_replay_reproduces_states_bitwise(self, server, tmp_path):
        srv, port = server
        snapshots = []
        with client(port) as ws:
            hello(ws)
            ws.send(json.dumps({"type": "reset", "scenario": "floating_balls"}))
            # states received after the post-reset scenario notice belong to
            # the new segment (the server drops stale pending snapshots)
            while True:
                msg = json.loads(ws.recv(timeout=10))
                if msg["type"] == "scenario" and msg["scenario"]["name"] == "floating_balls":
                    break
            ws.send(json.dumps({"type": "set_fins", "left": False, "right": False,
                                "caudal": True}))
            while len(snapshots) < 8:
                snapshots.append(recv_state(ws))
            ws.send(json.dumps({"type": "set_fins", "left": True, "right": False,
                                "caudal": True}))
            while len(snapshots) < 16:
                snapshots.append(recv_state(ws))
        srv.stop()

        log = parse_replay_file(srv.replay_path)
        assert any(m.get("type") == "reset" for _, m in log)
        last_tick = snapshots[-1]["tick"]
        traj = replay_log(calibrated_config(), log, n_ticks=last_tick)
        checked = 0
        for snap in snapshots:
            state = traj.states[snap["tick"]]
            for name in ("t", "x", "y", "theta", "u", "v", "r"):
                assert snap[name] == getattr(state, name), (
                    f"mismatch at tick {snap['tick']} field {name}")
            checked += 1
        assert checked >= 16
