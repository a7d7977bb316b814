"""Client-facing endpoint tests: a real DAP client over pipes."""

from __future__ import annotations

import os
import socket
import threading

import pytest

from polydap.config import SessionConfig, SessionDefaults
from polydap.mockdap.builders import StopSpec, user_frame
from polydap.server import DapServer
from polydap.transport import MessageStream, StreamClosed
from polydap.wire import DapMessage, MessageKind

from scenarios import make_runner, quoted, stage_agent, stage_single_call, touch_program


class DapTestClient:
    """Speaks plain DAP to a server instance over OS pipes."""

    def __init__(self, config: SessionConfig):
        to_server_r, to_server_w = os.pipe()
        to_client_r, to_client_w = os.pipe()
        server = DapServer(config)
        self.thread = threading.Thread(
            target=server.serve_streams,
            args=(os.fdopen(to_server_r, "rb"), os.fdopen(to_client_w, "wb")),
            daemon=True,
        )
        self.thread.start()
        self.stream = MessageStream(
            os.fdopen(to_client_r, "rb"), os.fdopen(to_server_w, "wb"), label="client"
        )
        self.observed: list[tuple[str, str]] = []  # (kind, name) in arrival order
        self._pending_events: list[DapMessage] = []

    def close(self) -> None:
        self.stream.close()
        self.thread.join(timeout=5.0)

    def _pull(self, timeout: float = 10.0) -> DapMessage:
        msg = self.stream.recv(timeout=timeout)
        assert msg is not None, "timed out waiting for a server message"
        assert not isinstance(msg, StreamClosed), f"server went away: {msg.reason}"
        self.observed.append((msg.kind.value, msg.name))
        return msg

    def request(self, command: str, arguments: dict | None = None) -> DapMessage:
        seq = self.stream.next_seq()
        self.stream.send(DapMessage.request(seq, command, arguments or {}))
        while True:
            msg = self._pull()
            if msg.kind is MessageKind.RESPONSE and msg.request_seq == seq:
                return msg
            assert msg.kind is MessageKind.EVENT, f"unexpected {msg}"
            self._pending_events.append(msg)

    def next_event(self, name: str | None = None, timeout: float = 10.0) -> DapMessage:
        while self._pending_events:
            event = self._pending_events.pop(0)
            if name is None or event.name == name:
                return event
        while True:
            msg = self._pull(timeout)
            assert msg.kind is MessageKind.EVENT, f"expected event, got {msg}"
            if name is None or msg.name == name:
                return msg


def config_for(*staged) -> SessionConfig:
    return SessionConfig(
        languages=tuple(s.config for s in staged),
        defaults=SessionDefaults(timeout_s=5.0),
    )


def stage_user_session(tmp_path):
    """One agent, one breakpoint stop, one step stop, then completion."""
    entry = touch_program(tmp_path, "a.py")
    runner = make_runner(tmp_path, "python", ".py")
    stops = [
        StopSpec(frames=[runner.outer_standby_frame(101)], resume=None),
        StopSpec(
            frames=[user_frame(201, entry, 5), runner.outer_standby_frame(202)],
            reason="breakpoint",
        ),
        StopSpec(
            frames=[user_frame(301, entry, 6), runner.outer_standby_frame(302)],
            reason="step",
            resume="next",
        ),
        StopSpec(
            frames=[runner.outer_standby_frame(401)],
            variables={401: {"res": "3"}},
        ),
    ]
    return entry, stage_agent(tmp_path, "python", ".py", stops, runner=runner)


def test_full_session_over_the_wire(tmp_path):
    entry, staged = stage_user_session(tmp_path)
    client = DapTestClient(config_for(staged))

    resp = client.request("initialize", {"adapterID": "test"})
    assert resp.success and resp.payload["supportsConfigurationDoneRequest"]
    client.next_event("initialized")
    assert client.request(
        "setBreakpoints",
        {"source": {"path": entry}, "breakpoints": [{"line": 5}]},
    ).payload["breakpoints"] == [{"verified": True, "line": 5}]
    assert client.request("launch", {"program": entry}).success
    assert client.request("configurationDone").success

    stopped = client.next_event("stopped")
    assert stopped.payload["reason"] == "breakpoint"
    assert stopped.payload["threadId"] == 1

    threads = client.request("threads")
    assert threads.payload["threads"] == [{"id": 1, "name": "main"}]
    stack = client.request("stackTrace", {"threadId": 1})
    assert [f["line"] for f in stack.payload["stackFrames"]] == [5]
    assert stack.payload["stackFrames"][0]["source"]["path"] == entry

    assert client.request("next", {"threadId": 1}).success
    assert client.next_event("stopped").payload["reason"] == "step"

    assert client.request("continue", {"threadId": 1}).payload["allThreadsContinued"]
    assert client.next_event("output").payload["output"] == "3\n"
    assert client.next_event("exited").payload["exitCode"] == 0
    client.next_event("terminated")
    assert client.request("disconnect").success
    client.close()

    assert client.observed == [
        ("response", "initialize"),
        ("event", "initialized"),
        ("response", "setBreakpoints"),
        ("response", "launch"),
        ("response", "configurationDone"),
        ("event", "stopped"),
        ("response", "threads"),
        ("response", "stackTrace"),
        ("response", "next"),
        ("event", "stopped"),
        ("response", "continue"),
        ("event", "output"),
        ("event", "exited"),
        ("event", "terminated"),
        ("response", "disconnect"),
    ]


def test_polyglot_session_emits_no_intermediate_stops(tmp_path):
    staging = stage_single_call(tmp_path)
    client = DapTestClient(config_for(staging.caller, staging.callee))
    client.request("initialize")
    client.next_event("initialized")
    client.request("launch", {"program": staging.entry})
    client.request("configurationDone")
    assert client.next_event("output").payload["output"] == "7\n"
    client.next_event("exited")
    client.next_event("terminated")
    client.request("disconnect")
    client.close()
    assert ("event", "stopped") not in client.observed


def test_launch_with_unknown_extension_fails(tmp_path):
    staging = stage_single_call(tmp_path)
    bad_entry = touch_program(tmp_path, "main.rb")
    client = DapTestClient(config_for(staging.caller, staging.callee))
    client.request("initialize")
    resp = client.request("launch", {"program": bad_entry})
    assert resp.success is False
    assert "rb" in (resp.error_text or "")
    client.request("disconnect")
    client.close()


def test_launch_missing_program_fails(tmp_path):
    staging = stage_single_call(tmp_path)
    client = DapTestClient(config_for(staging.caller, staging.callee))
    client.request("initialize")
    resp = client.request("launch", {"program": str(tmp_path / "ghost.py")})
    assert resp.success is False
    client.request("disconnect")
    client.close()


def test_resume_without_stop_is_an_error_response(tmp_path):
    staging = stage_single_call(tmp_path)
    client = DapTestClient(config_for(staging.caller, staging.callee))
    client.request("initialize")
    resp = client.request("continue", {"threadId": 1})
    assert resp.success is False
    client.request("disconnect")
    client.close()


def test_serve_tcp_accepts_a_client(tmp_path):
    entry, staged = stage_user_session(tmp_path)
    server = DapServer(config_for(staged))
    with socket.socket() as probe:
        probe.bind(("127.0.0.1", 0))
        port = probe.getsockname()[1]
    thread = threading.Thread(target=server.serve_tcp, args=(port,), daemon=True)
    thread.start()

    deadline_conn = None
    for _ in range(100):
        try:
            deadline_conn = socket.create_connection(("127.0.0.1", port), timeout=1.0)
            break
        except OSError:
            import time

            time.sleep(0.05)
    assert deadline_conn is not None
    deadline_conn.settimeout(None)
    stream = MessageStream(
        deadline_conn.makefile("rb"), deadline_conn.makefile("wb"), label="tcp-client"
    )
    stream.send(DapMessage.request(1, "initialize", {}))
    resp = stream.recv(timeout=10.0)
    assert resp is not None and not isinstance(resp, StreamClosed), f"closed: {getattr(resp, 'reason', resp)}"
    assert resp.name == "initialize"
    stream.send(DapMessage.request(2, "disconnect", {}))
    thread.join(timeout=10.0)
    assert not thread.is_alive()
    stream.close()
    deadline_conn.close()
