"""Client-facing DAP endpoint.

Exposes the coordinator as an ordinary debug adapter: plain protocol, no
extended requests, one logical thread. Served over stdio, a TCP port, or
any pair of binary streams (tests use pipes).
"""

from __future__ import annotations

import logging
import socket
import sys
from pathlib import Path
from typing import Any, BinaryIO, Callable

from .config import SessionConfig
from .coordinator import Coordinator, SessionPhase
from .errors import InputError, PolydapError
from .transport import MessageStream, StreamClosed
from .wire import DapMessage, MessageKind

log = logging.getLogger(__name__)

_CAPABILITIES = {
    "supportsConfigurationDoneRequest": True,
    "supportsSetVariable": True,
    "supportsTerminateRequest": True,
    "supportsEvaluateForHovers": False,
}

# Requests that remain serviceable while the debuggee is running.
_RUNNING_SAFE = frozenset({"pause", "disconnect", "terminate", "setBreakpoints", "threads"})


class DapServer:
    """Serves one client connection per session."""

    def __init__(self, config: SessionConfig, working_dir: str | None = None) -> None:
        self.config = config
        self.working_dir = working_dir

    def serve_stdio(self) -> None:
        self.serve_streams(sys.stdin.buffer, sys.stdout.buffer)

    def serve_tcp(self, port: int, host: str = "127.0.0.1", once: bool = True) -> None:
        listener = socket.create_server((host, port))
        log.info("listening on %s:%d", host, port)
        try:
            while True:
                conn, peer = listener.accept()
                log.info("client connected from %s", peer)

                def shutdown_conn(sock=conn):
                    try:
                        sock.shutdown(socket.SHUT_RDWR)
                    except OSError:
                        pass

                with conn:
                    self.serve_streams(
                        conn.makefile("rb"), conn.makefile("wb"), unblock=shutdown_conn
                    )
                if once:
                    return
        finally:
            listener.close()

    def serve_streams(
        self,
        rfile: BinaryIO,
        wfile: BinaryIO,
        unblock: "Callable[[], None] | None" = None,
    ) -> None:
        _Connection(self.config, rfile, wfile, self.working_dir, unblock).run()


class _Connection:
    def __init__(
        self,
        config: SessionConfig,
        rfile: BinaryIO,
        wfile: BinaryIO,
        working_dir: str | None,
        unblock: "Callable[[], None] | None" = None,
    ) -> None:
        self._stream = MessageStream(rfile, wfile, label="client", unblock=unblock)
        self.coordinator = Coordinator(
            config, event_sink=self._emit_event, working_dir=working_dir
        )
        self._launch_entry: str | None = None
        self._configured = False
        self._disconnecting = False
        self._deferred: list[DapMessage] = []

    def run(self) -> None:
        try:
            while not self._disconnecting:
                if self._deferred:
                    self._handle(self._deferred.pop(0))
                    continue
                msg = self._stream.recv(timeout=0.2)
                if msg is None:
                    continue
                if isinstance(msg, StreamClosed):
                    log.info("client went away (%s)", msg.reason)
                    break
                self._handle(msg)
        finally:
            self.coordinator.shutdown()
            self._stream.close()

    # -- plumbing ----------------------------------------------------------

    def _emit_event(self, name: str, body: dict[str, Any]) -> None:
        self._stream.send(DapMessage.event(self._stream.next_seq(), name, body))

    def _respond(
        self,
        request: DapMessage,
        body: dict[str, Any] | None = None,
        *,
        success: bool = True,
        error_text: str | None = None,
    ) -> None:
        self._stream.send(
            DapMessage.response_to(
                request,
                self._stream.next_seq(),
                success=success,
                body=body or {},
                error_text=error_text,
            )
        )

    def _handle(self, msg: DapMessage) -> None:
        if msg.kind is not MessageKind.REQUEST:
            log.warning("ignoring non-request client message: %s", msg.name)
            return
        try:
            self._dispatch(msg)
        except PolydapError as exc:
            self._respond(msg, success=False, error_text=str(exc))
        except Exception:  # pragma: no cover - defensive: keep the endpoint alive
            log.exception("unhandled error serving %s", msg.name)
            self._respond(msg, success=False, error_text="internal error")

    # -- request dispatch -----------------------------------------------------

    def _dispatch(self, msg: DapMessage) -> None:
        command = msg.name
        if command == "initialize":
            self._respond(msg, dict(_CAPABILITIES))
            self._emit_event("initialized", {})
            return
        if command == "launch":
            self._handle_launch(msg)
            return
        if command == "configurationDone":
            self._configured = True
            self._respond(msg)
            if self._launch_entry is not None:
                self._start_session()
            return
        if command in ("disconnect", "terminate"):
            self._disconnecting = True
            self.coordinator.shutdown()
            self._respond(msg)
            return

        result = self.coordinator.route_client_request(msg)
        self._respond(msg, result.body)
        if result.pump:
            self._pump()

    def _handle_launch(self, msg: DapMessage) -> None:
        entry = msg.payload.get("program") or msg.payload.get("entry")
        if not entry:
            raise InputError("launch requires a 'program' argument")
        if not Path(entry).is_file():
            raise InputError(f"entry file missing: {entry}")
        # Fails fast on unknown extensions without starting any agent.
        self.coordinator.registry.language_for(str(entry))
        self._launch_entry = str(entry)
        self._respond(msg)
        if self._configured:
            self._start_session()

    def _start_session(self) -> None:
        entry, self._launch_entry = self._launch_entry, None
        assert entry is not None
        try:
            self.coordinator.launch_session(entry)
        except PolydapError as exc:
            log.error("launch failed: %s", exc)
            self._emit_event("output", {"category": "stderr", "output": f"{exc}\n"})
            self._emit_event("terminated", {})
            return
        self._pump()

    def _pump(self) -> None:
        self.coordinator.pump(poll=self._poll_client)

    def _poll_client(self) -> None:
        """Handle the few requests that make sense while running."""
        while True:
            msg = self._stream.recv(timeout=0)
            if msg is None:
                return
            if isinstance(msg, StreamClosed):
                self._disconnecting = True
                self.coordinator.shutdown()
                return
            if msg.kind is not MessageKind.REQUEST:
                continue
            if self.coordinator.phase is not SessionPhase.RUNNING:
                # The session stopped under us; let the main loop answer.
                self._deferred.append(msg)
                continue
            if msg.name not in _RUNNING_SAFE:
                self._respond(
                    msg, success=False, error_text=f"{msg.name} rejected: session is running"
                )
                continue
            if msg.name in ("disconnect", "terminate"):
                self._disconnecting = True
                self.coordinator.shutdown()
                self._respond(msg)
                return
            if msg.name == "pause":
                try:
                    self._respond(msg, self.coordinator.pause())
                except PolydapError as exc:
                    self._respond(msg, success=False, error_text=str(exc))
                continue
            try:
                result = self.coordinator.route_client_request(msg)
                self._respond(msg, result.body)
            except PolydapError as exc:
                self._respond(msg, success=False, error_text=str(exc))
