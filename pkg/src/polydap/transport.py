"""Byte transports for framed message streams.

A MessageStream owns exactly one connection: a background thread reads and
decodes inbound frames into an ordered queue, while sends go through a lock.
Consumers pull from the queue on a single logical control thread.
"""

from __future__ import annotations

import logging
import os
import queue
import select
import socket
import subprocess
import threading
import time
from dataclasses import dataclass
from typing import Any, BinaryIO, Callable

from .errors import AgentDead, StreamError
from .wire import DapMessage, FrameBuffer, encode_frame

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class StreamClosed:
    """Sentinel queued when the peer goes away or the stream poisons."""

    reason: str


class MessageStream:
    """One framed connection: locked writer plus a reader thread.

    The reader file is closed only by the reader thread itself (closing a
    buffered reader from another thread deadlocks on the buffer lock while
    a blocking read is in flight). `unblock` is invoked on close to force
    that read to return, e.g. a socket shutdown.
    """

    def __init__(
        self,
        reader: BinaryIO,
        writer: BinaryIO,
        label: str = "",
        unblock: "Callable[[], None] | None" = None,
    ) -> None:
        self._reader = reader
        self._writer = writer
        self._label = label
        self._unblock = unblock
        self._write_lock = threading.Lock()
        self._seq = 0
        self._closed = False
        self.inbox: queue.SimpleQueue[DapMessage | StreamClosed] = queue.SimpleQueue()
        self._thread = threading.Thread(
            target=self._read_loop, name=f"reader-{label or id(self)}", daemon=True
        )
        self._thread.start()

    def next_seq(self) -> int:
        self._seq += 1
        return self._seq

    def send(self, msg: DapMessage) -> None:
        data = encode_frame(msg)
        with self._write_lock:
            if self._closed:
                raise AgentDead(f"{self._label}: stream closed")
            try:
                self._writer.write(data)
                self._writer.flush()
            except (BrokenPipeError, OSError, ValueError) as exc:
                self._closed = True
                raise AgentDead(f"{self._label}: write failed: {exc}") from exc

    def recv(self, timeout: float | None = None) -> DapMessage | StreamClosed | None:
        """Pop the next inbound message; None on timeout."""
        try:
            return self.inbox.get(timeout=timeout)
        except queue.Empty:
            return None

    def close(self) -> None:
        self._closed = True
        try:
            self._writer.close()
        except OSError:
            pass
        if self._unblock is not None:
            try:
                self._unblock()
            except OSError:
                pass

    def join(self, timeout: float = 2.0) -> None:
        self._thread.join(timeout)

    def _read_loop(self) -> None:
        # Prefer raw fd reads: they take no Python-level buffer locks, so a
        # daemon reader blocked at interpreter shutdown cannot deadlock
        # stream finalization (the stream was never read elsewhere, so no
        # buffered bytes can be lost).
        read_chunk = None
        try:
            fd = self._reader.fileno()

            def read_chunk() -> bytes:
                while True:
                    try:
                        return os.read(fd, 65536)
                    except BlockingIOError:
                        # Caller handed us a non-blocking fd (e.g. a socket
                        # with a timeout); wait for readiness and retry.
                        select.select([fd], [], [], 1.0)

        except (OSError, ValueError, AttributeError):
            pass
        if read_chunk is None:
            reader = self._reader
            if hasattr(reader, "read1"):
                read_chunk = lambda: reader.read1(65536)  # noqa: E731
            else:
                read_chunk = lambda: reader.read(65536)  # noqa: E731

        buffer = FrameBuffer()
        try:
            while True:
                chunk = read_chunk()
                if not chunk:
                    self.inbox.put(StreamClosed("eof"))
                    return
                for msg in buffer.feed(chunk):
                    self.inbox.put(msg)
        except StreamError as exc:
            log.error("%s: poisoned stream: %s", self._label, exc)
            self.inbox.put(StreamClosed(f"poisoned: {exc}"))
        except (OSError, ValueError) as exc:
            self.inbox.put(StreamClosed(f"read failed: {exc}"))
        finally:
            try:
                self._reader.close()
            except (OSError, ValueError):
                pass


class ChildProcessTransport:
    """Spawns a child adapter and exposes its stdio as a MessageStream."""

    def __init__(self, command: list[str], label: str = "", cwd: str | None = None) -> None:
        try:
            self.process = subprocess.Popen(
                command,
                stdin=subprocess.PIPE,
                stdout=subprocess.PIPE,
                stderr=None,
                cwd=cwd,
            )
        except OSError as exc:
            raise AgentDead(f"cannot spawn adapter {command!r}: {exc}") from exc
        assert self.process.stdin is not None and self.process.stdout is not None
        self.stream = MessageStream(self.process.stdout, self.process.stdin, label=label)

    def terminate(self, grace_s: float = 2.0) -> None:
        """Best-effort shutdown: allow a clean exit, then TERM, then KILL."""
        self.stream.close()
        try:
            self.process.wait(timeout=grace_s)
        except subprocess.TimeoutExpired:
            self.process.terminate()
            try:
                self.process.wait(timeout=grace_s)
            except subprocess.TimeoutExpired:
                self.process.kill()
                self.process.wait(timeout=grace_s)
        self.stream.join()


class TcpTransport:
    """Connects to an adapter listening on a TCP port."""

    def __init__(
        self,
        host: str,
        port: int,
        label: str = "",
        connect_timeout_s: float = 10.0,
        process: subprocess.Popen | None = None,
    ) -> None:
        self.process = process
        deadline = time.monotonic() + connect_timeout_s
        last_error: Exception | None = None
        while True:
            try:
                sock = socket.create_connection((host, port), timeout=1.0)
                break
            except OSError as exc:
                last_error = exc
                if time.monotonic() >= deadline:
                    raise AgentDead(f"cannot connect to {host}:{port}: {exc}") from exc
                time.sleep(0.05)
        sock.settimeout(None)
        self._sock = sock
        self.stream = MessageStream(
            sock.makefile("rb"),
            sock.makefile("wb"),
            label=label,
            unblock=self._shutdown_socket,
        )
        del last_error

    def _shutdown_socket(self) -> None:
        try:
            self._sock.shutdown(socket.SHUT_RDWR)
        except OSError:
            pass

    def terminate(self, grace_s: float = 2.0) -> None:
        self.stream.close()
        try:
            self._sock.close()
        except OSError:
            pass
        if self.process is not None and self.process.poll() is None:
            self.process.terminate()
            try:
                self.process.wait(timeout=grace_s)
            except subprocess.TimeoutExpired:
                self.process.kill()
                self.process.wait(timeout=grace_s)
        self.stream.join()


def spawn_adapter(
    command: list[str],
    transport: str | dict[str, Any],
    label: str = "",
    cwd: str | None = None,
) -> ChildProcessTransport | TcpTransport:
    """Start a child adapter per its configured transport.

    `transport` is "stdio" or {"tcp": {"host"?, "port"}}; with tcp the
    command is spawned first and then connected to.
    """
    if transport == "stdio":
        return ChildProcessTransport(command, label=label, cwd=cwd)
    if isinstance(transport, dict) and "tcp" in transport:
        spec = transport["tcp"]
        process: subprocess.Popen | None = None
        if command:
            try:
                process = subprocess.Popen(command, cwd=cwd)
            except OSError as exc:
                raise AgentDead(f"cannot spawn adapter {command!r}: {exc}") from exc
        return TcpTransport(
            spec.get("host", "127.0.0.1"), int(spec["port"]), label=label, process=process
        )
    raise AgentDead(f"unsupported transport {transport!r}")
