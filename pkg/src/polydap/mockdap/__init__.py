"""Scriptable stand-in DAP adapter for hermetic tests.

The mock replays a fixed scenario: lifecycle and resume requests consume
scripted steps (each optionally emitting events such as stops), while
inspection requests (stackTrace, scopes, variables, evaluate, ...) are
served from static stack snapshots and a variable table. It never executes
code; every behavior is data.

Spawn it as a subprocess with ``python -m polydap.mockdap --scenario f``
(so it slots into an adapter command unchanged) or attach it in-process
via :func:`start_inprocess`.
"""

from __future__ import annotations

import json
import os
import threading
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, BinaryIO

from ..errors import ScenarioError
from ..wire import DapMessage, FrameBuffer, MessageKind, encode_frame

AUTO_SERVED = frozenset(
    {
        "stackTrace",
        "scopes",
        "variables",
        "evaluate",
        "setVariable",
        "setExpression",
        "setBreakpoints",
        "threads",
        "disconnect",
    }
)


@dataclass
class FrameSpec:
    """One stack frame of a scripted stop snapshot."""

    id: int
    name: str
    path: str
    line: int

    def to_data(self) -> dict[str, Any]:
        return {"id": self.id, "name": self.name, "path": self.path, "line": self.line}

    @classmethod
    def from_data(cls, data: dict[str, Any]) -> FrameSpec:
        return cls(int(data["id"]), data["name"], data["path"], int(data["line"]))


@dataclass
class ScenarioStep:
    """Expected request pattern plus the scripted reaction."""

    on: dict[str, Any]
    respond: dict[str, Any] = field(default_factory=dict)
    then_emit: list[dict[str, Any]] = field(default_factory=list)

    def to_data(self) -> dict[str, Any]:
        return {"on": self.on, "respond": self.respond, "then_emit": self.then_emit}

    @classmethod
    def from_data(cls, data: dict[str, Any]) -> ScenarioStep:
        return cls(data["on"], data.get("respond", {}), data.get("then_emit", []))


@dataclass
class Scenario:
    """Complete replay script for one mock adapter instance."""

    steps: list[ScenarioStep] = field(default_factory=list)
    variables: dict[str, str] = field(default_factory=dict)
    stacks: list[list[FrameSpec]] = field(default_factory=list)
    strict: bool = True
    capabilities: dict[str, Any] = field(default_factory=dict)
    refuse: list[str] = field(default_factory=list)
    delay_ms: int = 0
    spawn_marker: str | None = None

    def to_data(self) -> dict[str, Any]:
        return {
            "steps": [s.to_data() for s in self.steps],
            "variables": self.variables,
            "stacks": [[f.to_data() for f in stack] for stack in self.stacks],
            "strict": self.strict,
            "capabilities": self.capabilities,
            "refuse": self.refuse,
            "delay_ms": self.delay_ms,
            "spawn_marker": self.spawn_marker,
        }

    @classmethod
    def from_data(cls, data: dict[str, Any]) -> Scenario:
        return cls(
            steps=[ScenarioStep.from_data(s) for s in data.get("steps", [])],
            variables=dict(data.get("variables", {})),
            stacks=[[FrameSpec.from_data(f) for f in stack] for stack in data.get("stacks", [])],
            strict=bool(data.get("strict", True)),
            capabilities=dict(data.get("capabilities", {})),
            refuse=list(data.get("refuse", [])),
            delay_ms=int(data.get("delay_ms", 0)),
            spawn_marker=data.get("spawn_marker"),
        )

    def save(self, path: str | os.PathLike[str]) -> None:
        Path(path).write_text(
            json.dumps(self.to_data(), indent=2, ensure_ascii=False) + "\n", encoding="utf-8"
        )

    @classmethod
    def load(cls, path: str | os.PathLike[str]) -> Scenario:
        return cls.from_data(json.loads(Path(path).read_text(encoding="utf-8")))


def _subset_match(pattern: Any, actual: Any) -> bool:
    """True when every key the pattern specifies is present and equal."""
    if isinstance(pattern, dict):
        if not isinstance(actual, dict):
            return False
        return all(_subset_match(v, actual.get(k)) for k, v in pattern.items())
    if isinstance(pattern, list):
        if not isinstance(actual, list) or len(pattern) != len(actual):
            return False
        return all(_subset_match(p, a) for p, a in zip(pattern, actual))
    return pattern == actual


@dataclass
class Transcript:
    """Ordered record of every message the mock received and sent."""

    entries: list[dict[str, Any]] = field(default_factory=list)
    failure: str | None = None

    def record(self, direction: str, message: dict[str, Any]) -> None:
        self.entries.append({"dir": direction, "message": message})

    def commands(self, direction: str | None = None) -> list[str]:
        """Command/event names in order, optionally one direction only."""
        names = []
        for entry in self.entries:
            if direction is not None and entry["dir"] != direction:
                continue
            msg = entry["message"]
            names.append(msg.get("command") or msg.get("event") or msg.get("type"))
        return names

    def to_data(self) -> dict[str, Any]:
        return {"entries": self.entries, "failure": self.failure}

    @classmethod
    def from_data(cls, data: dict[str, Any]) -> Transcript:
        return cls(entries=list(data.get("entries", [])), failure=data.get("failure"))

    @classmethod
    def load(cls, path: str | os.PathLike[str]) -> Transcript:
        return cls.from_data(json.loads(Path(path).read_text(encoding="utf-8")))


@dataclass
class TranscriptDiff:
    ok: bool
    index: int | None = None
    detail: str | None = None


_SEQ_FIELDS = ("seq", "request_seq")


def _strip_seqs(doc: Any) -> Any:
    if isinstance(doc, dict):
        return {k: _strip_seqs(v) for k, v in doc.items() if k not in _SEQ_FIELDS}
    if isinstance(doc, list):
        return [_strip_seqs(v) for v in doc]
    return doc


def assert_transcript(
    actual: list[dict[str, Any]], expected: list[dict[str, Any]]
) -> TranscriptDiff:
    """Compare transcripts modulo seq numbers.

    Expected entries may specify only the keys they care about; unspecified
    keys are unconstrained. Correlation structure still has to match since
    entries are compared positionally.
    """
    for i, want in enumerate(expected):
        if i >= len(actual):
            return TranscriptDiff(False, i, f"transcript ended; expected {want}")
        got = actual[i]
        if not _subset_match(_strip_seqs(want), _strip_seqs(got)):
            return TranscriptDiff(False, i, f"expected {want}, got {got}")
    if len(actual) > len(expected):
        return TranscriptDiff(
            False, len(expected), f"extra transcript entry {actual[len(expected)]}"
        )
    return TranscriptDiff(True)


class MockDapServer:
    """Synchronous single-connection replay engine."""

    def __init__(self, scenario: Scenario) -> None:
        self.scenario = scenario
        self.transcript = Transcript()
        self._seq = 0
        self._step_index = 0
        self._stop_index = -1  # index into scenario.stacks for the current stop

    # -- serving ---------------------------------------------------------

    def serve(self, rfile: BinaryIO, wfile: BinaryIO) -> Transcript:
        """Serve one connection until disconnect or EOF; returns transcript."""
        if self.scenario.spawn_marker:
            with open(self.scenario.spawn_marker, "a", encoding="utf-8") as fh:
                fh.write(f"{os.getpid()}:{threading.get_ident()}\n")
        buffer = FrameBuffer()
        try:
            while True:
                chunk = rfile.read1(65536) if hasattr(rfile, "read1") else rfile.read(65536)
                if not chunk:
                    return self.transcript
                for msg in buffer.feed(chunk):
                    if not self._handle(msg, wfile):
                        return self.transcript
        except (OSError, ValueError):
            return self.transcript

    def _send(self, wfile: BinaryIO, msg: DapMessage) -> None:
        self.transcript.record("sent", msg.to_wire())
        wfile.write(encode_frame(msg))
        wfile.flush()

    def _next_seq(self) -> int:
        self._seq += 1
        return self._seq

    def _sleep(self, extra_ms: int = 0) -> None:
        total = self.scenario.delay_ms + extra_ms
        if total > 0:
            time.sleep(total / 1000.0)

    def _handle(self, msg: DapMessage, wfile: BinaryIO) -> bool:
        self.transcript.record("recv", msg.to_wire())
        if msg.kind is not MessageKind.REQUEST:
            self._fail(f"mock received a non-request message: {msg.to_wire()}")
            return True

        step = self._current_step()
        if step is not None and _subset_match(step.on, msg.to_wire()):
            self._step_index += 1
            self._respond_step(msg, step, wfile)
            return msg.name != "disconnect"

        if msg.name in self.scenario.refuse:
            self._sleep()
            self._send(
                wfile,
                DapMessage.response_to(
                    msg,
                    self._next_seq(),
                    success=False,
                    error_text=f"{msg.name} not supported",
                ),
            )
            return True

        if msg.name in AUTO_SERVED:
            self._sleep()
            return self._auto_serve(msg, wfile)

        if self.scenario.strict:
            expected = step.on if step is not None else "<steps exhausted>"
            self._fail(f"unexpected request {msg.to_wire()}; expected {expected}")
            self._send(
                wfile,
                DapMessage.response_to(
                    msg, self._next_seq(), success=False, error_text="scenario violation"
                ),
            )
            return False
        self._send(wfile, DapMessage.response_to(msg, self._next_seq()))
        return True

    def _current_step(self) -> ScenarioStep | None:
        if self._step_index < len(self.scenario.steps):
            return self.scenario.steps[self._step_index]
        return None

    def _respond_step(self, msg: DapMessage, step: ScenarioStep, wfile: BinaryIO) -> None:
        self._sleep(int(step.respond.get("delay_ms", 0)))
        success = bool(step.respond.get("success", True))
        self._send(
            wfile,
            DapMessage.response_to(
                msg,
                self._next_seq(),
                success=success,
                body=step.respond.get("body", {}),
                error_text=step.respond.get("message") if not success else None,
            ),
        )
        for event in step.then_emit:
            self._sleep(int(event.get("delay_ms", 0)))
            if event["event"] == "stopped":
                self._stop_index += 1
            self._send(
                wfile, DapMessage.event(self._next_seq(), event["event"], event.get("body", {}))
            )

    def _fail(self, detail: str) -> None:
        if self.transcript.failure is None:
            self.transcript.failure = detail

    # -- default servers for inspection requests -------------------------

    def _auto_serve(self, msg: DapMessage, wfile: BinaryIO) -> bool:
        handler = getattr(self, f"_serve_{msg.name}", None)
        if handler is None:
            self._send(wfile, DapMessage.response_to(msg, self._next_seq()))
            return True
        return handler(msg, wfile)

    def _current_stack(self) -> list[FrameSpec] | None:
        if 0 <= self._stop_index < len(self.scenario.stacks):
            return self.scenario.stacks[self._stop_index]
        return None

    def _serve_initialize(self, msg: DapMessage, wfile: BinaryIO) -> bool:
        self._send(
            wfile,
            DapMessage.response_to(msg, self._next_seq(), body=dict(self.scenario.capabilities)),
        )
        return True

    def _serve_stackTrace(self, msg: DapMessage, wfile: BinaryIO) -> bool:
        stack = self._current_stack()
        if stack is None:
            self._send(
                wfile,
                DapMessage.response_to(
                    msg, self._next_seq(), success=False, error_text="no stack snapshot"
                ),
            )
            return True
        frames = [
            {
                "id": f.id,
                "name": f.name,
                "source": {"path": f.path},
                "line": f.line,
                "column": 1,
            }
            for f in stack
        ]
        self._send(
            wfile,
            DapMessage.response_to(
                msg,
                self._next_seq(),
                body={"stackFrames": frames, "totalFrames": len(frames)},
            ),
        )
        return True

    def _serve_scopes(self, msg: DapMessage, wfile: BinaryIO) -> bool:
        frame_id = int(msg.payload.get("frameId", 0))
        body = {
            "scopes": [
                {
                    "name": "Locals",
                    "variablesReference": frame_id * 1000 + 1,
                    "expensive": False,
                }
            ]
        }
        self._send(wfile, DapMessage.response_to(msg, self._next_seq(), body=body))
        return True

    def _serve_variables(self, msg: DapMessage, wfile: BinaryIO) -> bool:
        ref = int(msg.payload.get("variablesReference", 0))
        frame_id = (ref - 1) // 1000
        prefix = f"{frame_id}:"
        named = [
            {"name": key[len(prefix):], "value": value, "variablesReference": 0}
            for key, value in sorted(self.scenario.variables.items())
            if key.startswith(prefix)
        ]
        self._send(
            wfile, DapMessage.response_to(msg, self._next_seq(), body={"variables": named})
        )
        return True

    def _serve_evaluate(self, msg: DapMessage, wfile: BinaryIO) -> bool:
        frame_id = msg.payload.get("frameId")
        expression = msg.payload.get("expression", "")
        value = self.scenario.variables.get(f"{frame_id}:{expression}")
        if value is None:
            self._send(
                wfile,
                DapMessage.response_to(
                    msg,
                    self._next_seq(),
                    success=False,
                    error_text=f"cannot evaluate {expression!r}",
                ),
            )
            return True
        self._send(
            wfile,
            DapMessage.response_to(
                msg, self._next_seq(), body={"result": value, "variablesReference": 0}
            ),
        )
        return True

    def _serve_setVariable(self, msg: DapMessage, wfile: BinaryIO) -> bool:
        self._send(
            wfile,
            DapMessage.response_to(
                msg, self._next_seq(), body={"value": msg.payload.get("value", "")}
            ),
        )
        return True

    def _serve_setExpression(self, msg: DapMessage, wfile: BinaryIO) -> bool:
        self._send(
            wfile,
            DapMessage.response_to(
                msg, self._next_seq(), body={"value": msg.payload.get("value", "")}
            ),
        )
        return True

    def _serve_setBreakpoints(self, msg: DapMessage, wfile: BinaryIO) -> bool:
        requested = msg.payload.get("breakpoints", [])
        body = {
            "breakpoints": [
                {"verified": True, "line": bp.get("line")} for bp in requested
            ]
        }
        self._send(wfile, DapMessage.response_to(msg, self._next_seq(), body=body))
        return True

    def _serve_threads(self, msg: DapMessage, wfile: BinaryIO) -> bool:
        self._send(
            wfile,
            DapMessage.response_to(
                msg, self._next_seq(), body={"threads": [{"id": 1, "name": "main"}]}
            ),
        )
        return True

    def _serve_disconnect(self, msg: DapMessage, wfile: BinaryIO) -> bool:
        self._send(wfile, DapMessage.response_to(msg, self._next_seq()))
        return False


def run_scenario(scenario: Scenario, rfile: BinaryIO, wfile: BinaryIO) -> Transcript:
    """Serve one scripted connection over the given byte streams."""
    server = MockDapServer(scenario)
    transcript = server.serve(rfile, wfile)
    if transcript.failure is not None and scenario.strict:
        raise ScenarioError(transcript.failure)
    return transcript


class InProcessMock:
    """Mock adapter attached over OS pipes, served from a daemon thread."""

    def __init__(self, scenario: Scenario) -> None:
        to_mock_r, to_mock_w = os.pipe()
        from_mock_r, from_mock_w = os.pipe()
        self.server = MockDapServer(scenario)
        self._mock_rfile = os.fdopen(to_mock_r, "rb")
        self._mock_wfile = os.fdopen(from_mock_w, "wb")
        # Agent-facing endpoints: read what the mock writes, write what it reads.
        self.reader = os.fdopen(from_mock_r, "rb")
        self.writer = os.fdopen(to_mock_w, "wb")
        self.thread = threading.Thread(target=self._serve, daemon=True)
        self.thread.start()

    def _serve(self) -> None:
        self.server.serve(self._mock_rfile, self._mock_wfile)
        for stream in (self._mock_rfile, self._mock_wfile):
            try:
                stream.close()
            except OSError:
                pass

    @property
    def transcript(self) -> Transcript:
        return self.server.transcript

    def close(self) -> None:
        for stream in (self.writer, self.reader):
            try:
                stream.close()
            except OSError:
                pass
        self.thread.join(timeout=2.0)


def start_inprocess(scenario: Scenario) -> InProcessMock:
    return InProcessMock(scenario)
