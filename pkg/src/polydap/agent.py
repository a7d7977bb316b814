"""Per-language debug agent.

An agent owns one child DAP adapter running one runner program. It drives
the runner through its three control breakpoints: executing a program file
means writing the input variable at the current standby frame and resuming;
an outgoing cross-language call shows up as a stop on the polyglot
breakpoint; completing a call means writing the return slot, emptying the
input variable and resuming.
"""

from __future__ import annotations

import logging
import time
from collections import deque
from dataclasses import dataclass
from enum import Enum
from pathlib import Path
from typing import Any, Callable

from .config import AgentConfig, canonical_path
from .errors import (
    AgentDead,
    AgentStateError,
    CapabilityError,
    ClassificationError,
    InputError,
    ProtocolError,
    StartupTimeout,
)
from .transport import StreamClosed, spawn_adapter
from .values import ValueConverter, ValueEnvelope, ValueKind
from .wire import Correlator, DapMessage, MessageKind

log = logging.getLogger(__name__)

# Named source transforms applied to target files before execution.
# Identity by default; compiled-language agents would register compilers here.
SOURCE_PREPROCESSORS: dict[str, Callable[[str], str]] = {}


class AgentPhase(Enum):
    NEW = "new"
    STARTING = "starting"
    STANDBY = "standby"
    RUNNING = "running"
    PAUSED_AT_POLYGLOT_CALL = "paused-at-polyglot-call"
    PAUSED_AT_USER = "paused-at-user"
    TERMINATED = "terminated"


@dataclass(frozen=True)
class PolyglotCallSite:
    """Arguments of one outgoing cross-language call, read off the debuggee."""

    target_language: str
    target_code: str
    caller_location: tuple[str, int]
    thread_id: int

    def __post_init__(self) -> None:
        if not self.target_language:
            raise InputError("polyglot call with empty target language")
        if not self.target_code:
            raise InputError("polyglot call with empty target code")


@dataclass(frozen=True)
class AgentState:
    phase: AgentPhase
    depth: int
    pending_call: PolyglotCallSite | None = None
    location: tuple[str, int] | None = None
    reason: str | None = None


class StopCategory(Enum):
    STANDBY_OUTER = "standby-outer"
    STANDBY_INNER = "standby-inner"
    POLYGLOT_CALL = "polyglot-call"
    USER_BREAKPOINT = "user-breakpoint"
    STEP = "step"
    EXCEPTION = "exception"
    EXITED = "exited"


@dataclass(frozen=True)
class StopKind:
    """Total classification of one stop."""

    category: StopCategory
    site: PolyglotCallSite | None = None
    location: tuple[str, int] | None = None
    text: str | None = None
    exit_code: int | None = None

    @classmethod
    def standby_outer(cls) -> StopKind:
        return cls(StopCategory.STANDBY_OUTER)

    @classmethod
    def standby_inner(cls) -> StopKind:
        return cls(StopCategory.STANDBY_INNER)

    @classmethod
    def polyglot_call(cls, site: PolyglotCallSite) -> StopKind:
        return cls(StopCategory.POLYGLOT_CALL, site=site)

    @classmethod
    def user_breakpoint(cls, location: tuple[str, int]) -> StopKind:
        return cls(StopCategory.USER_BREAKPOINT, location=location)

    @classmethod
    def step(cls, location: tuple[str, int]) -> StopKind:
        return cls(StopCategory.STEP, location=location)

    @classmethod
    def exception(cls, location: tuple[str, int], text: str) -> StopKind:
        return cls(StopCategory.EXCEPTION, location=location, text=text)

    @classmethod
    def exited(cls, code: int) -> StopKind:
        return cls(StopCategory.EXITED, exit_code=code)


@dataclass(frozen=True)
class Frame:
    id: int
    name: str
    path: str | None
    line: int
    column: int = 1


_INITIALIZE_ARGS = {
    "adapterID": "polydap-child",
    "pathFormat": "path",
    "linesStartAt1": True,
    "columnsStartAt1": True,
    "supportsRunInTerminalRequest": False,
}


class DebugAgent:
    """Synchronous controller for one child adapter + runner pair.

    All methods must be called from a single logical control thread; the
    only concurrency is the transport's reader thread, which merely queues
    inbound messages.
    """

    def __init__(
        self,
        config: AgentConfig,
        converter: ValueConverter | None = None,
        event_sink: Callable[[DebugAgent, DapMessage], None] | None = None,
    ) -> None:
        self.config = config
        self.language_id = config.language_id
        self.converter = converter or ValueConverter()
        if config.value_table is not None:
            self.converter.register(config.language_id, config.value_table)
        self.event_sink = event_sink
        self.spawn_count = 0

        self._timeout = config.request_timeout_s
        self._transport = None
        self._stream = None
        self._correlator = Correlator()
        self._event_backlog: deque[DapMessage] = deque()
        self._launch_seq: int | None = None
        self._capabilities: dict[str, Any] = {}
        self._evaluate_refused = False

        self._phase = AgentPhase.NEW
        self._depth = 0
        self._pending_calls: list[PolyglotCallSite] = []
        self._thread_id = 1
        self._frames: list[Frame] = []
        self._scope_refs: dict[int, int] = {}
        self._last_reason: str | None = None
        self._user_breakpoints: dict[str, tuple[int, ...]] = {}

        contract = config.runner
        self._runner_files = contract.runner_files()
        self._polyglot_loc = (canonical_path(contract.polyglot_bp[0]), contract.polyglot_bp[1])
        self._outer_loc = (
            canonical_path(contract.outer_standby_bp[0]),
            contract.outer_standby_bp[1],
        )
        self._inner_loc = (
            canonical_path(contract.inner_standby_bp[0]),
            contract.inner_standby_bp[1],
        )

    # -- state ------------------------------------------------------------

    @property
    def state(self) -> AgentState:
        return AgentState(
            phase=self._phase,
            depth=self._depth,
            pending_call=self._pending_calls[-1] if self._pending_calls else None,
            location=(self._frames[0].path, self._frames[0].line)
            if self._frames and self._frames[0].path
            else None,
            reason=self._last_reason,
        )

    @property
    def depth(self) -> int:
        return self._depth

    @property
    def phase(self) -> AgentPhase:
        return self._phase

    @property
    def capabilities(self) -> dict[str, Any]:
        return dict(self._capabilities)

    def owns_source(self, path: str) -> bool:
        return any(path.endswith(ext) for ext in self.config.file_extensions)

    # -- lifecycle ---------------------------------------------------------

    def start(self) -> None:
        """Spawn the child adapter and run the runner to its first standby."""
        if self._phase is not AgentPhase.NEW:
            raise AgentStateError(f"{self.language_id}: already started")
        runner_path = Path(self.config.runner.runner_path)
        if not runner_path.is_file():
            raise InputError(f"runner file missing: {runner_path}")

        self._phase = AgentPhase.STARTING
        self._transport = spawn_adapter(
            list(self.config.adapter_command),
            self.config.transport,
            label=f"agent-{self.language_id}",
        )
        self.spawn_count += 1
        self._stream = self._transport.stream

        deadline = time.monotonic() + self._timeout
        resp = self._request("initialize", dict(_INITIALIZE_ARGS), deadline=deadline)
        if not resp.success:
            raise CapabilityError("initialize", resp.error_text or "rejected")
        self._capabilities = resp.payload or {}

        launch_args = {"program": str(runner_path)}
        launch_args.update(self.config.launch_args)
        self._launch_seq = self._send("launch", launch_args)
        self._await_event("initialized", deadline)

        for file, lines in self.config.runner.breakpoint_lines().items():
            self._set_breakpoints(file, lines, deadline=deadline)
        resp = self._request("configurationDone", {}, deadline=deadline)
        if not resp.success:
            raise CapabilityError("configurationDone", resp.error_text or "rejected")

        # Run until the outer standby line; tolerate entry or other stops.
        while True:
            event = self._next_stop(deadline, startup=True)
            kind = self.classify_stop(event)
            if kind.category is StopCategory.STANDBY_OUTER:
                break
            if kind.category is StopCategory.EXITED:
                raise AgentDead(f"{self.language_id}: adapter exited during startup")
            self._request_ok("continue", {"threadId": self._thread_id}, "continue")
        log.info("%s: agent standing by", self.language_id)

    def shutdown(self) -> None:
        """Idempotent: disconnect politely, then terminate within the grace period."""
        if self._phase is AgentPhase.TERMINATED:
            return
        if self._stream is not None:
            try:
                self._request("disconnect", {}, deadline=time.monotonic() + 2.0)
            except (AgentDead, ProtocolError, StartupTimeout):
                pass
        self._phase = AgentPhase.TERMINATED
        if self._transport is not None:
            self._transport.terminate()

    # -- spec operations ----------------------------------------------------

    def execute(self, program: str, user_breakpoints: list[tuple[str, int]]) -> None:
        """Run a program file as the next unit of work at the current standby."""
        if self._phase not in (AgentPhase.STANDBY, AgentPhase.PAUSED_AT_POLYGLOT_CALL):
            raise AgentStateError(
                f"{self.language_id}: execute requires standby or a paused polyglot call, "
                f"agent is {self._phase.value}"
            )
        path = Path(program)
        if not path.is_file():
            raise InputError(f"program file missing: {program}")
        target = canonical_path(path)
        if self.config.source_preprocessor:
            try:
                transform = SOURCE_PREPROCESSORS[self.config.source_preprocessor]
            except KeyError:
                raise InputError(
                    f"unknown source preprocessor {self.config.source_preprocessor!r}"
                ) from None
            target = transform(target)

        self.install_breakpoints(user_breakpoints)
        literal = self.converter.render_value(
            self.language_id, ValueEnvelope.of_str(target)
        )
        self._write_variable(self._top_frame().id, self.config.runner.var_input, literal)
        self._request_ok("continue", {"threadId": self._thread_id}, "continue")
        self._depth += 1
        self._phase = AgentPhase.RUNNING

    def classify_stop(self, stopped_event: DapMessage) -> StopKind:
        """Map a stopped event to a StopKind via the top stack frame."""
        if stopped_event.kind is MessageKind.EVENT and stopped_event.name == "exited":
            self._phase = AgentPhase.TERMINATED
            return StopKind.exited(int(stopped_event.payload.get("exitCode", 0)))
        if stopped_event.name != "stopped":
            raise ProtocolError(f"cannot classify event {stopped_event.name!r}")
        self._thread_id = int(stopped_event.payload.get("threadId", self._thread_id))
        self._last_reason = stopped_event.payload.get("reason")

        self._frames = self._stack_trace(self._thread_id)
        self._scope_refs.clear()
        if not self._frames:
            self._quarantine("stopped with an empty stack")
        top = self._frames[0]
        if top.path is None:
            self._quarantine("top frame has no readable source")
        location = (canonical_path(top.path), top.line)

        if location == self._polyglot_loc:
            # Enter the paused state before reading arguments: even if they
            # are invalid, the coordinator must be able to resume this agent
            # by injecting an error result.
            self._phase = AgentPhase.PAUSED_AT_POLYGLOT_CALL
            site = self.read_polyglot_args()
            self._pending_calls.append(site)
            return StopKind.polyglot_call(site)
        if location == self._outer_loc:
            if self._depth > 0:
                self._depth -= 1
            self._phase = AgentPhase.STANDBY
            return StopKind.standby_outer()
        if location == self._inner_loc:
            if self._depth > 0:
                self._depth -= 1
            self._phase = (
                AgentPhase.PAUSED_AT_POLYGLOT_CALL
                if self._pending_calls
                else AgentPhase.STANDBY
            )
            return StopKind.standby_inner()

        reason = self._last_reason or ""
        if reason == "exception":
            text = stopped_event.payload.get("text") or stopped_event.payload.get(
                "description", ""
            )
            self._phase = AgentPhase.PAUSED_AT_USER
            return StopKind.exception(location, text)
        if reason == "breakpoint" or location in self._flat_breakpoints():
            self._phase = AgentPhase.PAUSED_AT_USER
            return StopKind.user_breakpoint(location)
        self._phase = AgentPhase.PAUSED_AT_USER
        return StopKind.step(location)

    def read_polyglot_args(self) -> PolyglotCallSite:
        """Read the call arguments in the polyglot function's frame."""
        top = self._top_frame()
        language = self._read_string(top.id, self.config.runner.param_language)
        code = self._read_string(top.id, self.config.runner.param_code)
        caller = self._frames[1] if len(self._frames) > 1 else self._frames[0]
        return PolyglotCallSite(
            target_language=language,
            target_code=code,
            caller_location=(caller.path or "<unknown>", caller.line),
            thread_id=self._thread_id,
        )

    def set_result(self, value: ValueEnvelope, resume_command: str = "continue") -> None:
        """Complete the innermost pending call: write ret, empty input, resume."""
        if self._phase is not AgentPhase.PAUSED_AT_POLYGLOT_CALL:
            raise AgentStateError(
                f"{self.language_id}: set_result requires a paused polyglot call, "
                f"agent is {self._phase.value}"
            )
        ret_literal = self.converter.render_value(self.language_id, value)
        empty_literal = self.converter.render_value(self.language_id, ValueEnvelope.of_str(""))
        frame_id = self._top_frame().id
        self._write_variable(frame_id, self.config.runner.var_ret, ret_literal)
        self._write_variable(frame_id, self.config.runner.var_input, empty_literal)
        self._request_ok(resume_command, {"threadId": self._thread_id}, resume_command)
        if self._pending_calls:
            self._pending_calls.pop()
        self._phase = AgentPhase.RUNNING

    def request_pause(self) -> DapMessage:
        """Ask the adapter to interrupt the running debuggee."""
        return self._request("pause", {"threadId": self._thread_id})

    def resume(self, command: str) -> DapMessage:
        """Client-driven resume (continue/next/stepIn/stepOut) passthrough."""
        if self._phase is not AgentPhase.PAUSED_AT_USER:
            raise AgentStateError(
                f"{self.language_id}: {command} requires a user-visible stop"
            )
        resp = self._request_ok(command, {"threadId": self._thread_id}, command)
        self._phase = AgentPhase.RUNNING
        return resp

    def read_result(self) -> ValueEnvelope:
        """Parse the result variable at the current standby frame."""
        if self._phase not in (AgentPhase.STANDBY, AgentPhase.PAUSED_AT_POLYGLOT_CALL):
            raise AgentStateError(f"{self.language_id}: no result at {self._phase.value}")
        raw = self._read_variable(self._top_frame().id, self.config.runner.var_result)
        return self.converter.parse_value(self.language_id, raw)

    def filtered_stacktrace(self, thread_id: int | None = None) -> list[Frame]:
        """Current stack with every runner-file frame removed."""
        frames = self._stack_trace(thread_id or self._thread_id)
        return [f for f in frames if not self._is_runner_frame(f)]

    def stack_segments(self, thread_id: int | None = None) -> list[list[Frame]]:
        """User frames grouped into contiguous segments.

        Runner frames separate the program units this agent is executing
        concurrently (an agent serving a call-back has the inner program's
        frames above the runner machinery and the outer program's below).
        Segment 0 is the innermost unit.
        """
        segments: list[list[Frame]] = []
        current: list[Frame] | None = None
        for frame in self._stack_trace(thread_id or self._thread_id):
            if self._is_runner_frame(frame):
                current = None
                continue
            if current is None:
                current = []
                segments.append(current)
            current.append(frame)
        return segments

    def _is_runner_frame(self, frame: Frame) -> bool:
        return frame.path is not None and canonical_path(frame.path) in self._runner_files

    def forward(self, request: DapMessage) -> DapMessage:
        """Pass an ordinary DAP request through to the child adapter."""
        if request.kind is not MessageKind.REQUEST:
            raise ProtocolError("only requests can be forwarded")
        if request.name in ("execute", "setResult"):
            raise ProtocolError(f"{request.name} must use its dedicated operation")
        return self._request(request.name, request.payload)

    def dispatch_request(self, request: DapMessage) -> DapMessage:
        """Agent-facing endpoint: extended requests plus plain passthrough.

        The extended surface mirrors the coordinator-to-agent contract:
        `execute` takes {path, breakpoints: [{path, line}]}, `setResult`
        takes {value, kind}.
        """
        if request.name == "execute":
            bps = [
                (bp["path"], int(bp["line"]))
                for bp in request.payload.get("breakpoints", [])
            ]
            self.execute(request.payload["path"], bps)
            return DapMessage.response_to(request, request.seq)
        if request.name == "setResult":
            value = envelope_from_fields(
                request.payload.get("kind", "str"), request.payload.get("value", "")
            )
            self.set_result(value)
            return DapMessage.response_to(request, request.seq)
        return self.forward(request)

    # -- breakpoints --------------------------------------------------------

    def install_breakpoints(self, breakpoints: list[tuple[str, int]]) -> None:
        """Install user breakpoints, re-sending each changed file in full."""
        grouped: dict[str, list[int]] = {}
        for path, line in breakpoints:
            grouped.setdefault(canonical_path(path), []).append(line)
        for file, lines in sorted(grouped.items()):
            want = tuple(sorted(set(lines)))
            if self._user_breakpoints.get(file) == want:
                continue
            self._set_breakpoints(file, list(want))
            self._user_breakpoints[file] = want

    def clear_breakpoints(self, path: str) -> None:
        file = canonical_path(path)
        if self._user_breakpoints.pop(file, None) is not None:
            self._set_breakpoints(file, [])

    def _set_breakpoints(self, file: str, lines: list[int], deadline: float | None = None) -> None:
        resp = self._request(
            "setBreakpoints",
            {
                "source": {"path": file},
                "breakpoints": [{"line": line} for line in lines],
            },
            deadline=deadline,
        )
        if not resp.success:
            raise CapabilityError("setBreakpoints", resp.error_text or "rejected")

    def _flat_breakpoints(self) -> set[tuple[str, int]]:
        return {
            (file, line)
            for file, lines in self._user_breakpoints.items()
            for line in lines
        }

    # -- events -------------------------------------------------------------

    def next_stop_event(self, timeout: float) -> DapMessage | None:
        """Next stopped/exited event, sinking every other event on the way."""
        deadline = time.monotonic() + timeout
        while True:
            event = self._pop_event(deadline)
            if event is None:
                return None
            if event.name in ("stopped", "exited"):
                return event
            self._sink(event)

    def _pop_event(self, deadline: float) -> DapMessage | None:
        if self._event_backlog:
            return self._event_backlog.popleft()
        stream = self._require_stream()
        while True:
            remaining = deadline - time.monotonic()
            if remaining <= 0:
                return None
            msg = stream.recv(timeout=remaining)
            if msg is None:
                return None
            if isinstance(msg, StreamClosed):
                self._phase = AgentPhase.TERMINATED
                raise AgentDead(f"{self.language_id}: {msg.reason}")
            if msg.kind is MessageKind.EVENT:
                return msg
            if msg.kind is MessageKind.RESPONSE:
                self._absorb_stray_response(msg)
                continue
            raise ProtocolError(f"unexpected {msg.kind.value} from adapter")

    def _await_event(self, name: str, deadline: float) -> DapMessage:
        for i, queued in enumerate(self._event_backlog):
            if queued.name == name:
                del self._event_backlog[i]
                return queued
        while True:
            event = self._pop_event(deadline)
            if event is None:
                raise StartupTimeout(f"{self.language_id}: no {name!r} event in time")
            if event.name == name:
                return event
            self._sink(event)

    def _sink(self, event: DapMessage) -> None:
        if self.event_sink is not None:
            self.event_sink(self, event)

    def _next_stop(self, deadline: float, startup: bool = False) -> DapMessage:
        while True:
            event = self._pop_event(deadline)
            if event is None:
                if startup:
                    raise StartupTimeout(f"{self.language_id}: no stop before the deadline")
                raise ProtocolError(f"{self.language_id}: stop wait timed out")
            if event.name in ("stopped", "exited"):
                return event
            self._sink(event)

    # -- request plumbing -----------------------------------------------------

    def _require_stream(self):
        if self._stream is None or self._phase is AgentPhase.TERMINATED:
            raise AgentDead(f"{self.language_id}: agent is not running")
        return self._stream

    def _send(self, command: str, arguments: dict[str, Any]) -> int:
        stream = self._require_stream()
        seq = stream.next_seq()
        self._correlator.sent(seq)
        stream.send(DapMessage.request(seq, command, arguments))
        return seq

    def _request(
        self, command: str, arguments: dict[str, Any], deadline: float | None = None
    ) -> DapMessage:
        """Send one request and wait for its response, buffering events."""
        seq = self._send(command, arguments)
        if deadline is None:
            deadline = time.monotonic() + self._timeout
        stream = self._require_stream()
        while True:
            remaining = deadline - time.monotonic()
            if remaining <= 0:
                raise ProtocolError(f"{self.language_id}: {command} timed out")
            msg = stream.recv(timeout=remaining)
            if msg is None:
                raise ProtocolError(f"{self.language_id}: {command} timed out")
            if isinstance(msg, StreamClosed):
                self._phase = AgentPhase.TERMINATED
                raise AgentDead(f"{self.language_id}: {msg.reason}")
            if msg.kind is MessageKind.EVENT:
                self._event_backlog.append(msg)
                continue
            if msg.kind is MessageKind.RESPONSE:
                matched = self._correlator.correlate(msg)
                if matched == seq:
                    return msg
                self._absorb_stray_response(msg, matched)
                continue
            raise ProtocolError(f"unexpected {msg.kind.value} from adapter")

    def _request_ok(self, command: str, arguments: dict[str, Any], name: str) -> DapMessage:
        resp = self._request(command, arguments)
        if not resp.success:
            raise CapabilityError(name, resp.error_text or "rejected")
        return resp

    def _absorb_stray_response(self, msg: DapMessage, matched: int | None = None) -> None:
        if matched is None:
            matched = self._correlator.correlate(msg)
        if matched == self._launch_seq:
            self._launch_seq = None
            if not msg.success:
                raise CapabilityError("launch", msg.error_text or "rejected")
            return
        raise ProtocolError(f"{self.language_id}: unsolicited response to seq {matched}")

    # -- frame/variable access --------------------------------------------

    def _top_frame(self) -> Frame:
        if not self._frames:
            raise AgentStateError(f"{self.language_id}: no current stop frame")
        return self._frames[0]

    def _stack_trace(self, thread_id: int) -> list[Frame]:
        resp = self._request("stackTrace", {"threadId": thread_id})
        if not resp.success:
            raise ProtocolError(
                f"{self.language_id}: stackTrace failed: {resp.error_text or 'rejected'}"
            )
        frames = []
        for raw in resp.payload.get("stackFrames", []):
            source = raw.get("source") or {}
            frames.append(
                Frame(
                    id=int(raw["id"]),
                    name=raw.get("name", "?"),
                    path=source.get("path"),
                    line=int(raw.get("line", 0)),
                    column=int(raw.get("column", 1)),
                )
            )
        return frames

    def _locals_ref(self, frame_id: int) -> int:
        ref = self._scope_refs.get(frame_id)
        if ref is not None:
            return ref
        resp = self._request("scopes", {"frameId": frame_id})
        if not resp.success:
            raise ProtocolError(f"{self.language_id}: scopes failed")
        scopes = resp.payload.get("scopes", [])
        if not scopes:
            raise ProtocolError(f"{self.language_id}: frame {frame_id} has no scopes")
        ref = int(scopes[0]["variablesReference"])
        self._scope_refs[frame_id] = ref
        return ref

    def _read_variable(self, frame_id: int, name: str) -> str:
        if not self._evaluate_refused:
            resp = self._request(
                "evaluate", {"expression": name, "frameId": frame_id, "context": "repl"}
            )
            if resp.success:
                return str(resp.payload.get("result", ""))
            self._evaluate_refused = True
            log.warning(
                "%s: evaluate refused, falling back to variables", self.language_id
            )
        ref = self._locals_ref(frame_id)
        resp = self._request("variables", {"variablesReference": ref})
        if not resp.success:
            raise ProtocolError(f"{self.language_id}: variables failed")
        for var in resp.payload.get("variables", []):
            if var.get("name") == name:
                return str(var.get("value", ""))
        raise ProtocolError(f"{self.language_id}: variable {name!r} not found in frame")

    def _read_string(self, frame_id: int, name: str) -> str:
        raw = self._read_variable(frame_id, name)
        return self.converter.parse_value(self.language_id, raw).lexical

    def _write_variable(self, frame_id: int, name: str, literal: str) -> None:
        if self._capabilities.get("supportsSetExpression"):
            self._request_ok(
                "setExpression",
                {"expression": name, "value": literal, "frameId": frame_id},
                "setExpression",
            )
        else:
            ref = self._locals_ref(frame_id)
            self._request_ok(
                "setVariable",
                {"variablesReference": ref, "name": name, "value": literal},
                "setVariable",
            )

    def _quarantine(self, reason: str) -> None:
        self._phase = AgentPhase.TERMINATED
        raise ClassificationError(f"{self.language_id}: {reason}")


def envelope_from_fields(kind: str, lexical: str) -> ValueEnvelope:
    """Rebuild an envelope from its wire fields (extended setResult request)."""
    value_kind = ValueKind(kind)
    if value_kind is ValueKind.INT:
        return ValueEnvelope.of_int(int(lexical))
    if value_kind is ValueKind.FLOAT:
        return ValueEnvelope.of_float(float(lexical))
    return ValueEnvelope(value_kind, lexical, lossy=value_kind is ValueKind.OPAQUE)
