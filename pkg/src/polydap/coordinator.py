"""Language-agnostic session coordinator.

Re-exposes a single debug endpoint while routing work to per-language
agents. Cross-language calls are synchronous: the caller agent stays paused
on its polyglot breakpoint while the callee runs to a standby; a
coordinator-level call stack records who is owed a result.

The coordinator never branches on a concrete language: agents are reached
only through registry lookups keyed by file extension or language id.
"""

from __future__ import annotations

import logging
import os
import time
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import Any, Callable

from .agent import AgentPhase, DebugAgent, PolyglotCallSite, StopCategory, StopKind
from .config import AgentConfig, SessionConfig, SessionDefaults, canonical_path
from .errors import (
    AgentDead,
    AgentStateError,
    CapabilityError,
    ClassificationError,
    InputError,
    InvalidFrame,
    PolydapError,
    ProtocolError,
    RegistrationError,
    StartupTimeout,
    UnknownLanguage,
)
from .values import ValueConverter, ValueEnvelope, ValueKind
from .wire import DapMessage

log = logging.getLogger(__name__)

EventSink = Callable[[str, dict], None]

# Events from child adapters that are forwarded to the client verbatim.
_FORWARDED_EVENTS = frozenset({"output"})


class SessionPhase(Enum):
    IDLE = "idle"
    RUNNING = "running"
    STOPPED = "stopped"
    TERMINATED = "terminated"


@dataclass(frozen=True)
class PolyglotCallFrame:
    """A suspended caller awaiting a callee's result."""

    caller_language: str
    caller_agent: str
    call_site: PolyglotCallSite
    depth_at_call: int


@dataclass
class ComposedFrame:
    """One client-visible stack frame, possibly a synthetic boundary."""

    id: int
    name: str
    path: str | None
    line: int
    column: int = 1
    agent_id: str | None = None
    adapter_frame_id: int | None = None
    boundary: bool = False


@dataclass
class _Language:
    config: AgentConfig
    agent: DebugAgent | None = None


class AgentRegistry:
    """Maps language ids and file extensions to agent configurations."""

    def __init__(self) -> None:
        self.entries: dict[str, _Language] = {}
        self.extension_index: dict[str, str] = {}

    def register(self, config: AgentConfig) -> None:
        if config.language_id in self.entries:
            raise RegistrationError(f"language {config.language_id!r} already registered")
        for ext in config.file_extensions:
            claimed = self.extension_index.get(ext)
            if claimed is not None:
                raise RegistrationError(
                    f"extension {ext!r} already claimed by {claimed!r}"
                )
        self.entries[config.language_id] = _Language(config)
        for ext in config.file_extensions:
            self.extension_index[ext] = config.language_id

    def language_for(self, token: str) -> str:
        """Resolve a path, a language id, or a bare extension token.

        Call sites may name a language by its short id (e.g. "js"); when no
        registered id matches, the token is tried as an extension.
        """
        if token in self.entries:
            return token
        ext = os.path.splitext(token)[1]
        if ext and ext in self.extension_index:
            return self.extension_index[ext]
        if token and "." not in token and f".{token}" in self.extension_index:
            return self.extension_index[f".{token}"]
        raise UnknownLanguage(ext.lstrip(".") if ext else token)


@dataclass
class RouteResult:
    """Response body for a routed client request, plus a pump hint."""

    body: dict[str, Any] = field(default_factory=dict)
    pump: bool = False


class Coordinator:
    """Owns session state; all methods run on one logical control thread."""

    def __init__(
        self,
        configs: SessionConfig | list[AgentConfig] | None = None,
        *,
        defaults: SessionDefaults | None = None,
        event_sink: EventSink | None = None,
        agent_factory: Callable[..., DebugAgent] = DebugAgent,
        working_dir: str | None = None,
    ) -> None:
        if isinstance(configs, SessionConfig):
            defaults = defaults or configs.defaults
            configs = list(configs.languages)
        self.defaults = defaults or SessionDefaults()
        self.registry = AgentRegistry()
        self.converter = ValueConverter()
        self.event_sink: EventSink = event_sink or (lambda name, body: None)
        self.working_dir = working_dir or os.getcwd()
        self._agent_factory = agent_factory

        self.phase = SessionPhase.IDLE
        self.active_id: str | None = None
        self.call_stack: list[PolyglotCallFrame] = []
        self.client_breakpoints: dict[str, set[int]] = {}
        self.final_value: ValueEnvelope | None = None
        self.push_count = 0
        self.pop_count = 0
        self.depth_trace: list[int] = []

        self._pending_step: tuple[str, str] | None = None  # (mode, agent id)
        self._boundary_watch: tuple[str, str] | None = None  # (agent id, target path)
        self._composed: list[ComposedFrame] | None = None
        self._frame_map: dict[int, tuple[str, int]] = {}
        self._ref_map: dict[int, tuple[str, int]] = {}
        self._ref_rev: dict[tuple[str, int], int] = {}
        self._next_frame_id = 0
        self._next_ref = 0

        for config in configs or []:
            self.register_agent(config)

    # -- registry ------------------------------------------------------------

    def register_agent(self, config: AgentConfig) -> None:
        self.registry.register(config)
        if self.defaults.eager_start:
            self._agent(config.language_id)

    def resolve_agent(self, token: str) -> DebugAgent:
        return self._agent(self.registry.language_for(token))

    def _agent(self, language_id: str) -> DebugAgent:
        entry = self.registry.entries[language_id]
        if entry.agent is None:
            agent = self._agent_factory(
                entry.config, converter=self.converter, event_sink=self._on_agent_event
            )
            agent.start()
            entry.agent = agent
            log.info("started agent %s", language_id)
        return entry.agent

    def _started_agents(self) -> list[DebugAgent]:
        return [e.agent for e in self.registry.entries.values() if e.agent is not None]

    def _on_agent_event(self, agent: DebugAgent, event: DapMessage) -> None:
        if event.name in _FORWARDED_EVENTS:
            self.event_sink(event.name, event.payload)
        else:
            log.debug("agent %s event %s ignored", agent.language_id, event.name)

    # -- session lifecycle -----------------------------------------------------

    def launch_session(self, entry: str) -> None:
        if self.phase is not SessionPhase.IDLE:
            raise AgentStateError(f"cannot launch while session is {self.phase.value}")
        entry_path = Path(entry)
        if not entry_path.is_file():
            raise InputError(f"entry file missing: {entry}")
        agent = self.resolve_agent(str(entry_path))
        agent.execute(canonical_path(entry_path), self._breakpoint_share(agent))
        self.active_id = agent.language_id
        self.phase = SessionPhase.RUNNING
        self._invalidate_views()

    def reset_session(self) -> None:
        """Return a terminated session to idle, keeping agents warm."""
        if self.phase not in (SessionPhase.TERMINATED, SessionPhase.IDLE):
            raise AgentStateError(f"cannot reset while session is {self.phase.value}")
        self.phase = SessionPhase.IDLE
        self.call_stack.clear()
        self.final_value = None
        self.active_id = None
        self._pending_step = None
        self._boundary_watch = None
        self._invalidate_views()

    def shutdown(self) -> None:
        for agent in self._started_agents():
            agent.shutdown()
        self.phase = SessionPhase.TERMINATED

    # -- orchestration -----------------------------------------------------------

    def pump(self, poll: Callable[[], None] | None = None, timeout_s: float | None = None) -> None:
        """Drive the session until it stops, terminates, or times out."""
        deadline = None if timeout_s is None else time.monotonic() + timeout_s
        while self.phase is SessionPhase.RUNNING:
            if deadline is not None and time.monotonic() > deadline:
                raise ProtocolError("session pump timed out")
            agent = self._active()
            try:
                event = agent.next_stop_event(0.05)
            except AgentDead as exc:
                self._fail_session(str(exc))
                return
            if event is not None:
                try:
                    kind = agent.classify_stop(event)
                except InputError as exc:
                    # Bad polyglot-call arguments: resume the caller with an
                    # in-band error value; the session survives.
                    agent.set_result(ValueEnvelope.error(str(exc)))
                    continue
                except (ClassificationError, ProtocolError, AgentDead) as exc:
                    self._fail_session(str(exc))
                    return
                self.on_agent_stop(agent, kind)
            if poll is not None and self.phase is SessionPhase.RUNNING:
                poll()

    def on_agent_stop(self, agent: DebugAgent, kind: StopKind) -> None:
        if agent.language_id != self.active_id:
            raise AgentStateError(
                f"stop from {agent.language_id} but active agent is {self.active_id}"
            )
        if kind.category is StopCategory.POLYGLOT_CALL:
            assert kind.site is not None
            self._handle_polyglot_call(agent, kind.site)
        elif kind.category in (StopCategory.STANDBY_OUTER, StopCategory.STANDBY_INNER):
            self._handle_standby(agent)
        elif kind.category is StopCategory.EXITED:
            self._fail_session(
                f"agent {agent.language_id} exited mid-session (code {kind.exit_code})"
            )
        else:
            self._handle_user_stop(agent, kind)

    def _handle_polyglot_call(self, caller: DebugAgent, site: PolyglotCallSite) -> None:
        if len(self.call_stack) >= self.defaults.max_call_depth:
            log.warning(
                "polyglot call depth cap (%d) hit; aborting innermost call",
                self.defaults.max_call_depth,
            )
            caller.set_result(
                ValueEnvelope.error(
                    f"polyglot call depth exceeds limit of {self.defaults.max_call_depth}"
                )
            )
            return
        try:
            callee_language = self.registry.language_for(site.target_language)
            callee = self._agent(callee_language)
            target = self._resolve_target_code(site)
        except (UnknownLanguage, InputError, AgentDead, CapabilityError, StartupTimeout) as exc:
            caller.set_result(ValueEnvelope.error(f"polyglot call failed: {exc}"))
            return

        self.call_stack.append(
            PolyglotCallFrame(
                caller_language=caller.language_id,
                caller_agent=caller.language_id,
                call_site=site,
                depth_at_call=caller.depth,
            )
        )
        self.push_count += 1
        self.depth_trace.append(len(self.call_stack))

        breakpoints = self._breakpoint_share(callee)
        if self._pending_step and self._pending_step == ("stepIn", caller.language_id):
            # Step-into across the boundary: arrange a stop at the callee's
            # first line, surfaced to the client as a step.
            breakpoints = breakpoints + [(target, 1)]
            self._boundary_watch = (callee.language_id, canonical_path(target))
        callee.execute(target, breakpoints)
        self.active_id = callee.language_id

    def _handle_standby(self, agent: DebugAgent) -> None:
        value = agent.read_result()
        if not self.call_stack:
            self.final_value = value
            self.event_sink(
                "output", {"category": "console", "output": value.lexical + "\n"}
            )
            self.event_sink("exited", {"exitCode": 0})
            self.event_sink("terminated", {})
            self.phase = SessionPhase.TERMINATED
            return

        frame = self.call_stack.pop()
        self.pop_count += 1
        self.depth_trace.append(len(self.call_stack))
        caller = self._agent(frame.caller_agent)
        value = self._convert_for(value, agent.language_id, frame.caller_language)
        resume = "continue"
        if self._pending_step and self._pending_step[1] == frame.caller_agent:
            # A step interrupted by the call: land just after it returns.
            resume = "stepOut"
            self._boundary_watch = None
        caller.set_result(value, resume_command=resume)
        self.active_id = frame.caller_agent

    def _handle_user_stop(self, agent: DebugAgent, kind: StopKind) -> None:
        reason = {
            StopCategory.USER_BREAKPOINT: "breakpoint",
            StopCategory.STEP: "step",
            StopCategory.EXCEPTION: "exception",
        }[kind.category]
        if kind.category is StopCategory.STEP and agent.state.reason in ("pause", "entry"):
            reason = agent.state.reason
        if (
            self._boundary_watch is not None
            and self._boundary_watch[0] == agent.language_id
            and kind.location is not None
            and kind.location == (self._boundary_watch[1], 1)
        ):
            reason = "step"
            self._drop_temp_breakpoint(agent, self._boundary_watch[1])
        self._pending_step = None
        self._boundary_watch = None
        self.phase = SessionPhase.STOPPED
        self._invalidate_views()
        body: dict[str, Any] = {"reason": reason, "threadId": 1, "allThreadsStopped": True}
        if kind.text:
            body["text"] = kind.text
        self.event_sink("stopped", body)

    def _drop_temp_breakpoint(self, agent: DebugAgent, file: str) -> None:
        """Restore the file's breakpoints to the client-requested set."""
        lines = sorted(self.client_breakpoints.get(file, ()))
        if lines:
            agent.install_breakpoints([(file, line) for line in lines])
        else:
            agent.clear_breakpoints(file)

    def _fail_session(self, detail: str) -> None:
        log.error("session failed: %s", detail)
        self.event_sink("output", {"category": "stderr", "output": detail + "\n"})
        self.event_sink("terminated", {})
        self.phase = SessionPhase.TERMINATED

    def _convert_for(
        self, value: ValueEnvelope, source_language: str, target_language: str
    ) -> ValueEnvelope:
        if value.kind is ValueKind.OPAQUE and source_language != target_language:
            return ValueEnvelope.error(
                f"value {value.lexical!r} has no cross-language representation"
            )
        return value

    def _resolve_target_code(self, site: PolyglotCallSite) -> str:
        target = Path(site.target_code)
        if target.is_absolute():
            if target.is_file():
                return canonical_path(target)
            raise InputError(f"polyglot target missing: {site.target_code}")
        caller_dir = Path(site.caller_location[0]).parent
        for base in (caller_dir, Path(self.working_dir)):
            candidate = base / target
            if candidate.is_file():
                return canonical_path(candidate)
        raise InputError(f"polyglot target missing: {site.target_code}")

    def _breakpoint_share(self, agent: DebugAgent) -> list[tuple[str, int]]:
        return [
            (path, line)
            for path, lines in sorted(self.client_breakpoints.items())
            if agent.owns_source(path)
            for line in sorted(lines)
        ]

    def _active(self) -> DebugAgent:
        if self.active_id is None:
            raise AgentStateError("no active agent")
        return self._agent(self.active_id)

    # -- client request routing --------------------------------------------------

    def route_client_request(self, req: DapMessage) -> RouteResult:
        command = req.name
        if command == "setBreakpoints":
            return RouteResult(self._route_set_breakpoints(req.payload))
        if command in ("continue", "next", "stepIn", "stepOut"):
            return self._route_resume(command)
        if command == "stackTrace":
            return RouteResult(self._stacktrace_body())
        if command == "threads":
            return RouteResult({"threads": [{"id": 1, "name": "main"}]})
        if command == "pause":
            return RouteResult(self.pause())
        if command in ("scopes", "evaluate", "setExpression"):
            return RouteResult(self._route_by_frame(req))
        if command in ("variables", "setVariable"):
            return RouteResult(self._route_by_ref(req))
        agent = self._active()
        resp = agent.forward(DapMessage.request(req.seq, command, req.payload))
        if not resp.success:
            raise ProtocolError(resp.error_text or f"{command} rejected")
        return RouteResult(resp.payload)

    def _route_set_breakpoints(self, args: dict[str, Any]) -> dict[str, Any]:
        source = args.get("source") or {}
        path = source.get("path")
        if not path:
            raise InputError("setBreakpoints without a source path")
        lines = [int(bp["line"]) for bp in args.get("breakpoints", [])]
        return self.set_client_breakpoints(path, lines)

    def set_client_breakpoints(self, path: str, lines: list[int]) -> dict[str, Any]:
        """Record client breakpoints and forward them to the owning agent."""
        file = canonical_path(path)
        self.client_breakpoints[file] = set(lines)
        verified = True
        try:
            language = self.registry.language_for(file)
        except UnknownLanguage:
            language = None
            verified = False
        if language is not None:
            entry = self.registry.entries[language]
            if entry.agent is not None:
                if lines:
                    entry.agent.install_breakpoints([(file, line) for line in lines])
                else:
                    entry.agent.clear_breakpoints(file)
        return {
            "breakpoints": [{"verified": verified, "line": line} for line in lines]
        }

    def pause(self) -> dict[str, Any]:
        """Forward a pause to the active agent; its stop arrives via pump."""
        resp = self._active().request_pause()
        if not resp.success:
            raise ProtocolError(resp.error_text or "pause rejected")
        return resp.payload

    def _route_resume(self, command: str) -> RouteResult:
        if self.phase is not SessionPhase.STOPPED:
            raise AgentStateError(f"{command} requires a stopped session")
        agent = self._active()
        if command != "continue":
            self._pending_step = (command, agent.language_id)
        resp = agent.resume(command)
        self.phase = SessionPhase.RUNNING
        self._invalidate_views()
        body = dict(resp.payload)
        if command == "continue":
            body.setdefault("allThreadsContinued", True)
        return RouteResult(body, pump=True)

    # -- composed stack ------------------------------------------------------------

    def composed_stacktrace(self) -> list[ComposedFrame]:
        """Client-visible stack: active frames, then one boundary per call.

        Each entry on the polyglot call stack contributes a synthetic
        boundary frame at its call site followed by the caller's user frames
        below that site. An agent may appear several times (call-backs), so
        each appearance consumes the agent's next stack segment.
        """
        if self.phase is not SessionPhase.STOPPED:
            return []
        if self._composed is not None:
            return self._composed

        segment_cache: dict[str, list[list[Any]]] = {}
        cursors: dict[str, int] = {}

        def next_segment(agent_id: str) -> list[Any]:
            if agent_id not in segment_cache:
                segment_cache[agent_id] = self._agent(agent_id).stack_segments()
            index = cursors.get(agent_id, 0)
            cursors[agent_id] = index + 1
            segments = segment_cache[agent_id]
            return segments[index] if index < len(segments) else []

        frames: list[ComposedFrame] = []
        active = self._active()
        for f in next_segment(active.language_id):
            frames.append(self._real_frame(active.language_id, f))
        for call in reversed(self.call_stack):
            try:
                segment = next_segment(call.caller_agent)
            except (ProtocolError, AgentDead) as exc:
                frames.append(
                    ComposedFrame(
                        id=self._new_frame_id(),
                        name=f"<stack unavailable: {call.caller_agent}>",
                        path=None,
                        line=0,
                        boundary=True,
                    )
                )
                log.error("composed stack: %s", exc)
                continue
            site = call.call_site
            frames.append(
                ComposedFrame(
                    id=self._new_frame_id(),
                    name=f"polyglotEval({site.target_language})",
                    path=site.caller_location[0],
                    line=site.caller_location[1],
                    agent_id=call.caller_agent,
                    adapter_frame_id=segment[0].id if segment else None,
                    boundary=True,
                )
            )
            for f in segment[1:]:
                frames.append(self._real_frame(call.caller_agent, f))
        for frame in frames:
            if frame.agent_id is not None and frame.adapter_frame_id is not None:
                self._frame_map[frame.id] = (frame.agent_id, frame.adapter_frame_id)
        self._composed = frames
        return frames

    def _real_frame(self, agent_id: str, f) -> ComposedFrame:
        return ComposedFrame(
            id=self._new_frame_id(),
            name=f.name,
            path=f.path,
            line=f.line,
            column=f.column,
            agent_id=agent_id,
            adapter_frame_id=f.id,
        )

    def _stacktrace_body(self) -> dict[str, Any]:
        frames = []
        for f in self.composed_stacktrace():
            doc: dict[str, Any] = {
                "id": f.id,
                "name": f.name,
                "line": f.line,
                "column": f.column,
            }
            if f.path is not None:
                doc["source"] = {"path": f.path}
            if f.boundary:
                doc["presentationHint"] = "label"
            frames.append(doc)
        return {"stackFrames": frames, "totalFrames": len(frames)}

    def _new_frame_id(self) -> int:
        self._next_frame_id += 1
        return self._next_frame_id

    def _invalidate_views(self) -> None:
        self._composed = None
        self._frame_map.clear()
        self._ref_map.clear()
        self._ref_rev.clear()

    # -- frame/variable reference mapping ---------------------------------------

    def _route_by_frame(self, req: DapMessage) -> dict[str, Any]:
        args = dict(req.payload)
        frame_id = args.get("frameId")
        if frame_id is None:
            raise InvalidFrame("request requires a frameId")
        self.composed_stacktrace()
        mapped = self._frame_map.get(int(frame_id))
        if mapped is None:
            raise InvalidFrame(f"unknown frame id {frame_id}")
        agent_id, real_id = mapped
        args["frameId"] = real_id
        return self._forward_inspection(agent_id, req.name, args)

    def _route_by_ref(self, req: DapMessage) -> dict[str, Any]:
        args = dict(req.payload)
        ref = args.get("variablesReference")
        if ref is None:
            raise InvalidFrame("request requires a variablesReference")
        mapped = self._ref_map.get(int(ref))
        if mapped is None:
            raise InvalidFrame(f"unknown variables reference {ref}")
        agent_id, real_ref = mapped
        args["variablesReference"] = real_ref
        return self._forward_inspection(agent_id, req.name, args)

    def _forward_inspection(self, agent_id: str, command: str, args: dict[str, Any]) -> dict[str, Any]:
        agent = self._agent(agent_id)
        resp = agent.forward(DapMessage.request(1, command, args))
        if not resp.success:
            raise ProtocolError(resp.error_text or f"{command} rejected")
        return self._rewrite_refs_out(agent_id, resp.payload)

    def _rewrite_refs_out(self, agent_id: str, doc: Any) -> Any:
        if isinstance(doc, dict):
            out = {}
            for key, value in doc.items():
                if key == "variablesReference" and isinstance(value, int) and value > 0:
                    out[key] = self._session_ref(agent_id, value)
                else:
                    out[key] = self._rewrite_refs_out(agent_id, value)
            return out
        if isinstance(doc, list):
            return [self._rewrite_refs_out(agent_id, v) for v in doc]
        return doc

    def _session_ref(self, agent_id: str, real_ref: int) -> int:
        key = (agent_id, real_ref)
        existing = self._ref_rev.get(key)
        if existing is not None:
            return existing
        self._next_ref += 1
        self._ref_map[self._next_ref] = key
        self._ref_rev[key] = self._next_ref
        return self._next_ref
