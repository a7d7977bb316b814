"""Helpers for assembling runner-shaped mock scenarios.

A "runner-shaped" adapter behaves like a child debugger running a polyglot
runner: it starts, stops at the outer standby line, and then alternates
resume requests with scripted stops (polyglot calls, standby returns, user
breakpoints). These builders keep test scenarios declarative.
"""

from __future__ import annotations

import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

from ..config import AgentConfig, RunnerContract
from . import FrameSpec, Scenario, ScenarioStep


@dataclass
class FakeRunner:
    """Pretend runner file: coordinates only, no executable content."""

    path: str
    polyglot_line: int = 3
    inner_standby_line: int = 6
    outer_standby_line: int = 11

    def contract(self) -> RunnerContract:
        return RunnerContract(
            runner_path=self.path,
            polyglot_bp=(self.path, self.polyglot_line),
            outer_standby_bp=(self.path, self.outer_standby_line),
            inner_standby_bp=(self.path, self.inner_standby_line),
        )

    def write(self) -> None:
        """Materialize a placeholder file so existence checks pass."""
        lines = max(self.polyglot_line, self.inner_standby_line, self.outer_standby_line) + 1
        Path(self.path).write_text(
            "".join(f"# runner line {i}\n" for i in range(1, lines + 1)), encoding="utf-8"
        )

    def outer_standby_frame(self, fid: int) -> FrameSpec:
        return FrameSpec(fid, "<module>", self.path, self.outer_standby_line)

    def inner_standby_frame(self, fid: int) -> FrameSpec:
        return FrameSpec(fid, "polyglotEval", self.path, self.inner_standby_line)

    def polyglot_frame(self, fid: int) -> FrameSpec:
        return FrameSpec(fid, "polyglotEval", self.path, self.polyglot_line)


def user_frame(fid: int, path: str, line: int, name: str = "<module>") -> FrameSpec:
    return FrameSpec(fid, name, path, line)


@dataclass
class StopSpec:
    """One scripted stop: the resume command that triggers it, plus state.

    `resume` is None for the initial stop emitted after configurationDone.
    `variables` maps frame id -> {name: value string}.
    """

    frames: list[FrameSpec]
    reason: str = "breakpoint"
    resume: str | None = "continue"
    variables: dict[int, dict[str, str]] = field(default_factory=dict)
    delay_ms: int = 0


def stopped_event(reason: str, delay_ms: int = 0, **body: Any) -> dict[str, Any]:
    event_body = {"reason": reason, "threadId": 1, "allThreadsStopped": True}
    event_body.update(body)
    event: dict[str, Any] = {"event": "stopped", "body": event_body}
    if delay_ms:
        event["delay_ms"] = delay_ms
    return event


def runner_scenario(
    stops: list[StopSpec],
    *,
    capabilities: dict[str, Any] | None = None,
    refuse: list[str] | None = None,
    strict: bool = True,
    spawn_marker: str | None = None,
    delay_ms: int = 0,
    emit_first_stop: bool = True,
    trailing_steps: list[ScenarioStep] | None = None,
) -> Scenario:
    """Script a full adapter lifecycle around the given stop sequence."""
    if not stops or stops[0].resume is not None:
        raise ValueError("first stop must have resume=None (it follows configurationDone)")

    steps = [
        ScenarioStep(
            on={"command": "initialize"}, respond={"body": dict(capabilities or {})}
        ),
        ScenarioStep(on={"command": "launch"}, then_emit=[{"event": "initialized"}]),
        ScenarioStep(
            on={"command": "configurationDone"},
            then_emit=[stopped_event(stops[0].reason, stops[0].delay_ms)]
            if emit_first_stop
            else [],
        ),
    ]
    for stop in stops[1:]:
        steps.append(
            ScenarioStep(
                on={"command": stop.resume},
                then_emit=[stopped_event(stop.reason, stop.delay_ms)],
            )
        )
    if trailing_steps:
        steps.extend(trailing_steps)

    variables: dict[str, str] = {}
    for stop in stops:
        for fid, named in stop.variables.items():
            for name, value in named.items():
                variables[f"{fid}:{name}"] = value

    return Scenario(
        steps=steps,
        variables=variables,
        stacks=[list(stop.frames) for stop in stops],
        strict=strict,
        capabilities=dict(capabilities or {}),
        refuse=list(refuse or []),
        delay_ms=delay_ms,
        spawn_marker=spawn_marker,
    )


def mock_adapter_command(scenario_path: str, transcript_path: str | None = None) -> tuple[str, ...]:
    command = [sys.executable, "-m", "polydap.mockdap", "--scenario", str(scenario_path)]
    if transcript_path is not None:
        command += ["--transcript", str(transcript_path)]
    return tuple(command)


def mock_agent_config(
    language_id: str,
    extensions: tuple[str, ...],
    runner: FakeRunner,
    scenario_path: str,
    transcript_path: str | None = None,
    *,
    timeout_s: float = 5.0,
    value_table=None,
) -> AgentConfig:
    """AgentConfig pointing at a subprocess mock with the given scenario."""
    runner.write()
    return AgentConfig(
        language_id=language_id,
        file_extensions=extensions,
        adapter_command=mock_adapter_command(scenario_path, transcript_path),
        runner=runner.contract(),
        value_table=value_table,
        request_timeout_s=timeout_s,
    )
