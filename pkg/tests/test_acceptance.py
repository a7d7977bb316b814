"""Acceptance suite: one test per primary criterion.

Each test prints a `[acceptance] <name>: PASS|FAIL` line (see conftest).
Everything here runs hermetically against scripted mock adapters.
"""

from __future__ import annotations

import json
import random
import string
import struct
import time

from polydap.agent import DebugAgent
from polydap.config import SessionDefaults
from polydap.coordinator import Coordinator, SessionPhase
from polydap.mockdap import assert_transcript
from polydap.mockdap.builders import StopSpec, user_frame
from polydap.values import ERROR_TAG, ValueEnvelope, ValueKind, round_trip
from polydap.wire import DapMessage, FrameBuffer, MessageKind, encode_frame

from scenarios import make_runner, quoted, stage_agent, stage_nested_call, stage_single_call, touch_program
from test_server import DapTestClient, config_for, stage_user_session
from test_values import _float_corpus


# --- wire round-trip ---------------------------------------------------------


def _random_message(rng: random.Random) -> DapMessage:
    def rand_text() -> str:
        alphabet = string.ascii_letters + string.digits + "⟨⟩éπ中_ -"
        return "".join(rng.choice(alphabet) for _ in range(rng.randint(1, 18)))

    def rand_value(depth: int = 0):
        choices = ["str", "int", "float", "bool", "null"]
        if depth < 2:
            choices += ["list", "dict"]
        pick = rng.choice(choices)
        if pick == "str":
            return rand_text()
        if pick == "int":
            return rng.randint(-(2**40), 2**40)
        if pick == "float":
            return rng.uniform(-1e9, 1e9)
        if pick == "bool":
            return rng.random() < 0.5
        if pick == "null":
            return None
        if pick == "list":
            return [rand_value(depth + 1) for _ in range(rng.randint(0, 3))]
        return {rand_text(): rand_value(depth + 1) for _ in range(rng.randint(0, 3))}

    kind = rng.choice(list(MessageKind))
    seq = rng.randint(1, 2**30)
    name = rand_text()
    payload = {rand_text(): rand_value() for _ in range(rng.randint(0, 4))}
    if kind is MessageKind.REQUEST:
        return DapMessage.request(seq, name, payload)
    if kind is MessageKind.EVENT:
        return DapMessage.event(seq, name, payload)
    success = rng.random() < 0.8
    return DapMessage(
        kind,
        seq,
        name,
        payload,
        request_seq=rng.randint(1, 2**30),
        success=success,
        error_text=None if success else rand_text(),
    )


def test_wire_round_trip_under_every_byte_split():
    rng = random.Random(0x5EED)
    messages = [_random_message(rng) for _ in range(1000)]
    stream = b"".join(encode_frame(m) for m in messages)

    started = time.monotonic()
    buffer = FrameBuffer()
    decoded: list[DapMessage] = []
    view = memoryview(stream)
    for i in range(len(stream)):  # the finest split: every byte boundary
        decoded.extend(buffer.feed(view[i : i + 1]))
    elapsed = time.monotonic() - started

    assert decoded == messages
    assert elapsed < 5.0, f"byte-at-a-time decode took {elapsed:.2f}s"


# --- agent startup conformance -----------------------------------------------


def test_agent_startup_transcript_conformance(tmp_path):
    runner = make_runner(tmp_path, "python", ".py")
    staged = stage_agent(
        tmp_path,
        "python",
        ".py",
        [StopSpec(frames=[runner.outer_standby_frame(101)], resume=None)],
        runner=runner,
    )
    agent = DebugAgent(staged.config)
    agent.start()
    agent.shutdown()

    transcript = staged.transcript().entries
    up_to_first_stop = transcript[:10]
    expected = [
        {"dir": "recv", "message": {"type": "request", "command": "initialize"}},
        {"dir": "sent", "message": {"type": "response", "command": "initialize"}},
        {"dir": "recv", "message": {"type": "request", "command": "launch"}},
        {"dir": "sent", "message": {"type": "response", "command": "launch"}},
        {"dir": "sent", "message": {"type": "event", "event": "initialized"}},
        {"dir": "recv", "message": {"type": "request", "command": "setBreakpoints"}},
        {"dir": "sent", "message": {"type": "response", "command": "setBreakpoints"}},
        {"dir": "recv", "message": {"type": "request", "command": "configurationDone"}},
        {"dir": "sent", "message": {"type": "response", "command": "configurationDone"}},
        {"dir": "sent", "message": {"type": "event", "event": "stopped"}},
    ]
    diff = assert_transcript(up_to_first_stop, expected)
    assert diff.ok, f"startup divergence at {diff.index}: {diff.detail}"


# --- single polyglot call conformance ------------------------------------------


def test_single_polyglot_call_transcript_conformance(tmp_path):
    staging = stage_single_call(tmp_path)
    depth_log: list[int] = []
    coordinator = Coordinator(
        [staging.caller.config, staging.callee.config],
        defaults=SessionDefaults(timeout_s=5.0),
        event_sink=lambda name, body: None,
    )
    coordinator.launch_session(staging.entry)
    coordinator.pump(timeout_s=30.0)
    coordinator.shutdown()
    assert coordinator.phase is SessionPhase.TERMINATED

    # Call stack observed at depth 1, then back to 0.
    assert coordinator.depth_trace == [1, 0]

    caller_expected = [
        {"dir": "recv", "message": {"command": "initialize"}},
        {"dir": "sent", "message": {"type": "response", "command": "initialize"}},
        {"dir": "recv", "message": {"command": "launch"}},
        {"dir": "sent", "message": {"type": "response"}},
        {"dir": "sent", "message": {"event": "initialized"}},
        {"dir": "recv", "message": {"command": "setBreakpoints"}},
        {"dir": "sent", "message": {"type": "response"}},
        {"dir": "recv", "message": {"command": "configurationDone"}},
        {"dir": "sent", "message": {"type": "response"}},
        {"dir": "sent", "message": {"event": "stopped"}},
        {"dir": "recv", "message": {"command": "stackTrace"}},
        {"dir": "sent", "message": {"type": "response"}},
        {"dir": "recv", "message": {"command": "scopes"}},
        {"dir": "sent", "message": {"type": "response"}},
        {"dir": "recv", "message": {"command": "setVariable",
                                    "arguments": {"name": "inputCode"}}},
        {"dir": "sent", "message": {"type": "response"}},
        {"dir": "recv", "message": {"command": "continue"}},
        {"dir": "sent", "message": {"type": "response"}},
        # Stop on the polyglot breakpoint, then the argument reads.
        {"dir": "sent", "message": {"event": "stopped"}},
        {"dir": "recv", "message": {"command": "stackTrace"}},
        {"dir": "sent", "message": {"type": "response"}},
        {"dir": "recv", "message": {"command": "evaluate",
                                    "arguments": {"expression": "language"}}},
        {"dir": "sent", "message": {"type": "response"}},
        {"dir": "recv", "message": {"command": "evaluate",
                                    "arguments": {"expression": "foreignCode"}}},
        {"dir": "sent", "message": {"type": "response"}},
        # Result injection: ret, emptied input, resume.
        {"dir": "recv", "message": {"command": "scopes"}},
        {"dir": "sent", "message": {"type": "response"}},
        {"dir": "recv", "message": {"command": "setVariable",
                                    "arguments": {"name": "ret", "value": "7"}}},
        {"dir": "sent", "message": {"type": "response"}},
        {"dir": "recv", "message": {"command": "setVariable",
                                    "arguments": {"name": "inputCode", "value": '""'}}},
        {"dir": "sent", "message": {"type": "response"}},
        {"dir": "recv", "message": {"command": "continue"}},
        {"dir": "sent", "message": {"type": "response"}},
        {"dir": "sent", "message": {"event": "stopped"}},
        {"dir": "recv", "message": {"command": "stackTrace"}},
        {"dir": "sent", "message": {"type": "response"}},
        {"dir": "recv", "message": {"command": "evaluate",
                                    "arguments": {"expression": "res"}}},
        {"dir": "sent", "message": {"type": "response"}},
        {"dir": "recv", "message": {"command": "disconnect"}},
        {"dir": "sent", "message": {"type": "response"}},
    ]
    diff = assert_transcript(staging.caller.transcript().entries, caller_expected)
    assert diff.ok, f"caller divergence at {diff.index}: {diff.detail}"

    callee_expected = [
        {"dir": "recv", "message": {"command": "initialize"}},
        {"dir": "sent", "message": {"type": "response"}},
        {"dir": "recv", "message": {"command": "launch"}},
        {"dir": "sent", "message": {"type": "response"}},
        {"dir": "sent", "message": {"event": "initialized"}},
        {"dir": "recv", "message": {"command": "setBreakpoints"}},
        {"dir": "sent", "message": {"type": "response"}},
        {"dir": "recv", "message": {"command": "configurationDone"}},
        {"dir": "sent", "message": {"type": "response"}},
        {"dir": "sent", "message": {"event": "stopped"}},
        {"dir": "recv", "message": {"command": "stackTrace"}},
        {"dir": "sent", "message": {"type": "response"}},
        # Input injection and resume.
        {"dir": "recv", "message": {"command": "scopes"}},
        {"dir": "sent", "message": {"type": "response"}},
        {"dir": "recv", "message": {"command": "setVariable",
                                    "arguments": {"name": "inputCode"}}},
        {"dir": "sent", "message": {"type": "response"}},
        {"dir": "recv", "message": {"command": "continue"}},
        {"dir": "sent", "message": {"type": "response"}},
        # Standby stop with the result readable.
        {"dir": "sent", "message": {"event": "stopped"}},
        {"dir": "recv", "message": {"command": "stackTrace"}},
        {"dir": "sent", "message": {"type": "response"}},
        {"dir": "recv", "message": {"command": "evaluate",
                                    "arguments": {"expression": "res"}}},
        {"dir": "sent", "message": {"type": "response"}},
        {"dir": "recv", "message": {"command": "disconnect"}},
        {"dir": "sent", "message": {"type": "response"}},
    ]
    diff = assert_transcript(staging.callee.transcript().entries, callee_expected)
    assert diff.ok, f"callee divergence at {diff.index}: {diff.detail}"

    # Cross-agent data flow pins the interleaving: the callee's input write
    # carries the path resolved from the caller's argument reads, and the
    # caller's ret write carries the callee's scripted result.
    callee_input = next(
        e["message"]["arguments"]["value"]
        for e in staging.callee.transcript().entries
        if e["dir"] == "recv"
        and e["message"]["command"] == "setVariable"
        and e["message"]["arguments"]["name"] == "inputCode"
    )
    assert json.loads(callee_input) == staging.callee_file


# --- nested call-back -----------------------------------------------------------


def test_nested_callback_depth_and_process_frugality(tmp_path):
    staging = stage_nested_call(tmp_path)
    max_depth: dict[str, int] = {}

    class DepthProbe(DebugAgent):
        def execute(self, program, user_breakpoints):
            super().execute(program, user_breakpoints)
            max_depth[self.language_id] = max(
                max_depth.get(self.language_id, 0), self.depth
            )

    coordinator = Coordinator(
        [staging.caller.config, staging.callee.config],
        defaults=SessionDefaults(timeout_s=5.0),
        event_sink=lambda name, body: None,
        agent_factory=DepthProbe,
    )
    coordinator.launch_session(staging.entry)
    coordinator.pump(timeout_s=30.0)
    coordinator.shutdown()

    assert coordinator.phase is SessionPhase.TERMINATED
    assert coordinator.final_value.numeric == 12
    # Exactly one adapter process per language over the whole session.
    assert staging.caller.spawn_count() == 1
    assert staging.callee.spawn_count() == 1
    # The caller agent served the call-back while paused: two live executes.
    assert max_depth["python"] == 2
    assert max_depth["javascript"] == 1
    # Unwind order: call-back result lands in the callee's ret, then the
    # callee's result lands in the caller's ret.
    assert coordinator.depth_trace == [1, 2, 1, 0]


# --- transparency ------------------------------------------------------------------


def test_zero_polyglot_transparency(tmp_path):
    entry, staged = stage_user_session(tmp_path)
    client = DapTestClient(config_for(staged))
    client.request("initialize")
    client.next_event("initialized")
    client.request(
        "setBreakpoints", {"source": {"path": entry}, "breakpoints": [{"line": 5}]}
    )
    client.request("launch", {"program": entry})
    client.request("configurationDone")
    first = client.next_event("stopped")
    client.request("next", {"threadId": 1})
    second = client.next_event("stopped")
    client.request("continue", {"threadId": 1})
    client.next_event("terminated")
    client.request("disconnect")
    client.close()

    # Client-visible stop sequence equals the lone agent's user-level stop
    # sequence (runner-machinery standby stops are not user-level).
    from polydap.mockdap import Scenario

    scenario = Scenario.load(staged.scenario_path)
    runner_path = staged.runner.path
    stop_index = -1
    agent_user_reasons = []
    for entry_ in staged.transcript().entries:
        msg = entry_["message"]
        if entry_["dir"] == "sent" and msg.get("event") == "stopped":
            stop_index += 1
            # User-level stops are the ones whose top frame is user code.
            top = scenario.stacks[stop_index][0]
            if top.path != runner_path:
                agent_user_reasons.append(msg["body"]["reason"])
    client_reasons = [first.payload["reason"], second.payload["reason"]]
    assert client_reasons == agent_user_reasons == ["breakpoint", "step"]

    # Every client request received exactly one response, in request order.
    responses = [name for kind, name in client.observed if kind == "response"]
    assert responses == [
        "initialize",
        "setBreakpoints",
        "launch",
        "configurationDone",
        "next",
        "continue",
        "disconnect",
    ]


# --- breakpoint routing ----------------------------------------------------------


def test_breakpoint_routing_by_extension(tmp_path):
    staging = stage_single_call(tmp_path)
    util = touch_program(tmp_path, "util.js")
    client = DapTestClient(config_for(staging.caller, staging.callee))
    client.request("initialize")
    client.request(
        "setBreakpoints", {"source": {"path": util}, "breakpoints": [{"line": 4}]}
    )
    client.request(
        "setBreakpoints",
        {"source": {"path": staging.entry}, "breakpoints": [{"line": 99}]},
    )
    client.request("launch", {"program": staging.entry})
    client.request("configurationDone")
    client.next_event("terminated")
    client.request("disconnect")
    client.close()

    def breakpoint_files(staged):
        return {
            e["message"]["arguments"]["source"]["path"]
            for e in staged.transcript().entries
            if e["dir"] == "recv" and e["message"]["command"] == "setBreakpoints"
        }

    caller_files = breakpoint_files(staging.caller)
    callee_files = breakpoint_files(staging.callee)
    assert staging.entry in caller_files
    assert util in callee_files
    assert util not in caller_files
    assert staging.entry not in callee_files


# --- composed stack -------------------------------------------------------------


def test_composed_stack_matches_hand_built_expectation(tmp_path):
    entry = touch_program(tmp_path, "main.py")
    sub = touch_program(tmp_path, "sub.js")
    cb = touch_program(tmp_path, "cb.py")

    a_runner = make_runner(tmp_path, "python", ".py")
    a_stops = [
        StopSpec(frames=[a_runner.outer_standby_frame(101)], resume=None),
        StopSpec(
            frames=[a_runner.polyglot_frame(201), user_frame(202, entry, 2)],
            variables={201: {"language": quoted("javascript"), "foreignCode": quoted("sub.js")}},
        ),
        StopSpec(
            frames=[
                user_frame(601, cb, 1),
                a_runner.inner_standby_frame(602),
                user_frame(603, entry, 2),
                a_runner.outer_standby_frame(604),
            ],
            reason="breakpoint",
        ),
    ]
    caller = stage_agent(tmp_path, "python", ".py", a_stops, runner=a_runner)

    b_runner = make_runner(tmp_path, "javascript", ".js")
    b_stops = [
        StopSpec(frames=[b_runner.outer_standby_frame(111)], resume=None),
        StopSpec(
            frames=[b_runner.polyglot_frame(211), user_frame(212, sub, 1)],
            variables={211: {"language": quoted("python"), "foreignCode": quoted("cb.py")}},
        ),
    ]
    callee = stage_agent(tmp_path, "javascript", ".js", b_stops, runner=b_runner)

    client = DapTestClient(config_for(caller, callee))
    client.request("initialize")
    client.request(
        "setBreakpoints", {"source": {"path": cb}, "breakpoints": [{"line": 1}]}
    )
    client.request("launch", {"program": entry})
    client.request("configurationDone")
    client.next_event("stopped")

    body = client.request("stackTrace", {"threadId": 1}).payload
    rows = [
        (
            f["name"],
            f.get("source", {}).get("path"),
            f["line"],
            f.get("presentationHint"),
        )
        for f in body["stackFrames"]
    ]
    assert rows == [
        ("<module>", cb, 1, None),
        ("polyglotEval(python)", sub, 1, "label"),
        ("polyglotEval(javascript)", entry, 2, "label"),
    ]
    ids = [f["id"] for f in body["stackFrames"]]
    assert len(set(ids)) == len(ids)
    client.request("disconnect")
    client.close()


# --- value round-trips ------------------------------------------------------------


def test_value_round_trip_across_language_pairs():
    languages = ("python", "javascript", "generic")
    samples = [
        ValueEnvelope.of_int(42),
        ValueEnvelope.of_int(-(2**80)),
        ValueEnvelope.of_float(0.5),
        ValueEnvelope.of_bool(True),
        ValueEnvelope.of_bool(False),
        ValueEnvelope.of_str("it's \"mixed\" \\ text\nwith lines"),
        ValueEnvelope.of_str(""),
        ValueEnvelope.null(),
    ]
    for source in languages:
        for target in languages:
            for env in samples:
                out = round_trip(source, target, env)
                assert out.kind is env.kind, (source, target, env)
                if env.kind in (ValueKind.INT, ValueKind.FLOAT):
                    assert out.numeric == env.numeric
                else:
                    assert out.lexical == env.lexical

    corpus = _float_corpus()
    assert len(corpus) == 64
    for source in languages:
        for target in languages:
            for value in corpus:
                out = round_trip(source, target, ValueEnvelope.of_float(value))
                assert out.kind is ValueKind.FLOAT
                assert struct.pack("<d", out.numeric) == struct.pack("<d", value), (
                    source,
                    target,
                    value,
                )


# --- recursion cap ----------------------------------------------------------------


def test_recursion_cap_aborts_innermost_call_and_survives(tmp_path):
    entry = touch_program(tmp_path, "main.py")
    sub = touch_program(tmp_path, "sub.js")
    cb = touch_program(tmp_path, "cb.py")
    touch_program(tmp_path, "sub2.js")

    a_runner = make_runner(tmp_path, "python", ".py")
    a_stops = [
        StopSpec(frames=[a_runner.outer_standby_frame(101)], resume=None),
        StopSpec(
            frames=[a_runner.polyglot_frame(201), user_frame(202, entry, 2)],
            variables={201: {"language": quoted("javascript"), "foreignCode": quoted("sub.js")}},
        ),
        StopSpec(
            frames=[a_runner.polyglot_frame(601), user_frame(602, cb, 1)],
            variables={601: {"language": quoted("javascript"), "foreignCode": quoted("sub2.js")}},
        ),
        StopSpec(
            frames=[a_runner.inner_standby_frame(401), user_frame(402, entry, 2)],
            variables={401: {"res": quoted("cb-done")}},
        ),
        StopSpec(
            frames=[a_runner.outer_standby_frame(501)],
            variables={501: {"res": "12"}},
        ),
    ]
    caller = stage_agent(tmp_path, "python", ".py", a_stops, runner=a_runner)

    b_runner = make_runner(tmp_path, "javascript", ".js")
    b_stops = [
        StopSpec(frames=[b_runner.outer_standby_frame(111)], resume=None),
        StopSpec(
            frames=[b_runner.polyglot_frame(211), user_frame(212, sub, 1)],
            variables={211: {"language": quoted("python"), "foreignCode": quoted("cb.py")}},
        ),
        StopSpec(
            frames=[b_runner.outer_standby_frame(311)],
            variables={311: {"res": "7"}},
        ),
    ]
    callee = stage_agent(tmp_path, "javascript", ".js", b_stops, runner=b_runner)

    events: list[tuple[str, dict]] = []
    coordinator = Coordinator(
        [caller.config, callee.config],
        defaults=SessionDefaults(timeout_s=5.0, max_call_depth=2),
        event_sink=lambda name, body: events.append((name, body)),
    )
    coordinator.launch_session(entry)
    coordinator.pump(timeout_s=30.0)
    coordinator.shutdown()

    # The session survived the cap and ran to a normal termination.
    assert coordinator.phase is SessionPhase.TERMINATED
    assert coordinator.final_value.numeric == 12
    assert [name for name, _ in events] == ["output", "exited", "terminated"]

    ret_writes = [
        e["message"]["arguments"]["value"]
        for e in caller.transcript().entries
        if e["dir"] == "recv"
        and e["message"]["command"] == "setVariable"
        and e["message"]["arguments"]["name"] == "ret"
    ]
    # Innermost call aborted with an error envelope; outer calls completed.
    assert ERROR_TAG in ret_writes[0]
    assert ret_writes[1] == "7"
