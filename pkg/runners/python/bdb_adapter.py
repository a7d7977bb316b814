#!/usr/bin/env python3
"""Minimal Debug Adapter Protocol server for Python, built on stdlib bdb.

Speaks DAP over stdio: Content-Length framed JSON. Supports the request
set a coordinator needs from a child adapter: launch, setBreakpoints,
configurationDone, continue/next/stepIn/stepOut/pause, stackTrace, scopes,
variables, evaluate, setVariable, threads, disconnect.

The debuggee runs in a worker thread under a bdb tracer; its stdout and
stderr are forwarded as output events (process stdout belongs to DAP).
Standalone on purpose: a single file usable as any session's
adapter_command.
"""

from __future__ import annotations

import bdb
import ctypes
import json
import os
import queue
import sys
import threading

ADAPTER_FILE = os.path.abspath(__file__)

_CUT_BASENAMES = {"bdb.py", "threading.py"}


class Framing:
    """Content-Length framed JSON read/write over binary streams."""

    def __init__(self, rfile, wfile):
        self._rfile = rfile
        self._wfile = wfile
        self._wlock = threading.Lock()
        self._seq = 0

    def read(self):
        length = None
        while True:
            line = self._rfile.readline()
            if not line:
                return None
            if line in (b"\r\n", b"\n"):
                break
            key, _, value = line.partition(b":")
            if key.strip().lower() == b"content-length":
                length = int(value.strip())
        if length is None:
            return None
        body = self._rfile.read(length)
        if len(body) != length:
            return None
        return json.loads(body.decode("utf-8"))

    def send(self, doc: dict) -> None:
        with self._wlock:
            self._seq += 1
            doc["seq"] = self._seq
            body = json.dumps(doc, ensure_ascii=False).encode("utf-8")
            self._wfile.write(b"Content-Length: %d\r\n\r\n%s" % (len(body), body))
            self._wfile.flush()

    def respond(self, request: dict, body: dict | None = None, *,
                success: bool = True, message: str | None = None) -> None:
        doc = {
            "type": "response",
            "request_seq": request["seq"],
            "command": request["command"],
            "success": success,
            "body": body or {},
        }
        if message is not None:
            doc["message"] = message
        self.send(doc)

    def event(self, name: str, body: dict | None = None) -> None:
        self.send({"type": "event", "event": name, "body": body or {}})


class _OutputWriter:
    """Line-buffered stand-in forwarding debuggee writes as output events."""

    def __init__(self, framing: Framing, category: str):
        self._framing = framing
        self._category = category
        self._buffer = ""
        self._lock = threading.Lock()

    def write(self, text: str) -> int:
        with self._lock:
            self._buffer += text
            while "\n" in self._buffer:
                line, self._buffer = self._buffer.split("\n", 1)
                self._framing.event(
                    "output", {"category": self._category, "output": line + "\n"}
                )
        return len(text)

    def flush(self) -> None:
        pass

    def drain(self) -> None:
        with self._lock:
            if self._buffer:
                self._framing.event(
                    "output", {"category": self._category, "output": self._buffer}
                )
                self._buffer = ""


class Tracer(bdb.Bdb):
    def __init__(self, session: "Session"):
        super().__init__()
        self.session = session

    def user_line(self, frame):
        if self.session.quitting:
            self.set_quit()
            return
        filename = self.canonic(frame.f_code.co_filename)
        reason = "breakpoint" if self.get_breaks(filename, frame.f_lineno) else "step"
        command = self.session.report_stop(frame, reason)
        if command == "continue":
            self.set_continue()
        elif command == "next":
            self.set_next(frame)
        elif command == "stepIn":
            self.set_step()
        elif command == "stepOut":
            self.set_return(frame)
        else:
            self.set_quit()

    def user_exception(self, frame, exc_info):
        pass

    def user_return(self, frame, return_value):
        pass


class Session:
    def __init__(self, framing: Framing):
        self.framing = framing
        self.tracer = Tracer(self)
        self.program: str | None = None
        self.thread: threading.Thread | None = None
        self.commands: "queue.Queue[str]" = queue.Queue()
        self.quitting = False
        self.paused = False
        self._frames: list = []
        self._frame_ids: dict[int, object] = {}
        self._var_refs: dict[int, object] = {}
        self._next_id = 0

    # -- debuggee side ---------------------------------------------------

    def report_stop(self, frame, reason: str) -> str:
        self._frames = self._collect(frame)
        self._frame_ids = {}
        self._var_refs = {}
        for f in self._frames:
            self._next_id += 1
            self._frame_ids[self._next_id] = f
        self.paused = True
        self.framing.event(
            "stopped", {"reason": reason, "threadId": 1, "allThreadsStopped": True}
        )
        command = self.commands.get()
        self.paused = False
        self._frames = []
        self._frame_ids = {}
        self._var_refs = {}
        return command

    def _collect(self, frame) -> list:
        frames = []
        current = frame
        while current is not None:
            filename = self.tracer.canonic(current.f_code.co_filename)
            if (
                os.path.basename(filename) in _CUT_BASENAMES
                or filename == ADAPTER_FILE
                or filename.startswith("<")
            ):
                break
            frames.append(current)
            current = current.f_back
        return frames

    def run_debuggee(self) -> None:
        program = self.program
        assert program is not None
        debuggee_globals = {
            "__name__": "__main__",
            "__file__": program,
            "__builtins__": __builtins__,
        }
        try:
            with open(program, "r", encoding="utf-8") as fh:
                code = compile(fh.read(), program, "exec")
            self.tracer.run(code, debuggee_globals)
        except bdb.BdbQuit:
            pass
        except BaseException as exc:  # surfaced, then the session ends
            self.framing.event(
                "output", {"category": "stderr", "output": f"debuggee crashed: {exc}\n"}
            )
        finally:
            for stream in (sys.stdout, sys.stderr):
                if isinstance(stream, _OutputWriter):
                    stream.drain()
            self.framing.event("exited", {"exitCode": 0})
            self.framing.event("terminated", {})

    # -- adapter side ------------------------------------------------------

    def frame_by_id(self, frame_id: int):
        return self._frame_ids.get(int(frame_id))

    def serve(self) -> int:
        while True:
            request = self.framing.read()
            if request is None:
                self._shutdown()
                return 0
            if request.get("type") != "request":
                continue
            command = request.get("command", "")
            handler = getattr(self, f"do_{command}", None)
            try:
                if handler is None:
                    self.framing.respond(
                        request, success=False, message=f"unsupported command {command!r}"
                    )
                elif handler(request):
                    return 0
            except Exception as exc:
                self.framing.respond(request, success=False, message=str(exc))

    def _shutdown(self) -> None:
        self.quitting = True
        self.tracer.set_quit()
        if self.paused:
            self.commands.put("quit")
        if self.thread is not None:
            self.thread.join(timeout=2.0)

    # -- request handlers -----------------------------------------------------

    def do_initialize(self, request) -> bool:
        self.framing.respond(
            request,
            {
                "supportsConfigurationDoneRequest": True,
                "supportsSetVariable": True,
            },
        )
        return False

    def do_launch(self, request) -> bool:
        program = request.get("arguments", {}).get("program")
        if not program or not os.path.isfile(program):
            self.framing.respond(request, success=False, message="program missing")
            return False
        self.program = os.path.realpath(program)
        self.framing.respond(request)
        self.framing.event("initialized", {})
        return False

    def do_setBreakpoints(self, request) -> bool:
        args = request.get("arguments", {})
        path = os.path.realpath(args.get("source", {}).get("path", ""))
        lines = [int(bp["line"]) for bp in args.get("breakpoints", [])]
        self.tracer.clear_all_file_breaks(self.tracer.canonic(path))
        verified = []
        for line in lines:
            error = self.tracer.set_break(path, line)
            verified.append({"verified": error is None, "line": line})
        self.framing.respond(request, {"breakpoints": verified})
        return False

    def do_configurationDone(self, request) -> bool:
        self.framing.respond(request)
        if self.thread is None and self.program is not None:
            self.thread = threading.Thread(target=self.run_debuggee, daemon=True)
            self.thread.start()
        return False

    def _resume(self, request, command: str) -> bool:
        if not self.paused:
            self.framing.respond(request, success=False, message="debuggee is not paused")
            return False
        body = {"allThreadsContinued": True} if command == "continue" else {}
        self.framing.respond(request, body)
        self.commands.put(command)
        return False

    def do_continue(self, request) -> bool:
        return self._resume(request, "continue")

    def do_next(self, request) -> bool:
        return self._resume(request, "next")

    def do_stepIn(self, request) -> bool:
        return self._resume(request, "stepIn")

    def do_stepOut(self, request) -> bool:
        return self._resume(request, "stepOut")

    def do_pause(self, request) -> bool:
        self.tracer.set_step()
        self.framing.respond(request)
        return False

    def do_threads(self, request) -> bool:
        self.framing.respond(request, {"threads": [{"id": 1, "name": "debuggee"}]})
        return False

    def do_stackTrace(self, request) -> bool:
        frames = []
        for frame_id, frame in self._frame_ids.items():
            frames.append(
                {
                    "id": frame_id,
                    "name": frame.f_code.co_name,
                    "source": {"path": self.tracer.canonic(frame.f_code.co_filename)},
                    "line": frame.f_lineno,
                    "column": 1,
                }
            )
        self.framing.respond(request, {"stackFrames": frames, "totalFrames": len(frames)})
        return False

    def do_scopes(self, request) -> bool:
        frame = self.frame_by_id(request.get("arguments", {}).get("frameId", -1))
        if frame is None:
            self.framing.respond(request, success=False, message="unknown frame")
            return False
        self._next_id += 1
        self._var_refs[self._next_id] = frame
        self.framing.respond(
            request,
            {
                "scopes": [
                    {
                        "name": "Locals",
                        "variablesReference": self._next_id,
                        "expensive": False,
                    }
                ]
            },
        )
        return False

    def do_variables(self, request) -> bool:
        ref = int(request.get("arguments", {}).get("variablesReference", -1))
        frame = self._var_refs.get(ref)
        if frame is None:
            self.framing.respond(request, success=False, message="unknown reference")
            return False
        named = [
            {"name": name, "value": repr(value), "variablesReference": 0}
            for name, value in sorted(frame.f_locals.items())
            if not name.startswith("__")
        ]
        self.framing.respond(request, {"variables": named})
        return False

    def do_evaluate(self, request) -> bool:
        args = request.get("arguments", {})
        frame = self.frame_by_id(args.get("frameId", -1))
        if frame is None:
            self.framing.respond(request, success=False, message="unknown frame")
            return False
        try:
            value = eval(args.get("expression", ""), frame.f_globals, frame.f_locals)
        except Exception as exc:
            self.framing.respond(request, success=False, message=f"evaluation failed: {exc}")
            return False
        self.framing.respond(request, {"result": repr(value), "variablesReference": 0})
        return False

    def do_setVariable(self, request) -> bool:
        args = request.get("arguments", {})
        frame = self._var_refs.get(int(args.get("variablesReference", -1)))
        if frame is None:
            self.framing.respond(request, success=False, message="unknown reference")
            return False
        name = args.get("name", "")
        try:
            value = eval(args.get("value", ""), frame.f_globals, frame.f_locals)
        except Exception as exc:
            self.framing.respond(request, success=False, message=f"bad value: {exc}")
            return False
        if frame.f_locals is frame.f_globals:
            frame.f_globals[name] = value
        else:
            # Function frame: write through the locals snapshot, then push
            # the snapshot back into the fast-locals slots.
            snapshot = frame.f_locals
            snapshot[name] = value
            ctypes.pythonapi.PyFrame_LocalsToFast(
                ctypes.py_object(frame), ctypes.c_int(1)
            )
        self.framing.respond(request, {"value": repr(value)})
        return False

    def do_disconnect(self, request) -> bool:
        self.framing.respond(request)
        self._shutdown()
        return True


def main() -> int:
    real_stdout = sys.stdout.buffer
    framing = Framing(sys.stdin.buffer, real_stdout)
    # The debuggee's prints must not corrupt the protocol stream.
    sys.stdout = _OutputWriter(framing, "stdout")
    sys.stderr = _OutputWriter(framing, "stderr")
    return Session(framing).serve()


if __name__ == "__main__":
    sys.exit(main())
