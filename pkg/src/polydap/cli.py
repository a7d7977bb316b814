"""Command-line entry points: serve, run, bench.

All logging goes to stderr; stdout carries the debuggee's output (run) or
nothing (serve over stdio, where stdout belongs to the protocol).
"""

from __future__ import annotations

import argparse
import logging
import os
import sys
import tempfile

from .bench import BenchSpec, measure_overhead
from .config import SessionConfig
from .coordinator import Coordinator, SessionPhase
from .errors import PolydapError
from .server import DapServer
from .wire import DapMessage

log = logging.getLogger("polydap")


def _setup_logging() -> None:
    level_name = os.environ.get("POLYDAP_LOG", "warning").upper()
    level = getattr(logging, level_name, logging.WARNING)
    logging.basicConfig(
        stream=sys.stderr,
        level=level,
        format="%(asctime)s %(levelname)s %(name)s %(message)s",
    )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="polydap",
        description="Polyglot debugger backend speaking the Debug Adapter Protocol",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    serve = sub.add_parser("serve", help="expose the client debug endpoint")
    serve.add_argument("--config", required=True, help="session config JSON")
    group = serve.add_mutually_exclusive_group()
    group.add_argument("--stdio", action="store_true", help="serve on stdio (default)")
    group.add_argument("--port", type=int, help="listen on a TCP port")

    run = sub.add_parser("run", help="run a session headless to completion")
    run.add_argument("--config", required=True, help="session config JSON")
    run.add_argument("entry", help="entry program file")
    run.add_argument("--timeout", type=float, default=300.0, help="session timeout seconds")

    bench = sub.add_parser("bench", help="measure per-polyglot-call overhead")
    bench.add_argument("--config", required=True, help="session config JSON")
    bench.add_argument("--caller", required=True, help="caller language id")
    bench.add_argument("--callee", required=True, help="callee language id")
    bench.add_argument(
        "--ladder", default="1,2,5,10", help="comma-separated iteration counts"
    )
    bench.add_argument("--reps", type=int, default=10, help="repetitions per point")
    bench.add_argument("--out", help="CSV output path")
    bench.add_argument("--workdir", help="directory for generated programs")
    return parser


def run_headless(config: SessionConfig, entry: str, timeout_s: float = 300.0) -> int:
    """Drive one session with no client attached; prints debuggee output."""

    def sink(name: str, body: dict) -> None:
        if name == "output":
            stream = sys.stderr if body.get("category") == "stderr" else sys.stdout
            stream.write(body.get("output", ""))
            stream.flush()

    coordinator = Coordinator(config, event_sink=sink)
    try:
        coordinator.launch_session(entry)
        while coordinator.phase is not SessionPhase.TERMINATED:
            coordinator.pump(timeout_s=timeout_s)
            if coordinator.phase is SessionPhase.STOPPED:
                # Headless sessions have no user; ride through any stop.
                log.warning("headless session stopped; continuing")
                coordinator.route_client_request(
                    DapMessage.request(1, "continue", {"threadId": 1})
                )
        value = coordinator.final_value
        if value is not None:
            log.info("final value: %s %r", value.kind.value, value.lexical)
            return 0
        return 1
    finally:
        coordinator.shutdown()


def main(argv: list[str] | None = None) -> int:
    _setup_logging()
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        config = SessionConfig.load(args.config)
        if args.command == "serve":
            server = DapServer(config)
            if args.port is not None:
                server.serve_tcp(args.port, once=False)
            else:
                server.serve_stdio()
            return 0
        if args.command == "run":
            return run_headless(config, args.entry, timeout_s=args.timeout)
        if args.command == "bench":
            ladder = [int(tok) for tok in args.ladder.split(",") if tok.strip()]
            spec = BenchSpec(
                caller_language=args.caller,
                callee_language=args.callee,
                iterations=ladder[0] if ladder else 1,
                repetitions=args.reps,
                output=args.out,
            )
            workdir = args.workdir or tempfile.mkdtemp(prefix="polydap-bench-")
            report = measure_overhead(
                lambda n: Coordinator(config), spec, ladder, workdir
            )
            print(report.summary())
            print(
                "note: real adapters typically cost tenths of a second per call; "
                "scripted mock backends are far cheaper"
            )
            return 0
    except PolydapError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except KeyboardInterrupt:
        return 130
    return 0


if __name__ == "__main__":
    sys.exit(main())
