"""Subprocess entry point: serve a scripted scenario over stdio or TCP."""

from __future__ import annotations

import argparse
import json
import socket
import sys

from . import MockDapServer, Scenario


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(prog="polydap-mockdap")
    parser.add_argument("--scenario", required=True, help="scenario JSON file")
    parser.add_argument("--transcript", help="write the transcript JSON here on exit")
    parser.add_argument("--port", type=int, help="listen on TCP instead of stdio")
    args = parser.parse_args(argv)

    scenario = Scenario.load(args.scenario)
    server = MockDapServer(scenario)

    if args.port is not None:
        listener = socket.create_server(("127.0.0.1", args.port))
        conn, _ = listener.accept()
        with conn:
            transcript = server.serve(conn.makefile("rb"), conn.makefile("wb"))
        listener.close()
    else:
        transcript = server.serve(sys.stdin.buffer, sys.stdout.buffer)

    if args.transcript:
        with open(args.transcript, "w", encoding="utf-8") as fh:
            json.dump(transcript.to_data(), fh, ensure_ascii=False, indent=2)
    if transcript.failure is not None:
        print(f"scenario failure: {transcript.failure}", file=sys.stderr)
        return 3
    return 0


if __name__ == "__main__":
    sys.exit(main())
