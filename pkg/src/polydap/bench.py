"""Stress harness: measure per-call overhead of cross-language calls.

Generates a caller that performs n polyglot calls in a loop, runs it for a
ladder of n values, and fits wall time = a + b*n by least squares. The
slope b is the per-call overhead; linearity (R^2) is the sanity check.
"""

from __future__ import annotations

import csv
import logging
import statistics
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable

from .coordinator import Coordinator, SessionPhase
from .errors import ConfigError, InputError, PolydapError

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class BenchSpec:
    caller_language: str
    callee_language: str
    iterations: int
    repetitions: int = 10
    output: str | None = None

    def __post_init__(self) -> None:
        if self.iterations < 1:
            raise InputError("iterations must be >= 1")
        if self.repetitions < 1:
            raise InputError("repetitions must be >= 1")


@dataclass(frozen=True)
class StressTemplate:
    extension: str
    caller: str  # format fields: n, callee_language, callee_file
    callee: str


STRESS_TEMPLATES: dict[str, StressTemplate] = {
    "python": StressTemplate(
        extension=".py",
        caller=(
            "i = 0\n"
            "r = None\n"
            "while i < {n}:\n"
            '    r = polyglotEval("{callee_language}", "{callee_file}")\n'
            "    i = i + 1\n"
            "r\n"
        ),
        callee="40 + 2\n",
    ),
    "javascript": StressTemplate(
        extension=".js",
        caller=(
            "var i = 0;\n"
            "var r = null;\n"
            "while (i < {n}) {{\n"
            '    r = polyglotEval("{callee_language}", "{callee_file}");\n'
            "    i = i + 1;\n"
            "}}\n"
            "r;\n"
        ),
        callee="40 + 2;\n",
    ),
}


def generate_stress_program(spec: BenchSpec, out_dir: str | Path) -> tuple[Path, Path]:
    """Write the caller/callee pair for one ladder point; returns their paths."""
    caller_tpl = STRESS_TEMPLATES.get(spec.caller_language)
    callee_tpl = STRESS_TEMPLATES.get(spec.callee_language)
    if caller_tpl is None:
        raise ConfigError(f"no stress template for language {spec.caller_language!r}")
    if callee_tpl is None:
        raise ConfigError(f"no stress template for language {spec.callee_language!r}")
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    callee_file = out / f"stress_callee{callee_tpl.extension}"
    callee_file.write_text(callee_tpl.callee, encoding="utf-8")
    caller_file = out / f"stress_caller_n{spec.iterations}{caller_tpl.extension}"
    caller_file.write_text(
        caller_tpl.caller.format(
            n=spec.iterations,
            callee_language=spec.callee_language,
            callee_file=callee_file.name,
        ),
        encoding="utf-8",
    )
    return caller_file, callee_file


@dataclass
class LadderPoint:
    n: int
    times: list[float] = field(default_factory=list)

    @property
    def mean(self) -> float:
        return statistics.fmean(self.times)


@dataclass
class OverheadReport:
    caller_language: str
    callee_language: str
    per_call_s: float
    base_s: float
    r_squared: float
    points: list[LadderPoint]

    def summary(self) -> str:
        ladder = ", ".join(f"n={p.n}: {p.mean:.4f}s" for p in self.points)
        return (
            f"{self.caller_language}->{self.callee_language}: "
            f"per-call overhead {self.per_call_s:.4f}s, base {self.base_s:.4f}s, "
            f"R^2={self.r_squared:.4f} ({ladder})"
        )


def measure_overhead(
    make_coordinator: Callable[[int], Coordinator],
    spec: BenchSpec,
    ladder: list[int],
    workdir: str | Path,
    *,
    entry_for: Callable[[int], str] | None = None,
    session_timeout_s: float = 120.0,
) -> OverheadReport:
    """Run the ladder and fit wall time against n.

    `make_coordinator` builds a fresh coordinator for one ladder point (so a
    scripted backend can be sized to n); agents are pre-started so adapter
    startup stays out of the timed window. `entry_for` overrides the entry
    file per n (defaults to the generated stress caller).
    """
    if len(ladder) < 2:
        raise InputError("ladder needs at least two points for a fit")
    rows: list[tuple[str, str, int, int, float]] = []
    points: list[LadderPoint] = []
    for n in ladder:
        point_spec = BenchSpec(
            spec.caller_language, spec.callee_language, n, spec.repetitions, spec.output
        )
        if entry_for is not None:
            entry = entry_for(n)
        else:
            caller_file, _ = generate_stress_program(point_spec, workdir)
            entry = str(caller_file)
        coordinator = make_coordinator(n)
        point = LadderPoint(n)
        try:
            coordinator.resolve_agent(spec.caller_language)
            coordinator.resolve_agent(spec.callee_language)
            for rep in range(spec.repetitions):
                started = time.monotonic()
                coordinator.launch_session(entry)
                coordinator.pump(timeout_s=session_timeout_s)
                elapsed = time.monotonic() - started
                if coordinator.phase is not SessionPhase.TERMINATED:
                    raise PolydapError(
                        f"bench aborted: session did not terminate at n={n} "
                        f"(phase {coordinator.phase.value})"
                    )
                point.times.append(elapsed)
                rows.append(
                    (spec.caller_language, spec.callee_language, n, rep, elapsed)
                )
                coordinator.reset_session()
        finally:
            coordinator.shutdown()
        points.append(point)
        log.info("bench n=%d mean %.4fs over %d reps", n, point.mean, spec.repetitions)

    ns = [float(p.n) for p in points]
    means = [p.mean for p in points]
    fit = statistics.linear_regression(ns, means)
    r = statistics.correlation(ns, means)
    report = OverheadReport(
        caller_language=spec.caller_language,
        callee_language=spec.callee_language,
        per_call_s=fit.slope,
        base_s=fit.intercept,
        r_squared=r * r,
        points=points,
    )
    if spec.output:
        write_csv(spec.output, rows)
    return report


def write_csv(path: str, rows: list[tuple[str, str, int, int, float]]) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["caller", "callee", "n", "repetition", "wall_seconds"])
        writer.writerows(rows)
