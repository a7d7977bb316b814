"""Session configuration: language entries, runner contracts, defaults.

The on-disk form is a UTF-8 JSON document; relative paths are resolved
against the directory containing the document.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

from .errors import ConfigError
from .values import BUILTIN_PROFILES, ValueTable


def canonical_path(path: str | os.PathLike[str]) -> str:
    """Absolute, symlink-resolved form used for all source comparisons."""
    return str(Path(path).resolve())


@dataclass(frozen=True)
class RunnerContract:
    """Coordinates and control-variable names of one runner file.

    The three breakpoints drive the whole protocol: the polyglot breakpoint
    marks an outgoing cross-language call, the standby breakpoints mark the
    runner sitting idle with the last result readable.
    """

    runner_path: str
    polyglot_bp: tuple[str, int]
    outer_standby_bp: tuple[str, int]
    inner_standby_bp: tuple[str, int]
    var_input: str = "inputCode"
    var_ret: str = "ret"
    var_result: str = "res"
    param_language: str = "language"
    param_code: str = "foreignCode"

    def __post_init__(self) -> None:
        locations = {self.polyglot_bp, self.outer_standby_bp, self.inner_standby_bp}
        if len(locations) != 3:
            raise ConfigError("runner breakpoints must be three distinct locations")
        for name in (
            self.var_input,
            self.var_ret,
            self.var_result,
            self.param_language,
            self.param_code,
        ):
            if not name.isidentifier():
                raise ConfigError(f"runner variable name {name!r} is not an identifier")

    @classmethod
    def from_data(cls, data: dict[str, Any], base_dir: Path) -> RunnerContract:
        try:
            runner_path = canonical_path(base_dir / data["path"])
            return cls(
                runner_path=runner_path,
                polyglot_bp=(runner_path, int(data["polyglot_line"])),
                outer_standby_bp=(runner_path, int(data["outer_standby_line"])),
                inner_standby_bp=(runner_path, int(data["inner_standby_line"])),
                var_input=data.get("var_input", "inputCode"),
                var_ret=data.get("var_ret", "ret"),
                var_result=data.get("var_result", "res"),
                param_language=data.get("param_language", "language"),
                param_code=data.get("param_code", "foreignCode"),
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise ConfigError(f"bad runner contract: {exc}") from exc

    def runner_files(self) -> frozenset[str]:
        return frozenset(
            canonical_path(f)
            for f, _ in (self.polyglot_bp, self.outer_standby_bp, self.inner_standby_bp)
        ) | {canonical_path(self.runner_path)}

    def breakpoint_lines(self) -> dict[str, list[int]]:
        """Breakpoint lines grouped per file, sorted for deterministic sends."""
        grouped: dict[str, list[int]] = {}
        for file, line in (self.polyglot_bp, self.outer_standby_bp, self.inner_standby_bp):
            grouped.setdefault(canonical_path(file), []).append(line)
        return {file: sorted(lines) for file, lines in grouped.items()}


@dataclass(frozen=True)
class AgentConfig:
    """Everything needed to run one per-language debug agent."""

    language_id: str
    file_extensions: tuple[str, ...]
    adapter_command: tuple[str, ...]
    runner: RunnerContract
    transport: str | dict[str, Any] = "stdio"
    source_preprocessor: str | None = None
    launch_args: dict[str, Any] = field(default_factory=dict)
    value_table: ValueTable | None = None
    request_timeout_s: float = 10.0

    def __post_init__(self) -> None:
        if not self.language_id:
            raise ConfigError("language_id must be non-empty")
        if not self.file_extensions:
            raise ConfigError(f"{self.language_id}: file_extensions must be non-empty")
        for ext in self.file_extensions:
            if not ext.startswith("."):
                raise ConfigError(f"{self.language_id}: extension {ext!r} must begin with '.'")
        if not self.adapter_command:
            raise ConfigError(f"{self.language_id}: adapter_command must be non-empty")

    @classmethod
    def from_data(
        cls, data: dict[str, Any], base_dir: Path, defaults: SessionDefaults
    ) -> AgentConfig:
        try:
            runner = RunnerContract.from_data(data["runner"], base_dir)
            table = _resolve_value_table(data.get("values"))
            return cls(
                language_id=data["language_id"],
                file_extensions=tuple(data["extensions"]),
                adapter_command=tuple(data["adapter_command"]),
                runner=runner,
                transport=data.get("transport", "stdio"),
                source_preprocessor=data.get("source_preprocessor"),
                launch_args=data.get("launch_args", {}),
                value_table=table,
                request_timeout_s=float(data.get("timeout_s", defaults.timeout_s)),
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise ConfigError(f"bad language entry: {exc}") from exc


def _resolve_value_table(spec: Any) -> ValueTable | None:
    if spec is None:
        return None
    if isinstance(spec, str):
        table = BUILTIN_PROFILES.get(spec)
        if table is None:
            raise ConfigError(f"unknown value profile {spec!r}")
        return table
    if isinstance(spec, dict):
        return ValueTable.from_data(spec)
    raise ConfigError(f"bad values spec {spec!r}")


@dataclass(frozen=True)
class SessionDefaults:
    timeout_s: float = 10.0
    max_call_depth: int = 64
    eager_start: bool = False


@dataclass(frozen=True)
class SessionConfig:
    languages: tuple[AgentConfig, ...]
    defaults: SessionDefaults = SessionDefaults()

    @classmethod
    def from_data(cls, data: dict[str, Any], base_dir: Path) -> SessionConfig:
        raw_defaults = data.get("defaults", {})
        try:
            defaults = SessionDefaults(
                timeout_s=float(raw_defaults.get("timeout_s", 10.0)),
                max_call_depth=int(raw_defaults.get("max_call_depth", 64)),
                eager_start=bool(raw_defaults.get("eager_start", False)),
            )
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"bad defaults: {exc}") from exc
        entries = data.get("languages")
        if not entries:
            raise ConfigError("config must list at least one language")
        languages = tuple(AgentConfig.from_data(entry, base_dir, defaults) for entry in entries)
        return cls(languages=languages, defaults=defaults)

    @classmethod
    def load(cls, path: str | os.PathLike[str]) -> SessionConfig:
        path = Path(path)
        try:
            data = json.loads(path.read_text(encoding="utf-8"))
        except OSError as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from exc
        except json.JSONDecodeError as exc:
            raise ConfigError(f"config {path} is not valid JSON: {exc}") from exc
        if not isinstance(data, dict):
            raise ConfigError(f"config {path} must hold a JSON object")
        return cls.from_data(data, path.parent.resolve())
