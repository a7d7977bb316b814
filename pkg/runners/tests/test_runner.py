"""Unit tests for the Python runner's execution semantics and its contract."""

from __future__ import annotations

import hashlib
import importlib.util
import json
from pathlib import Path

import pytest

RUNNER_DIR = Path(__file__).resolve().parents[1] / "python"
RUNNER_PATH = RUNNER_DIR / "polyglot_runner.py"
CONTRACT_PATH = RUNNER_DIR / "contract.json"


@pytest.fixture
def runner():
    """Import the runner as a module (the main loop only runs as a script)."""
    spec = importlib.util.spec_from_file_location("runner_under_test", RUNNER_PATH)
    module = importlib.util.module_from_spec(spec)
    spec.loader.exec_module(module)
    return module


def write(tmp_path: Path, name: str, text: str) -> str:
    path = tmp_path / name
    path.write_text(text, encoding="utf-8")
    return str(path)


def test_trailing_expression_becomes_result(runner, tmp_path):
    path = write(tmp_path, "prog.py", "x = 40\nx + 2\n")
    assert runner._run_file(path) == 42


def test_no_trailing_expression_yields_none(runner, tmp_path):
    path = write(tmp_path, "prog.py", "x = 1\n")
    assert runner._run_file(path) is None


def test_errors_become_tagged_values(runner, tmp_path):
    path = write(tmp_path, "boom.py", "1 / 0\n")
    result = runner._run_guarded(path)
    assert isinstance(result, str)
    assert result.startswith("<polyglot-error> ZeroDivisionError")


def test_scope_persists_across_executions(runner, tmp_path):
    write_path = write(tmp_path, "a.py", "shared = 5\n")
    read_path = write(tmp_path, "b.py", "shared + 1\n")
    runner._run_file(write_path)
    assert runner._run_file(read_path) == 6


def test_polyglot_eval_visible_to_executed_code(runner, tmp_path):
    path = write(tmp_path, "probe.py", "callable(polyglotEval)\n")
    assert runner._run_file(path) is True


def test_contract_checksum_binds_file():
    contract = json.loads(CONTRACT_PATH.read_text(encoding="utf-8"))
    digest = hashlib.sha256(RUNNER_PATH.read_bytes()).hexdigest()
    assert contract["runner"]["sha256"] == digest, (
        "runner file changed: update contract.json lines and checksum together"
    )


def test_contract_lines_point_at_the_marked_statements():
    contract = json.loads(CONTRACT_PATH.read_text(encoding="utf-8"))["runner"]
    lines = RUNNER_PATH.read_text(encoding="utf-8").splitlines()

    polyglot = lines[contract["polyglot_line"] - 1]
    assert "polyglot breakpoint" in polyglot
    inner = lines[contract["inner_standby_line"] - 1]
    assert "inner standby" in inner
    assert f"{contract['var_input']} = {contract['var_input']}" in inner
    outer = lines[contract["outer_standby_line"] - 1]
    assert "outer standby" in outer
    assert f"{contract['var_input']} = {contract['var_input']}" in outer

    # The polyglot function's signature carries the documented names.
    signature = next(line for line in lines if line.startswith("def polyglotEval"))
    for name in (contract["param_language"], contract["param_code"], contract["var_ret"]):
        assert name in signature
