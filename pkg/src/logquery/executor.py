"""Isolated execution of generated scripts plus the output-format contract.

Isolation is layered: static safety checks happen upstream; here each run
gets a fresh scratch working directory (removed afterwards), a minimal
environment, no inherited credentials, and - when the host supports
unprivileged network namespaces - no network, via `unshare -n`.  When no
OS-level denial is available the executor degrades to scratch-cwd
confinement and logs a warning once.  A global semaphore caps concurrent
child processes.
"""

from __future__ import annotations

import logging
import os
import shutil
import signal
import subprocess
import sys
import tempfile
import threading
import time
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

from .errors import InterpreterNotFoundError
from .llm import ColumnSpec, GeneratedScript

__all__ = [
    "STATUSES",
    "ExecutionResult",
    "RetryPolicy",
    "execute",
    "validate_output",
    "set_process_cap",
    "network_denial_prefix",
]

logger = logging.getLogger(__name__)

STATUSES = ("ok", "exec_error", "timeout", "safety_rejected", "format_error")

MAX_RETRIES_CAP = 8  # hard bound on retry budgets
_DIAGNOSTIC_CAP = 100_000  # bytes of captured stderr kept per attempt

INTERPRETERS = {"python": sys.executable or "python3", "bash": "bash"}

_SCRIPT_SUFFIX = {"python": ".py", "bash": ".sh"}


@dataclass(frozen=True)
class ExecutionResult:
    """Terminal outcome of one script run (rows only when status is ok)."""

    status: str
    rows: tuple[str, ...] = ()
    diagnostic: str = ""
    wall_time: float = 0.0

    def __post_init__(self):
        if self.status not in STATUSES:
            raise ValueError(f"status must be one of {STATUSES}")
        if self.status != "ok" and self.rows:
            raise ValueError("rows must be empty unless status is ok")


@dataclass(frozen=True)
class RetryPolicy:
    """Attempt budget and per-attempt wall-clock timeout."""

    max_retries: int = 4
    timeout_seconds: float = 1200.0

    def __post_init__(self):
        if not 0 <= self.max_retries <= MAX_RETRIES_CAP:
            raise ValueError(f"max_retries must be between 0 and {MAX_RETRIES_CAP}")
        if self.timeout_seconds <= 0:
            raise ValueError("timeout_seconds must be positive")


_probe_lock = threading.Lock()
_probe_result: list[str] | None = None
_degradation_logged = False

_process_slots = threading.BoundedSemaphore(max(4, os.cpu_count() or 4))


def set_process_cap(cap: int) -> None:
    """Replace the global concurrent-child cap; call only while idle."""
    global _process_slots
    if cap < 1:
        raise ValueError("process cap must be >= 1")
    _process_slots = threading.BoundedSemaphore(cap)


def network_denial_prefix() -> list[str]:
    """Command prefix denying network access, probed once per process.

    Empty when the host offers no unprivileged network namespace; the
    degradation is logged once and execution proceeds with scratch-cwd
    confinement only.
    """
    global _probe_result, _degradation_logged
    with _probe_lock:
        if _probe_result is not None:
            return list(_probe_result)
        for prefix in (["unshare", "-n"], ["unshare", "-n", "--map-root-user"]):
            try:
                probe = subprocess.run(
                    prefix + ["true"], capture_output=True, timeout=10, check=False
                )
            except (OSError, subprocess.SubprocessError):
                continue
            if probe.returncode == 0:
                _probe_result = prefix
                return list(prefix)
        _probe_result = []
        if not _degradation_logged:
            logger.warning(
                "no OS-level network denial available; running scripts with scratch-cwd confinement only"
            )
            _degradation_logged = True
        return []


def _child_env(scratch: str) -> dict[str, str]:
    # minimal environment: no credentials leak into generated code
    return {
        "PATH": os.environ.get("PATH", "/usr/bin:/bin"),
        "LANG": "C.UTF-8",
        "HOME": scratch,
        "TMPDIR": scratch,
        "PYTHONDONTWRITEBYTECODE": "1",
    }


def execute(
    script: GeneratedScript,
    log: str | Path,
    policy: RetryPolicy,
    interpreter: str | None = None,
) -> ExecutionResult:
    """Run one already-safety-checked script against one log file."""
    interp = interpreter or INTERPRETERS[script.language]
    # resolve upfront: under a wrapper like unshare a missing interpreter
    # would otherwise surface as exit status 127 instead of a clear error
    resolved = shutil.which(interp)
    if resolved is None:
        raise InterpreterNotFoundError(f"interpreter not found: {interp}")
    scratch = tempfile.mkdtemp(prefix="logquery-scratch-")
    try:
        script_path = Path(scratch) / f"script{_SCRIPT_SUFFIX[script.language]}"
        script_path.write_text(script.code, encoding="utf-8")
        cmd = network_denial_prefix() + [resolved, str(script_path), str(Path(log).resolve())]
        start = time.monotonic()
        with _process_slots:
            try:
                child = subprocess.Popen(
                    cmd,
                    cwd=scratch,
                    env=_child_env(scratch),
                    stdout=subprocess.PIPE,
                    stderr=subprocess.PIPE,
                    start_new_session=True,
                )
            except FileNotFoundError as exc:
                raise InterpreterNotFoundError(f"interpreter not found: {cmd[0]}") from exc
            try:
                out, err = child.communicate(timeout=policy.timeout_seconds)
            except subprocess.TimeoutExpired:
                _kill_tree(child)
                wall = time.monotonic() - start
                return ExecutionResult(
                    status="timeout",
                    diagnostic=f"wall-clock timeout after {policy.timeout_seconds} s",
                    wall_time=wall,
                )
        wall = time.monotonic() - start
        if child.returncode != 0:
            diagnostic = err.decode("utf-8", errors="replace")[:_DIAGNOSTIC_CAP]
            return ExecutionResult(
                status="exec_error",
                diagnostic=f"exit status {child.returncode}\n{diagnostic}",
                wall_time=wall,
            )
        rows = tuple(out.decode("utf-8", errors="replace").splitlines())
        return ExecutionResult(status="ok", rows=rows, wall_time=wall)
    finally:
        shutil.rmtree(scratch, ignore_errors=True)


def _kill_tree(child: subprocess.Popen) -> None:
    try:
        os.killpg(os.getpgid(child.pid), signal.SIGKILL)
    except (ProcessLookupError, PermissionError):
        child.kill()
    child.communicate()


def validate_output(rows: Sequence[str], spec: Sequence[ColumnSpec]) -> str | None:
    """Check rows against the output contract; None when they conform.

    A row splits on tabs when it contains one, else on whitespace runs; a
    trailing string column absorbs any extra fields; integer/float columns
    must parse; timestamp_text means nonempty.  The first violating row is
    reported.
    """
    width = len(spec)
    for number, row in enumerate(rows, start=1):
        if "\t" in row:
            fields = row.split("\t", width - 1) if spec[-1].dtype == "string" else row.split("\t")
        else:
            fields = row.split(None, width - 1) if spec[-1].dtype == "string" else row.split()
        if len(fields) != width:
            return f"row {number}: expected {width} columns, got {len(fields)}"
        for column, value in zip(spec, fields):
            if column.dtype == "integer":
                try:
                    int(value)
                except ValueError:
                    return f"row {number}: column {column.name} is not an integer: {value!r}"
            elif column.dtype == "float":
                try:
                    float(value)
                except ValueError:
                    return f"row {number}: column {column.name} is not a float: {value!r}"
            elif column.dtype == "timestamp_text":
                if not value:
                    return f"row {number}: column {column.name} is empty"
    return None
