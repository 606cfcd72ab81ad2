"""Isolated code execution: child process, hard limits, capped output.

Isolation is an OS child process with rlimits plus a harness that denies
network access; a container-runner backend can be plugged in at deployment
for stronger isolation without changing this contract.
"""

from __future__ import annotations

import os
import shutil
import subprocess
import sys
import threading
import time
from dataclasses import dataclass
from pathlib import Path

from .. import errors
from ..errors import PlatformError

HARNESS = Path(__file__).parent / "_harness.py"
KILL_GRACE_S = 1.0

EXIT_OK = "ok"
KILLED_TIME = "killed:time_limit"
KILLED_MEMORY = "killed:memory_limit"
KILLED_OUTPUT = "killed:output_limit"

NETWORK_DENIED = "denied"
NETWORK_ALLOW = "allow"


class InterpreterMissing(PlatformError):
    category = errors.INTERPRETER_MISSING


@dataclass(frozen=True)
class SandboxLimits:
    wall_clock_s: float = 10.0
    memory_bytes: int = 512 * 1024 * 1024
    output_cap: int = 64 * 1024
    network: str = NETWORK_DENIED
    allowed_hosts: tuple[str, ...] = ()

    def __post_init__(self):
        if self.wall_clock_s <= 0 or self.memory_bytes <= 0 or self.output_cap <= 0:
            raise ValueError("sandbox limits must be strictly positive")


@dataclass
class RawExecution:
    stdout: str
    stderr: str
    exit: str  # "ok" | "nonzero:<code>" | "killed:<limit>"
    exit_code: int | None
    elapsed_s: float

    @property
    def ok(self) -> bool:
        return self.exit == EXIT_OK


def probe_interpreter() -> None:
    """Startup check: the sandbox interpreter must be able to run at all."""
    exe = sys.executable
    if not exe or not shutil.which(exe):
        raise InterpreterMissing("no python interpreter available for the sandbox")
    proc = subprocess.run([exe, "-I", "-c", "print(1)"], capture_output=True, timeout=20)
    if proc.returncode != 0:
        raise InterpreterMissing(f"interpreter probe failed: {proc.stderr.decode()[:200]}")


class _CappedReader(threading.Thread):
    """Drains a pipe, keeping at most cap bytes; flags when the cap is crossed."""

    def __init__(self, pipe, cap: int):
        super().__init__(daemon=True)
        self.pipe = pipe
        self.cap = cap
        self.data = b""
        self.overflowed = False

    def run(self):
        try:
            while True:
                chunk = self.pipe.read(8192)
                if not chunk:
                    return
                if not self.overflowed:
                    room = self.cap - len(self.data)
                    self.data += chunk[:room]
                    if len(chunk) > room:
                        self.overflowed = True
        except (OSError, ValueError):
            return


def run_python(code: str, limits: SandboxLimits, workdir: str | Path, inputs_dir: str | Path | None = None) -> RawExecution:
    """Run python source in a fresh child process under the given limits.

    The child's cwd is workdir (the outputs surface); inputs_dir, when given,
    is exposed read-only via the AGENTHOST_INPUTS env var.
    """
    workdir = Path(workdir)
    workdir.mkdir(parents=True, exist_ok=True)
    code_path = workdir / ".agenthost_run.py"
    code_path.write_text(code, encoding="utf-8")
    env = {
        "PATH": os.environ.get("PATH", "/usr/bin:/bin"),
        "AGENTHOST_MEMORY_BYTES": str(limits.memory_bytes),
        "AGENTHOST_NETWORK": limits.network,
        "HOME": str(workdir),
    }
    if inputs_dir is not None:
        env["AGENTHOST_INPUTS"] = str(inputs_dir)

    start = time.monotonic()
    proc = subprocess.Popen(
        [sys.executable, "-I", str(HARNESS), str(code_path)],
        cwd=str(workdir),
        env=env,
        stdout=subprocess.PIPE,
        stderr=subprocess.PIPE,
        start_new_session=True,  # isolate the process group so cleanup kills children too
    )
    out_reader = _CappedReader(proc.stdout, limits.output_cap)
    err_reader = _CappedReader(proc.stderr, limits.output_cap)
    out_reader.start()
    err_reader.start()

    deadline = start + limits.wall_clock_s
    killed: str | None = None
    while True:
        if proc.poll() is not None:
            break
        if out_reader.overflowed or err_reader.overflowed:
            killed = KILLED_OUTPUT
            break
        if time.monotonic() > deadline:
            killed = KILLED_TIME
            break
        time.sleep(0.01)

    if killed is not None:
        _kill_group(proc)
    proc.wait(timeout=KILL_GRACE_S + 5)
    out_reader.join(timeout=2)
    err_reader.join(timeout=2)
    elapsed = time.monotonic() - start
    code_path.unlink(missing_ok=True)

    if killed is None and (out_reader.overflowed or err_reader.overflowed):
        # the child finished before the watchdog saw the flood; the cap was
        # still violated, so the classification must say so
        killed = KILLED_OUTPUT
    stdout = out_reader.data.decode("utf-8", "replace")
    stderr = err_reader.data.decode("utf-8", "replace")
    if killed is None and proc.returncode != 0 and "MemoryError" in stderr:
        killed = KILLED_MEMORY
    if killed is not None:
        return RawExecution(stdout, stderr, killed, proc.returncode, elapsed)
    if proc.returncode == 0:
        return RawExecution(stdout, stderr, EXIT_OK, 0, elapsed)
    return RawExecution(stdout, stderr, f"nonzero:{proc.returncode}", proc.returncode, elapsed)


def _kill_group(proc: subprocess.Popen) -> None:
    import signal

    try:
        os.killpg(proc.pid, signal.SIGKILL)
    except (ProcessLookupError, PermissionError):
        try:
            proc.kill()
        except ProcessLookupError:
            pass
