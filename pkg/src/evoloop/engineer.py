"""Sandboxed candidate execution: child processes, wall-clock kills, retries.

Isolation is a fresh working directory plus an environment allowlist and a
hard kill of the candidate's process group at the timeout (2 s of grace
after polite termination). Timeouts fail immediately; nonzero exits and
malformed payloads are retried up to ``engineer_retries`` times, rerunning
the identical program. Spawn problems raise InfrastructureError and are
never recorded as candidate scores.
"""

from __future__ import annotations

import os
import signal
import subprocess
import sys
import threading
import time
from dataclasses import dataclass, field
from pathlib import Path
from evoloop.benchmarks.base import Benchmark, last_payload_line
from evoloop.errors import InfrastructureError, PayloadError
from evoloop.types import EvalResult, ProgramArtifact
from evoloop.util import truncate_middle

GRACE_S = 2.0
QUICK_TIMEOUT_CAP_S = 30.0
CAPTURE_CAP = 1 << 20  # per stream; head and tail preserved
DEFAULT_INTERPRETER = (sys.executable, "{program}")

# Environment variables inherited by candidates when present.
_ENV_ALLOWLIST = ("PATH", "HOME", "LANG", "LC_ALL", "TMPDIR")


@dataclass(frozen=True)
class ExecutionSpec:
    program: ProgramArtifact
    interpreter_command: tuple[str, ...] = DEFAULT_INTERPRETER
    workdir: str = "."
    timeout_s: int = 300
    env: dict[str, str] = field(default_factory=dict)
    quick_test: bool = False
    filename: str = "candidate.py"

    def __post_init__(self):
        if self.timeout_s <= 0:
            raise InfrastructureError("timeout_s must be positive")
        if not self.interpreter_command:
            raise InfrastructureError("interpreter_command must be non-empty")


class ProcessRegistry:
    """Live process groups, so a pool shutdown can kill in-flight children.

    Once closed, every registered group is killed, late registrations are
    killed on arrival, and pending retries stop: a shutdown cannot be
    outlived by respawned candidates.
    """

    def __init__(self):
        self._pgids: set[int] = set()
        self._lock = threading.Lock()
        self._closed = False

    @property
    def closed(self) -> bool:
        return self._closed

    def register(self, pgid: int) -> None:
        with self._lock:
            self._pgids.add(pgid)
            if self._closed:
                _kill_group(pgid, signal.SIGKILL)

    def unregister(self, pgid: int) -> None:
        with self._lock:
            self._pgids.discard(pgid)

    def kill_all(self) -> None:
        with self._lock:
            self._closed = True
            pgids = list(self._pgids)
        for pgid in pgids:
            _kill_group(pgid, signal.SIGKILL)


def _kill_group(pgid: int, sig: int) -> None:
    try:
        os.killpg(pgid, sig)
    except ProcessLookupError:
        pass


@dataclass(frozen=True)
class _Attempt:
    stdout: str
    stderr: str
    returncode: int
    runtime_s: float
    timed_out: bool


def _candidate_env(spec: ExecutionSpec, quick: bool) -> dict[str, str]:
    env = {name: os.environ[name] for name in _ENV_ALLOWLIST if name in os.environ}
    env["PYTHONHASHSEED"] = "0"
    env.update(spec.env)
    if quick:
        env["QUICK"] = "1"
    return env


def _run_once(spec: ExecutionSpec, *, quick: bool, registry: ProcessRegistry | None) -> _Attempt:
    workdir = Path(spec.workdir)
    workdir.mkdir(parents=True, exist_ok=True)
    program_path = workdir / spec.filename
    program_path.write_text(spec.program.code, encoding="utf-8")

    if any("{program}" in arg for arg in spec.interpreter_command):
        argv = [arg.replace("{program}", str(program_path)) for arg in spec.interpreter_command]
    else:
        argv = [*spec.interpreter_command, str(program_path)]

    timeout = min(QUICK_TIMEOUT_CAP_S, spec.timeout_s / 10) if quick else float(spec.timeout_s)
    start = time.monotonic()
    try:
        proc = subprocess.Popen(
            argv,
            cwd=workdir,
            env=_candidate_env(spec, quick),
            stdout=subprocess.PIPE,
            stderr=subprocess.PIPE,
            text=True,
            start_new_session=True,  # own process group, so killpg reaps grandchildren
        )
    except OSError as exc:
        raise InfrastructureError(f"failed to spawn {argv[0]!r}: {exc}") from exc

    pgid = proc.pid
    if registry is not None:
        registry.register(pgid)
    timed_out = False
    try:
        try:
            stdout, stderr = proc.communicate(timeout=timeout)
        except subprocess.TimeoutExpired:
            timed_out = True
            _kill_group(pgid, signal.SIGTERM)
            try:
                stdout, stderr = proc.communicate(timeout=GRACE_S)
            except subprocess.TimeoutExpired:
                _kill_group(pgid, signal.SIGKILL)
                stdout, stderr = proc.communicate()
    finally:
        if registry is not None:
            registry.unregister(pgid)

    return _Attempt(
        stdout=truncate_middle(stdout or "", CAPTURE_CAP),
        stderr=truncate_middle(stderr or "", CAPTURE_CAP),
        returncode=proc.returncode,
        runtime_s=time.monotonic() - start,
        timed_out=timed_out,
    )


def _score_attempt(attempt: _Attempt, benchmark: Benchmark) -> EvalResult | None:
    """Turn a clean exit into an EvalResult; None means retryable failure."""
    if attempt.returncode != 0:
        return None
    try:
        payload = benchmark.parse_payload(last_payload_line(attempt.stdout))
    except PayloadError:
        return None
    report = benchmark.validate(payload)
    return EvalResult(
        metrics=benchmark.metrics(payload, report),
        primary_score=benchmark.score(payload),
        success=True,
        runtime_s=attempt.runtime_s,
        stdout=attempt.stdout,
        stderr=attempt.stderr,
        timed_out=False,
    )


def evaluate(spec: ExecutionSpec, benchmark: Benchmark, *, retries: int = 2,
             registry: ProcessRegistry | None = None) -> EvalResult:
    """Run a candidate to completion: initial attempt plus up to ``retries``
    identical reruns on nonzero exit or malformed payload. A timeout fails
    immediately with score 0."""
    attempt = None
    for _ in range(retries + 1):
        if registry is not None and registry.closed:
            raise InfrastructureError("evaluation pool was shut down")
        attempt = _run_once(spec, quick=False, registry=registry)
        if attempt.timed_out:
            return EvalResult(
                metrics={}, primary_score=0.0, success=False,
                runtime_s=attempt.runtime_s, stdout=attempt.stdout,
                stderr=attempt.stderr, timed_out=True,
            )
        result = _score_attempt(attempt, benchmark)
        if result is not None:
            return result
    return EvalResult(
        metrics={}, primary_score=0.0, success=False,
        runtime_s=attempt.runtime_s, stdout=attempt.stdout,
        stderr=attempt.stderr, timed_out=False,
    )


def quick_test(spec: ExecutionSpec, benchmark: Benchmark, *,
               registry: ProcessRegistry | None = None) -> tuple[bool, EvalResult]:
    """Reduced-budget pre-run (QUICK=1, timeout = min(30 s, timeout/10)).

    Passes only if the candidate exits cleanly with a payload the benchmark
    certifies valid; a failed quick test rejects the candidate without a
    full run."""
    attempt = _run_once(spec, quick=True, registry=registry)
    failed = EvalResult(
        metrics={}, primary_score=0.0, success=False,
        runtime_s=attempt.runtime_s, stdout=attempt.stdout,
        stderr=attempt.stderr, timed_out=attempt.timed_out,
    )
    if attempt.timed_out or attempt.returncode != 0:
        return False, failed
    try:
        payload = benchmark.parse_payload(last_payload_line(attempt.stdout))
    except PayloadError:
        return False, failed
    report = benchmark.validate(payload)
    if not report.valid:
        return False, failed
    result = EvalResult(
        metrics=benchmark.metrics(payload, report),
        primary_score=benchmark.score(payload),
        success=True,
        runtime_s=attempt.runtime_s,
        stdout=attempt.stdout,
        stderr=attempt.stderr,
        timed_out=False,
    )
    return True, result
