"""Benchmark plug-in contract and the candidate stdout wire schema.

A candidate program communicates one result: the final non-empty stdout
line, a JSON object whose schema the active benchmark owns. Benchmarks
are pure and reentrant so they are safe under the worker pool.
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass
from typing import Any, Protocol

from evoloop.errors import PayloadError

# Violation kinds shared by the shipped benchmarks.
OUT_OF_BOUNDS = "out_of_bounds"
OVERLAP = "overlap"
NONPOSITIVE_RADIUS = "nonpositive_radius"
WRONG_COUNT = "wrong_count"
NONFINITE = "nonfinite"


@dataclass(frozen=True)
class Violation:
    kind: str
    indices: tuple[int, ...]
    magnitude: float


@dataclass(frozen=True)
class ValidationReport:
    violations: tuple[Violation, ...]

    @property
    def valid(self) -> bool:
        return not self.violations


class Benchmark(Protocol):
    name: str
    task_description: str

    def parse_payload(self, line: str) -> Any: ...

    def validate(self, payload: Any) -> ValidationReport: ...

    def score(self, payload: Any) -> float: ...

    def metrics(self, payload: Any, report: ValidationReport) -> dict[str, float]: ...

    def diagnostics(self, payload: Any) -> str: ...

    def stub_candidate(self, parent_code: str | None, rng: random.Random,
                       round_index: int) -> tuple[str, str]: ...


def last_payload_line(stdout: str) -> str:
    lines = [line for line in stdout.splitlines() if line.strip()]
    if not lines:
        raise PayloadError("candidate produced no output")
    return lines[-1]


def parse_json_payload(line: str) -> dict[str, Any]:
    try:
        payload = json.loads(line)
    except json.JSONDecodeError as exc:
        raise PayloadError(f"final stdout line is not JSON: {exc}") from exc
    if not isinstance(payload, dict):
        raise PayloadError("payload must be a JSON object")
    return payload


# Stub candidate programs carry their payload as a literal so the stub
# researcher can read a parent's solution straight out of its code.
_PAYLOAD_PREFIX = "PAYLOAD = "


def payload_program(payload: dict[str, Any]) -> str:
    literal = json.dumps(payload, allow_nan=False)
    return (
        "import json\n"
        f"{_PAYLOAD_PREFIX}{literal}\n"
        "print(json.dumps(PAYLOAD))\n"
    )


def extract_payload(code: str) -> dict[str, Any] | None:
    for line in code.splitlines():
        if line.startswith(_PAYLOAD_PREFIX):
            try:
                return json.loads(line[len(_PAYLOAD_PREFIX):])
            except json.JSONDecodeError:
                return None
    return None
