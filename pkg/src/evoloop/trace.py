"""Run trace: per-round records plus the config snapshot and seed.

Same line-delimited JSON discipline as the state file. The trace is the
run's public record: evolution curves export from it and resume uses it
(together with the node log) to find the last completed round.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

from evoloop.errors import StateError

TRACE_FORMAT = "evoloop-trace"
TRACE_VERSION = 1


@dataclass(frozen=True)
class RoundRecord:
    round: int
    parent_id: int | None
    node_id: int
    score: float
    best_so_far: float
    runtime_s: float
    failure_reason: str | None = None

    def to_dict(self) -> dict[str, Any]:
        return {
            "kind": "round",
            "round": self.round,
            "parent_id": self.parent_id,
            "node_id": self.node_id,
            "score": self.score,
            "best_so_far": self.best_so_far,
            "runtime_s": self.runtime_s,
            "failure_reason": self.failure_reason,
        }

    @classmethod
    def from_dict(cls, d: dict[str, Any]) -> "RoundRecord":
        return cls(
            round=d["round"],
            parent_id=d["parent_id"],
            node_id=d["node_id"],
            score=d["score"],
            best_so_far=d["best_so_far"],
            runtime_s=d["runtime_s"],
            failure_reason=d.get("failure_reason"),
        )


@dataclass
class RunTrace:
    seed: int
    benchmark: str
    config: dict[str, Any]
    rows: list[RoundRecord] = field(default_factory=list)
    flags: dict[str, Any] = field(default_factory=dict)

    def best_score(self) -> float:
        return self.rows[-1].best_so_far if self.rows else 0.0

    def check_invariants(self) -> None:
        best = -float("inf")
        for expected, row in enumerate(self.rows, start=1):
            if row.round != expected:
                raise StateError(expected, f"round indices not contiguous: saw {row.round}")
            if row.best_so_far + 1e-15 < best:
                raise StateError(expected, "best_so_far decreased")
            best = row.best_so_far


def trace_header(seed: int, benchmark: str, config_flat: dict[str, Any],
                 flags: dict[str, Any] | None = None) -> dict[str, Any]:
    return {
        "kind": "header",
        "format": TRACE_FORMAT,
        "version": TRACE_VERSION,
        "seed": seed,
        "benchmark": benchmark,
        "flags": dict(sorted((flags or {}).items())),
        "config": dict(sorted(config_flat.items())),
    }


class TraceLog:
    """Append-only trace file; one fsynced JSON line per completed round."""

    def __init__(self, path: str | Path, header: dict[str, Any] | None = None):
        self.path = Path(path)
        if not self.path.exists():
            if header is None:
                raise StateError(0, f"trace {self.path} does not exist and no header was given")
            self.path.parent.mkdir(parents=True, exist_ok=True)
            with self.path.open("w", encoding="utf-8") as fh:
                fh.write(json.dumps(header, allow_nan=False) + "\n")

    def append(self, row: RoundRecord) -> None:
        with self.path.open("a", encoding="utf-8") as fh:
            fh.write(json.dumps(row.to_dict(), allow_nan=False) + "\n")
            fh.flush()
            os.fsync(fh.fileno())


def read_trace(path: str | Path, *, recover: bool = False) -> RunTrace:
    lines = Path(path).read_text(encoding="utf-8").splitlines()
    if not lines:
        raise StateError(0, "empty trace file")
    try:
        header = json.loads(lines[0])
    except json.JSONDecodeError as exc:
        raise StateError(0, f"unreadable trace header: {exc}") from exc
    if header.get("format") != TRACE_FORMAT:
        raise StateError(0, "not a trace file")
    rows: list[RoundRecord] = []
    for index, line in enumerate(lines[1:], start=1):
        if not line.strip():
            continue
        try:
            raw = json.loads(line)
            rows.append(RoundRecord.from_dict(raw))
        except (ValueError, KeyError, TypeError) as exc:
            if recover and index == len(lines) - 1:
                break
            raise StateError(index, f"unreadable trace record: {exc}") from exc
    return RunTrace(seed=header["seed"], benchmark=header["benchmark"],
                    config=header["config"], rows=rows, flags=header.get("flags", {}))
