"""Value objects shared by every part of the loop.

All types here are immutable and JSON-serializable via ``to_dict`` /
``from_dict``; the dict codecs are the single source of truth for the
state-file record format.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Any, Mapping

from evoloop.errors import ValidationError

# Program artifact modes.
MODE_FULL = "full"
MODE_DIFF_APPLIED = "diff-applied"
PROGRAM_MODES = (MODE_FULL, MODE_DIFF_APPLIED)


@dataclass(frozen=True)
class ProgramArtifact:
    """A candidate program as text. ``length`` is always ``len(code)``."""

    code: str
    mode: str = MODE_FULL
    length: int = -1

    def __post_init__(self):
        if self.length < 0:
            object.__setattr__(self, "length", len(self.code))
        elif self.length != len(self.code):
            raise ValidationError("program.length", f"stored length {self.length} != character count {len(self.code)}")
        if self.mode not in PROGRAM_MODES:
            raise ValidationError("program.mode", f"unknown mode {self.mode!r}")

    def to_dict(self) -> dict[str, Any]:
        return {"code": self.code, "length": self.length, "mode": self.mode}

    @classmethod
    def from_dict(cls, d: Mapping[str, Any]) -> "ProgramArtifact":
        return cls(code=d["code"], mode=d["mode"], length=d["length"])


@dataclass(frozen=True)
class EvalResult:
    """Structured outcome of executing one candidate."""

    metrics: dict[str, float]
    primary_score: float
    success: bool
    runtime_s: float
    stdout: str = ""
    stderr: str = ""
    timed_out: bool = False

    def __post_init__(self):
        if self.timed_out and self.success:
            raise ValidationError("eval.success", "timed-out evaluations cannot succeed")
        if not self.success and self.primary_score != 0:
            raise ValidationError("eval.primary_score", "failed evaluations must score exactly 0")

    def to_dict(self) -> dict[str, Any]:
        return {
            "metrics": dict(self.metrics),
            "primary_score": self.primary_score,
            "success": self.success,
            "runtime_s": self.runtime_s,
            "stdout": self.stdout,
            "stderr": self.stderr,
            "timed_out": self.timed_out,
        }

    @classmethod
    def from_dict(cls, d: Mapping[str, Any]) -> "EvalResult":
        return cls(
            metrics=dict(d["metrics"]),
            primary_score=d["primary_score"],
            success=d["success"],
            runtime_s=d["runtime_s"],
            stdout=d["stdout"],
            stderr=d["stderr"],
            timed_out=d["timed_out"],
        )


@dataclass(frozen=True)
class Node:
    """One evolution round's record.

    ``id`` is assigned by the database on first insert (pass ``None`` for
    fresh nodes). ``meta`` carries auxiliary data such as the reference node
    ids used as context and the failure reason, if any.
    """

    id: int | None
    parent_id: int | None
    round: int
    motivation: str
    program: ProgramArtifact
    eval: EvalResult | None
    analysis: str | None
    score: float
    island: int | None = None
    features: tuple[float, ...] | None = None
    created_at: float = 0.0
    meta: dict[str, Any] = field(default_factory=dict)

    def __post_init__(self):
        if not math.isfinite(self.score):
            raise ValidationError("node.score", f"score must be finite, got {self.score}")
        if self.eval is not None and not self.eval.success and self.score != 0:
            raise ValidationError("node.score", "failed evaluation requires score exactly 0")
        if self.features is not None:
            object.__setattr__(self, "features", tuple(float(f) for f in self.features))

    def with_id(self, node_id: int) -> "Node":
        return replace(self, id=node_id)

    def to_dict(self) -> dict[str, Any]:
        return {
            "id": self.id,
            "parent_id": self.parent_id,
            "round": self.round,
            "motivation": self.motivation,
            "program": self.program.to_dict(),
            "eval": self.eval.to_dict() if self.eval is not None else None,
            "analysis": self.analysis,
            "score": self.score,
            "island": self.island,
            "features": list(self.features) if self.features is not None else None,
            "created_at": self.created_at,
            "meta": dict(self.meta),
        }

    @classmethod
    def from_dict(cls, d: Mapping[str, Any]) -> "Node":
        return cls(
            id=d["id"],
            parent_id=d["parent_id"],
            round=d["round"],
            motivation=d["motivation"],
            program=ProgramArtifact.from_dict(d["program"]),
            eval=EvalResult.from_dict(d["eval"]) if d["eval"] is not None else None,
            analysis=d["analysis"],
            score=d["score"],
            island=d["island"],
            features=tuple(d["features"]) if d["features"] is not None else None,
            created_at=d["created_at"],
            meta=dict(d["meta"]),
        )


def failed_eval(reason: str, *, runtime_s: float = 0.0, stdout: str = "", stderr: str = "",
                timed_out: bool = False) -> EvalResult:
    """A canonical score-0 result for a candidate-level failure."""
    return EvalResult(
        metrics={},
        primary_score=0.0,
        success=False,
        runtime_s=runtime_s,
        stdout=stdout,
        stderr=stderr if stderr else reason,
        timed_out=timed_out,
    )
