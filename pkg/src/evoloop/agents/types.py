"""Request/response types for the agent layer, plus diff application."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Sequence

from evoloop.cognition import RetrievalResult
from evoloop.errors import DiffRejectedError, ValidationError
from evoloop.types import Node, ProgramArtifact


@dataclass(frozen=True)
class GenerationRequest:
    task_description: str
    parent: Node | None
    references: tuple[Node, ...] = ()
    cognition: tuple[RetrievalResult, ...] = ()
    mode: str = "full"
    decoding: dict[str, Any] = field(default_factory=dict)

    def __post_init__(self):
        if self.mode == "diff" and (self.parent is None or not self.parent.program.code):
            raise ValidationError("request.mode", "diff mode requires a parent with program text")


@dataclass(frozen=True)
class Candidate:
    motivation: str
    program: ProgramArtifact


@dataclass(frozen=True)
class DiffEdit:
    """Ordered search/replace pairs; each search block must occur exactly
    once in the program being edited."""

    edits: tuple[tuple[str, str], ...]


def apply_diff(parent_program: str, diff: DiffEdit) -> str:
    """Splice each replace block over its unique search block, in order."""
    text = parent_program
    for search, replacement in diff.edits:
        occurrences = text.count(search)
        if occurrences == 0:
            raise DiffRejectedError(f"search block not found: {search[:80]!r}")
        if occurrences > 1:
            raise DiffRejectedError(f"search block is ambiguous ({occurrences} occurrences): {search[:80]!r}")
        text = text.replace(search, replacement, 1)
    return text


def reference_summaries(references: Sequence[Node]) -> str:
    lines = []
    for node in references:
        motivation = " ".join(node.motivation.split())[:200]
        lines.append(f"- node {node.id} (score {node.score:.6f}): {motivation}")
    return "\n".join(lines)
