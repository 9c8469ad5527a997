"""Prompt assembly from versioned template files.

Templates are plain text with str.format placeholders and live either in
the packaged ``templates/`` directory or in a directory named by the
``template_dir`` config key, so ablation comparisons stay auditable. The
cognition section is a single contiguous block: removing it byte-for-byte
yields the no-cognition prompt.
"""

from __future__ import annotations

from importlib import resources
from pathlib import Path
from typing import Sequence

from evoloop.agents.types import GenerationRequest, reference_summaries
from evoloop.cognition import RetrievalResult


class TemplateSet:
    def __init__(self, template_dir: str = ""):
        self.template_dir = template_dir
        self._cache: dict[str, str] = {}

    def get(self, name: str) -> str:
        if name not in self._cache:
            if self.template_dir:
                text = (Path(self.template_dir) / f"{name}.txt").read_text(encoding="utf-8")
            else:
                text = resources.files("evoloop.agents").joinpath(f"templates/{name}.txt").read_text(
                    encoding="utf-8")
            self._cache[name] = text
        return self._cache[name]


def cognition_section(templates: TemplateSet, items: Sequence[RetrievalResult]) -> str:
    rendered = "\n".join(f"- [{r.item.category}] {r.item.text}" for r in items)
    return templates.get("researcher_cognition").format(items=rendered)


def researcher_prompt(templates: TemplateSet, request: GenerationRequest) -> str:
    parts = [templates.get("researcher_task").format(task_description=request.task_description)]
    if request.parent is not None:
        parts.append(templates.get("researcher_parent").format(
            score=f"{request.parent.score:.6f}",
            code=request.parent.program.code,
            analysis=request.parent.analysis or "(none yet)",
        ))
    if request.references:
        parts.append(templates.get("researcher_references").format(
            summaries=reference_summaries(request.references)))
    if request.cognition:
        parts.append(cognition_section(templates, request.cognition))
    output = "researcher_output_diff" if request.mode == "diff" else "researcher_output_full"
    parts.append(templates.get(output))
    return "".join(parts)


def analyzer_prompt(templates: TemplateSet, task_description: str, code: str,
                    metrics_text: str, logs_text: str) -> str:
    return templates.get("analyzer").format(
        task_description=task_description, code=code, metrics=metrics_text, logs=logs_text)


def judge_prompt(templates: TemplateSet, task_description: str, code: str) -> str:
    return templates.get("judge").format(task_description=task_description, code=code)
