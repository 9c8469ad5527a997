"""Analyzer implementations: remote chat model and templated stub.

The analyzer sees the full experimental output and distills it into a
compact report stored on the node; logs are middle-truncated before they
enter a prompt so a noisy candidate cannot blow up the context.
"""

from __future__ import annotations

import json

from evoloop.agents.prompts import TemplateSet, analyzer_prompt
from evoloop.chat import ChatClient
from evoloop.types import EvalResult
from evoloop.util import TRUNCATION_MARKER, truncate_middle

__all__ = ["RemoteAnalyzer", "StubAnalyzer", "raw_log_text", "truncate_middle", "TRUNCATION_MARKER"]


def raw_log_text(result: EvalResult) -> str:
    """What gets stored as 'analysis' when the analyzer is ablated: the raw
    evaluation score and execution logs, verbatim."""
    return (
        f"score: {result.primary_score}\n"
        f"success: {result.success}\n"
        f"--- stdout ---\n{result.stdout}\n"
        f"--- stderr ---\n{result.stderr}"
    )


class RemoteAnalyzer:
    def __init__(self, client: ChatClient, templates: TemplateSet, log_cap: int = 20000):
        self.client = client
        self.templates = templates
        self.log_cap = log_cap

    def analyze(self, code: str, result: EvalResult, task_description: str, *,
                parent_score: float | None = None, diagnostics: str = "",
                failure_reason: str = "") -> str:
        metrics_text = json.dumps(result.metrics, sort_keys=True)
        logs = f"--- stdout ---\n{result.stdout}\n--- stderr ---\n{result.stderr}"
        if diagnostics:
            logs = diagnostics + "\n" + logs
        prompt = analyzer_prompt(self.templates, task_description, code,
                                 metrics_text, truncate_middle(logs, self.log_cap))
        reply = self.client.complete([{"role": "user", "content": prompt}])
        return truncate_middle(reply.strip(), self.log_cap)


class StubAnalyzer:
    """Deterministic templated report: score, delta vs parent, benchmark
    diagnostics, and the failure reason when the run failed."""

    def analyze(self, code: str, result: EvalResult, task_description: str, *,
                parent_score: float | None = None, diagnostics: str = "",
                failure_reason: str = "") -> str:
        lines = [f"score: {result.primary_score:.6f}"]
        if parent_score is None:
            lines.append("delta vs parent: n/a (no parent)")
        else:
            delta = result.primary_score - parent_score
            if delta > 0:
                lines.append(f"delta vs parent: improved by +{delta:.6f}")
            elif delta < 0:
                lines.append(f"delta vs parent: regressed by {delta:.6f}")
            else:
                lines.append("delta vs parent: unchanged (+0.000000)")
        if diagnostics:
            lines.append("diagnostics:")
            lines.append(diagnostics)
        if not result.success:
            reason = failure_reason or ("timeout" if result.timed_out else "nonzero exit or malformed output")
            lines.append(f"failure: {reason}")
        return "\n".join(lines)
