"""Optional LLM judge and the fitness combination rule.

Disabled by default; when enabled, the selection fitness becomes
(1 - w) * normalized primary + w * judge score.
"""

from __future__ import annotations

import logging
import re
from typing import Callable

from evoloop.agents.prompts import TemplateSet, judge_prompt
from evoloop.chat import ChatClient
from evoloop.errors import ChatError

logger = logging.getLogger(__name__)

_NUMBER_RE = re.compile(r"[-+]?\d*\.?\d+")


class RemoteJudge:
    def __init__(self, client: ChatClient, templates: TemplateSet):
        self.client = client
        self.templates = templates

    def score(self, code: str, task_description: str) -> float:
        reply = self.client.complete(
            [{"role": "user", "content": judge_prompt(self.templates, task_description, code)}])
        match = _NUMBER_RE.search(reply)
        if match is None:
            raise ChatError(f"judge reply contains no number: {reply[:80]!r}")
        return min(max(float(match.group(0)), 0.0), 1.0)


def combine_fitness(primary_score: float, judge_score: float, judge_weight: float,
                    judge_enabled: bool, normalize: Callable[[float], float]) -> float:
    """Fitness used for selection. With the judge disabled (or weight 0)
    the primary score passes through untouched."""
    if not judge_enabled or judge_weight == 0.0:
        return primary_score
    return (1.0 - judge_weight) * normalize(primary_score) + judge_weight * judge_score


def safe_judge_score(judge, code: str, task_description: str) -> float:
    """Judge score with failure downgraded to a zero contribution."""
    try:
        return judge.score(code, task_description)
    except ChatError as exc:
        logger.warning("judge call failed, contribution set to 0: %s", exc)
        return 0.0
