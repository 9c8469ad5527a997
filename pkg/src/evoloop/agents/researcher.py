"""Researcher implementations: remote chat model and deterministic stub."""

from __future__ import annotations

import re

from evoloop.agents.prompts import TemplateSet, researcher_prompt
from evoloop.agents.types import Candidate, DiffEdit, GenerationRequest, apply_diff
from evoloop.chat import ChatClient
from evoloop.errors import DiffRejectedError, GenerationFailedError, RetryableChatError
from evoloop.types import MODE_DIFF_APPLIED, MODE_FULL, ProgramArtifact
from evoloop.util import derived_rng

_FENCE_RE = re.compile(r"```[a-zA-Z0-9_+-]*\n(.*?)```", re.DOTALL)
_DIFF_BLOCK_RE = re.compile(
    r"<{7} SEARCH\n(.*?)\n={7}\n(.*?)\n>{7} REPLACE", re.DOTALL)


class ReplyParseError(Exception):
    pass


def parse_full_reply(reply: str) -> tuple[str, str]:
    """Split a reply into (motivation, code) around the first fenced block."""
    match = _FENCE_RE.search(reply)
    if match is None:
        raise ReplyParseError("reply contains no fenced code block")
    motivation = reply[: match.start()].strip()
    return motivation, match.group(1)


def parse_diff_reply(reply: str) -> tuple[str, DiffEdit]:
    """Extract (motivation, edits) from a reply of search/replace blocks."""
    blocks = _DIFF_BLOCK_RE.findall(reply)
    if not blocks:
        raise ReplyParseError("reply contains no search/replace blocks")
    motivation = reply[: reply.index("<<<<<<< SEARCH")].strip()
    return motivation, DiffEdit(edits=tuple((search, replacement) for search, replacement in blocks))


class RemoteResearcher:
    """Prompts a chat model and parses the reply into a Candidate.

    Parse failures, over-length programs, and rejected diffs each consume
    one retry; exhausting the budget raises GenerationFailedError.
    """

    def __init__(self, client: ChatClient, templates: TemplateSet,
                 max_code_length: int = 100000, retries: int = 3):
        self.client = client
        self.templates = templates
        self.max_code_length = max_code_length
        self.retries = retries

    def generate(self, request: GenerationRequest, round_index: int = 0) -> Candidate:
        prompt = researcher_prompt(self.templates, request)
        messages = [{"role": "user", "content": prompt}]
        last_error = "no attempts made"
        for _ in range(self.retries + 1):
            try:
                reply = self.client.complete(messages, request.decoding)
            except RetryableChatError as exc:
                last_error = str(exc)
                continue
            try:
                if request.mode == "diff":
                    motivation, diff = parse_diff_reply(reply)
                    code = apply_diff(request.parent.program.code, diff)
                    mode = MODE_DIFF_APPLIED
                else:
                    motivation, code = parse_full_reply(reply)
                    mode = MODE_FULL
            except (ReplyParseError, DiffRejectedError) as exc:
                last_error = str(exc)
                continue
            if len(code) > self.max_code_length:
                last_error = f"program length {len(code)} exceeds {self.max_code_length}"
                continue
            return Candidate(motivation=motivation, program=ProgramArtifact(code=code, mode=mode))
        raise GenerationFailedError(f"retries exhausted: {last_error}")


class StubResearcher:
    """Deterministic researcher: delegates candidate construction to the
    benchmark's mutation rule. Pure function of (parent, seed, round)."""

    def __init__(self, benchmark, seed: int):
        self.benchmark = benchmark
        self.seed = seed

    def generate(self, request: GenerationRequest, round_index: int = 0) -> Candidate:
        rng = derived_rng(self.seed, round_index, "researcher")
        parent_code = request.parent.program.code if request.parent is not None else None
        motivation, code = self.benchmark.stub_candidate(parent_code, rng, round_index)
        return Candidate(motivation=motivation, program=ProgramArtifact(code=code, mode=MODE_FULL))
