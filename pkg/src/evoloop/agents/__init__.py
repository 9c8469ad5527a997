from evoloop.agents.types import Candidate, DiffEdit, GenerationRequest, apply_diff
from evoloop.agents.researcher import RemoteResearcher, StubResearcher, parse_full_reply, parse_diff_reply
from evoloop.agents.analyzer import RemoteAnalyzer, StubAnalyzer, raw_log_text, truncate_middle
from evoloop.agents.judge import RemoteJudge, combine_fitness

__all__ = [
    "Candidate",
    "DiffEdit",
    "GenerationRequest",
    "apply_diff",
    "RemoteResearcher",
    "StubResearcher",
    "parse_full_reply",
    "parse_diff_reply",
    "RemoteAnalyzer",
    "StubAnalyzer",
    "raw_log_text",
    "truncate_middle",
    "RemoteJudge",
    "combine_fitness",
]
