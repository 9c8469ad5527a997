from __future__ import annotations

import pytest

from conftest import make_eval, make_node
from evoloop.agents.analyzer import StubAnalyzer, raw_log_text, truncate_middle, TRUNCATION_MARKER
from evoloop.agents.judge import combine_fitness
from evoloop.agents.prompts import TemplateSet, cognition_section, researcher_prompt
from evoloop.agents.researcher import (
    RemoteResearcher,
    ReplyParseError,
    StubResearcher,
    parse_diff_reply,
    parse_full_reply,
)
from evoloop.agents.types import DiffEdit, GenerationRequest, apply_diff
from evoloop.benchmarks import make_benchmark
from evoloop.cognition import CognitionStore
from evoloop.errors import DiffRejectedError, GenerationFailedError, RetryableChatError, ValidationError


# -- reply parsing ------------------------------------------------------------

def test_reply_with_one_fenced_block():
    motivation, code = parse_full_reply("Try a grid.\n```python\nprint(1)\n```\n")
    assert motivation == "Try a grid."
    assert code == "print(1)\n"


def test_reply_without_code_block_fails():
    with pytest.raises(ReplyParseError):
        parse_full_reply("no code here, sorry")


def test_diff_reply_parses_blocks_in_order():
    reply = (
        "tighten the loop\n"
        "<<<<<<< SEARCH\nalpha\n=======\nbeta\n>>>>>>> REPLACE\n"
        "<<<<<<< SEARCH\ngamma\n=======\ndelta\n>>>>>>> REPLACE\n"
    )
    motivation, diff = parse_diff_reply(reply)
    assert motivation == "tighten the loop"
    assert diff.edits == (("alpha", "beta"), ("gamma", "delta"))


# -- apply_diff ----------------------------------------------------------------

def test_empty_edit_list_is_identity():
    assert apply_diff("keep me", DiffEdit(edits=())) == "keep me"


def test_single_unique_block_is_spliced():
    parent = "a = 1\nb = 2\nc = 3\n"
    out = apply_diff(parent, DiffEdit(edits=(("b = 2", "b = 20"),)))
    assert out == "a = 1\nb = 20\nc = 3\n"


def test_ambiguous_search_block_is_rejected():
    with pytest.raises(DiffRejectedError):
        apply_diff("x\nx\n", DiffEdit(edits=(("x", "y"),)))


def test_absent_search_block_is_rejected():
    with pytest.raises(DiffRejectedError):
        apply_diff("abc", DiffEdit(edits=(("zzz", "y"),)))


def test_diff_round_trip_restores_original():
    parent = "alpha\nbeta\ngamma\n"
    forward = apply_diff(parent, DiffEdit(edits=(("beta", "BETA"),)))
    assert apply_diff(forward, DiffEdit(edits=(("BETA", "beta"),))) == parent


def test_diff_mode_requires_parent():
    with pytest.raises(ValidationError):
        GenerationRequest(task_description="t", parent=None, mode="diff")


# -- prompts ------------------------------------------------------------------

def build_request(with_cognition: bool) -> GenerationRequest:
    store = CognitionStore()
    store.add_item("optimization_method", "use explicit constraints", "t")
    store.add_item("geometric_prior", "corners matter", "t")
    parent = make_node(node_id=3, score=1.25, analysis="solid but loose corners")
    refs = (make_node(node_id=2, score=1.0, motivation="hex grid attempt"),)
    cognition = tuple(store.retrieve(["constraints and corners"], k=5, threshold=0.0)) if with_cognition else ()
    return GenerationRequest(task_description="pack circles", parent=parent,
                             references=refs, cognition=cognition)


def test_no_cognition_prompt_differs_by_exactly_the_cognition_section():
    templates = TemplateSet()
    with_items = build_request(True)
    without_items = build_request(False)
    full = researcher_prompt(templates, with_items)
    bare = researcher_prompt(templates, without_items)
    section = cognition_section(templates, with_items.cognition)
    assert section in full
    assert full.replace(section, "", 1) == bare


def test_prompt_contains_task_parent_and_references():
    templates = TemplateSet()
    prompt = researcher_prompt(templates, build_request(True))
    assert "pack circles" in prompt
    assert "solid but loose corners" in prompt
    assert "hex grid attempt" in prompt
    assert "use explicit constraints" in prompt


# -- researcher ---------------------------------------------------------------

class ScriptedChat:
    """Stands in for ChatClient: replays a list of replies/exceptions."""

    def __init__(self, replies):
        self.replies = list(replies)
        self.calls = 0

    def complete(self, messages, decoding=None):
        self.calls += 1
        reply = self.replies.pop(0)
        if isinstance(reply, Exception):
            raise reply
        return reply


def test_remote_researcher_parses_first_good_reply():
    chat = ScriptedChat(["motivation text\n```\nprint('ok')\n```"])
    researcher = RemoteResearcher(chat, TemplateSet(), max_code_length=100, retries=3)
    candidate = researcher.generate(GenerationRequest(task_description="t", parent=None))
    assert candidate.program.code == "print('ok')\n"
    assert chat.calls == 1


def test_remote_researcher_exhausts_retries_then_fails():
    chat = ScriptedChat(["no block"] * 4)
    researcher = RemoteResearcher(chat, TemplateSet(), max_code_length=100, retries=3)
    with pytest.raises(GenerationFailedError):
        researcher.generate(GenerationRequest(task_description="t", parent=None))
    assert chat.calls == 4  # initial attempt + 3 retries


def test_remote_researcher_rejects_overlong_code_then_succeeds():
    chat = ScriptedChat(["m\n```\n" + "x" * 200 + "\n```", "m\n```\nshort\n```"])
    researcher = RemoteResearcher(chat, TemplateSet(), max_code_length=50, retries=2)
    candidate = researcher.generate(GenerationRequest(task_description="t", parent=None))
    assert candidate.program.code == "short\n"


def test_remote_researcher_retries_transport_errors():
    chat = ScriptedChat([RetryableChatError("down"), "m\n```\nok\n```"])
    researcher = RemoteResearcher(chat, TemplateSet(), max_code_length=50, retries=2)
    assert researcher.generate(GenerationRequest(task_description="t", parent=None)).program.code == "ok\n"


def test_stub_researcher_is_deterministic():
    bench = make_benchmark("toy_landscape", seed=5)
    parent = make_node(code='import json\nPAYLOAD = {"vector": [0.5, 0.5, 0.5]}\nprint(json.dumps(PAYLOAD))\n')
    request = GenerationRequest(task_description="t", parent=parent)
    a = StubResearcher(bench, seed=9).generate(request, round_index=4)
    b = StubResearcher(bench, seed=9).generate(request, round_index=4)
    c = StubResearcher(bench, seed=10).generate(request, round_index=4)
    assert a == b
    assert a != c


# -- analyzer -------------------------------------------------------------------

def test_stub_report_contains_failure_reason():
    report = StubAnalyzer().analyze("code", make_eval(success=False, stderr="exploded"),
                                    "task", failure_reason="quick-test")
    assert "failure: quick-test" in report


def test_stub_report_contains_signed_improvement():
    report = StubAnalyzer().analyze("code", make_eval(score=1.5), "task", parent_score=1.0)
    assert "improved by +0.500000" in report


def test_stub_report_contains_regression_delta():
    report = StubAnalyzer().analyze("code", make_eval(score=0.5), "task", parent_score=1.0)
    assert "regressed by -0.500000" in report


def test_truncation_preserves_head_and_tail():
    text = "H" * 6000 + "MIDDLE" + "T" * 6000
    cap = 2000
    out = truncate_middle(text, cap)
    assert out.startswith("H" * 1000)
    assert out.endswith("T" * 1000)
    assert "MIDDLE" not in out
    assert len(out) == cap + len(TRUNCATION_MARKER)


def test_truncation_noop_below_cap():
    assert truncate_middle("short", 100) == "short"


def test_raw_log_text_carries_score_and_streams():
    result = make_eval(score=1.25, stdout="line-out", stderr="line-err")
    text = raw_log_text(result)
    assert "score: 1.25" in text
    assert "line-out" in text and "line-err" in text


# -- judge fitness ---------------------------------------------------------------

def test_judge_disabled_passes_primary_through():
    assert combine_fitness(2.5, 0.9, 0.5, False, normalize=lambda p: 0.0) == 2.5


def test_judge_weight_zero_is_identical_to_disabled():
    assert combine_fitness(2.5, 0.9, 0.0, True, normalize=lambda p: 0.0) == 2.5


def test_judge_weight_one_uses_judge_score():
    assert combine_fitness(2.5, 0.8, 1.0, True, normalize=lambda p: 1.0) == pytest.approx(0.8)


def test_judge_blend():
    fitness = combine_fitness(2.0, 0.5, 0.25, True, normalize=lambda p: p / 4.0)
    assert fitness == pytest.approx(0.75 * 0.5 + 0.25 * 0.5)
