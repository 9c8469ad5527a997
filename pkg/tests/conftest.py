from __future__ import annotations

import dataclasses

import pytest

from evoloop.config import RunConfig, SamplingConfig
from evoloop.types import EvalResult, Node, ProgramArtifact


def make_node(node_id=None, score=0.5, round_index=1, parent_id=None, features=None,
              island=None, code="print('hi')", motivation="try something",
              analysis=None, eval_result=None) -> Node:
    return Node(
        id=node_id,
        parent_id=parent_id,
        round=round_index,
        motivation=motivation,
        program=ProgramArtifact(code=code),
        eval=eval_result,
        analysis=analysis,
        score=score,
        island=island,
        features=features,
        created_at=float(round_index),
        meta={},
    )


def make_eval(score=1.0, success=True, runtime_s=0.1, stdout="", stderr="", timed_out=False) -> EvalResult:
    return EvalResult(
        metrics={"value": score if success else 0.0},
        primary_score=score if success else 0.0,
        success=success,
        runtime_s=runtime_s,
        stdout=stdout,
        stderr=stderr,
        timed_out=timed_out,
    )


@pytest.fixture
def small_config() -> RunConfig:
    return dataclasses.replace(
        RunConfig(),
        max_db_size=10,
        sampling=dataclasses.replace(SamplingConfig(), islands=2, bins_per_feature=4),
    )


@pytest.fixture
def default_config() -> RunConfig:
    return RunConfig()
