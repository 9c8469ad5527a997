from __future__ import annotations

import json

import pytest

from conftest import make_eval, make_node
from evoloop.errors import StateError
from evoloop.state import NodeLog, read_state, write_state
from evoloop.types import Node


def nodes_with_awkward_floats():
    return [
        make_node(node_id=1, score=0.1 + 0.2, features=(0.3333333333333333, 1e-17)),
        make_node(node_id=2, score=2.6359830000000001, parent_id=1,
                  eval_result=make_eval(score=2.6359830000000001, runtime_s=0.123456789)),
        make_node(node_id=3, score=0.0, parent_id=1,
                  eval_result=make_eval(success=False, stderr="boom", timed_out=True)),
    ]


def test_empty_write_is_header_only(tmp_path):
    path = tmp_path / "state.jsonl"
    write_state(path, [])
    assert len(path.read_text().splitlines()) == 1
    header, nodes = read_state(path)
    assert header["format"] == "evoloop-state"
    assert nodes == []


def test_round_trip_is_bit_exact(tmp_path):
    path = tmp_path / "state.jsonl"
    original = nodes_with_awkward_floats()
    write_state(path, original)
    _, loaded = read_state(path)
    assert loaded == original
    for a, b in zip(loaded, original):
        assert repr(a.score) == repr(b.score)
        assert a.features == b.features
        if a.eval is not None:
            assert repr(a.eval.runtime_s) == repr(b.eval.runtime_s)


def test_truncated_final_record_errors_with_index(tmp_path):
    path = tmp_path / "state.jsonl"
    write_state(path, nodes_with_awkward_floats())
    lines = path.read_text().splitlines()
    lines[-1] = lines[-1][: len(lines[-1]) // 2]
    path.write_text("\n".join(lines) + "\n")
    with pytest.raises(StateError) as excinfo:
        read_state(path)
    assert excinfo.value.record_index == 3


def test_recover_drops_only_a_partial_final_record(tmp_path):
    path = tmp_path / "state.jsonl"
    write_state(path, nodes_with_awkward_floats())
    lines = path.read_text().splitlines()
    lines[-1] = lines[-1][:10]
    path.write_text("\n".join(lines) + "\n")
    _, nodes = read_state(path, recover=True)
    assert [n.id for n in nodes] == [1, 2]


def test_recover_does_not_mask_interior_corruption(tmp_path):
    path = tmp_path / "state.jsonl"
    write_state(path, nodes_with_awkward_floats())
    lines = path.read_text().splitlines()
    lines[1] = "{corrupt"
    path.write_text("\n".join(lines) + "\n")
    with pytest.raises(StateError) as excinfo:
        read_state(path, recover=True)
    assert excinfo.value.record_index == 1


def test_node_log_appends_and_reads_back(tmp_path):
    path = tmp_path / "log.jsonl"
    log = NodeLog(path)
    for node in nodes_with_awkward_floats():
        log.append(node)
    assert log.read() == nodes_with_awkward_floats()


def test_missing_header_is_an_error(tmp_path):
    path = tmp_path / "state.jsonl"
    path.write_text(json.dumps({"kind": "node"}) + "\n")
    with pytest.raises(StateError):
        read_state(path)


def test_golden_record_layout(tmp_path):
    """The record format is an external interface; freeze its shape."""
    path = tmp_path / "state.jsonl"
    write_state(path, [make_node(node_id=1, score=0.5, features=(0.1, 0.9), island=2)])
    record = json.loads(path.read_text().splitlines()[1])
    assert set(record) == {
        "kind", "id", "parent_id", "round", "motivation", "program", "eval",
        "analysis", "score", "island", "features", "created_at", "meta",
    }
    assert record["kind"] == "node"
    assert set(record["program"]) == {"code", "length", "mode"}
    assert record["island"] == 2
    assert record["features"] == [0.1, 0.9]


def test_nan_scores_are_rejected_at_construction():
    with pytest.raises(Exception):
        make_node(score=float("nan"))
    with pytest.raises(Exception):
        Node.from_dict({**make_node(node_id=1).to_dict(), "score": float("inf")})
