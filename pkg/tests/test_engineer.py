from __future__ import annotations

import time

import pytest

from evoloop.benchmarks import make_benchmark
from evoloop.engineer import ExecutionSpec, evaluate, quick_test
from evoloop.errors import InfrastructureError
from evoloop.types import ProgramArtifact

TOY = make_benchmark("toy_landscape", seed=0)

VALID_PROGRAM = 'import json\nprint(json.dumps({"vector": [0.4, 0.5, 0.6]}))\n'
SLEEPER = "import time\ntime.sleep(600)\n"
CRASHER = 'import sys\nprint("about to crash")\nsys.exit(3)\n'
MALFORMED = 'print("this is not a payload")\n'

# Fails until its counter file records the configured number of runs; used
# to count executions and to prove success on a late retry.
COUNTER_TEMPLATE = """\
import json, os, sys
path = os.path.join(os.path.dirname(os.path.abspath(__file__)), "counter.txt")
count = int(open(path).read()) if os.path.exists(path) else 0
count += 1
open(path, "w").write(str(count))
if count < {succeed_on}:
    sys.exit(1)
print(json.dumps({{"vector": [0.1, 0.2, 0.3]}}))
"""


def spec_for(code: str, tmp_path, timeout_s: int = 60, **kwargs) -> ExecutionSpec:
    return ExecutionSpec(program=ProgramArtifact(code=code), workdir=str(tmp_path),
                         timeout_s=timeout_s, **kwargs)


def read_counter(tmp_path) -> int:
    return int((tmp_path / "counter.txt").read_text())


def test_valid_program_succeeds_with_plausible_runtime(tmp_path):
    result = evaluate(spec_for(VALID_PROGRAM, tmp_path), TOY)
    assert result.success
    assert result.primary_score == TOY.score((0.4, 0.5, 0.6))
    assert 0.0 < result.runtime_s < 30.0
    assert not result.timed_out


def test_timeout_kills_within_budget_plus_grace(tmp_path):
    start = time.monotonic()
    result = evaluate(spec_for(SLEEPER, tmp_path, timeout_s=2), TOY)
    elapsed = time.monotonic() - start
    assert result.timed_out
    assert not result.success
    assert result.primary_score == 0.0
    assert elapsed < 2 + 2 + 1.0  # timeout + grace + slack


def test_persistent_failure_runs_exactly_initial_plus_two_retries(tmp_path):
    code = COUNTER_TEMPLATE.format(succeed_on=99)
    result = evaluate(spec_for(code, tmp_path), TOY, retries=2)
    assert not result.success
    assert result.primary_score == 0.0
    assert read_counter(tmp_path) == 3  # 1 initial attempt + exactly 2 retries


def test_success_on_final_retry_counts_as_success(tmp_path):
    code = COUNTER_TEMPLATE.format(succeed_on=3)
    result = evaluate(spec_for(code, tmp_path), TOY, retries=2)
    assert result.success
    assert read_counter(tmp_path) == 3


def test_malformed_payload_is_retried_then_failed(tmp_path):
    result = evaluate(spec_for(MALFORMED, tmp_path), TOY, retries=1)
    assert not result.success
    assert "not a payload" in result.stdout


def test_timeout_is_not_retried(tmp_path):
    marker = """\
import os, time
path = os.path.join(os.path.dirname(os.path.abspath(__file__)), "counter.txt")
count = int(open(path).read()) if os.path.exists(path) else 0
open(path, "w").write(str(count + 1))
time.sleep(600)
"""
    start = time.monotonic()
    result = evaluate(spec_for(marker, tmp_path, timeout_s=1), TOY, retries=2)
    assert result.timed_out
    assert read_counter(tmp_path) == 1
    assert time.monotonic() - start < 8


def test_spawn_failure_is_infrastructure_error(tmp_path):
    spec = spec_for(VALID_PROGRAM, tmp_path,
                    interpreter_command=("/nonexistent/interpreter", "{program}"))
    with pytest.raises(InfrastructureError):
        evaluate(spec, TOY)


def test_stderr_and_stdout_are_captured(tmp_path):
    code = 'import sys\nsys.stderr.write("warning!\\n")\nprint("junk")\nimport json\nprint(json.dumps({"vector": [0,0,0]}))\n'
    result = evaluate(spec_for(code, tmp_path), TOY)
    assert result.success
    assert "warning!" in result.stderr
    assert "junk" in result.stdout


def test_candidate_env_passes_seed_and_budget(tmp_path):
    code = 'import json, os\nprint(json.dumps({"vector": [float(os.environ["SEED"]) % 1, float(os.environ["BUDGET"]) % 1, 0]}))\n'
    spec = spec_for(code, tmp_path, env={"SEED": "123", "BUDGET": "300"})
    result = evaluate(spec, TOY)
    assert result.success


def test_workdirs_are_isolated(tmp_path):
    # Two candidates write the same filename in their own workdirs.
    code = 'import json, pathlib\npathlib.Path("scratch.txt").write_text("mine")\nprint(json.dumps({"vector": [0,0,0]}))\n'
    a = evaluate(spec_for(code, tmp_path / "a"), TOY)
    b = evaluate(spec_for(code, tmp_path / "b"), TOY)
    assert a.success and b.success
    assert (tmp_path / "a" / "scratch.txt").read_text() == "mine"
    assert (tmp_path / "b" / "scratch.txt").read_text() == "mine"


# -- quick test -----------------------------------------------------------------

def test_quick_test_rejects_broken_program_quickly(tmp_path):
    start = time.monotonic()
    passed, result = quick_test(spec_for("this is not python", tmp_path), TOY)
    assert not passed
    assert not result.success
    assert time.monotonic() - start < 30


def test_quick_test_passes_valid_program(tmp_path):
    passed, result = quick_test(spec_for(VALID_PROGRAM, tmp_path), TOY)
    assert passed
    assert result.success


def test_quick_test_env_contract(tmp_path):
    # Full-budget-only program: emits a reduced but valid payload under QUICK.
    code = """\
import json, os, time
if os.environ.get("QUICK") == "1":
    print(json.dumps({"vector": [0.0, 0.0, 0.0]}))
else:
    time.sleep(1.0)
    print(json.dumps({"vector": [0.5, 0.5, 0.5]}))
"""
    spec = spec_for(code, tmp_path, timeout_s=60)
    passed, quick_result = quick_test(spec, TOY)
    assert passed
    full_result = evaluate(spec, TOY)
    assert full_result.success
    assert full_result.primary_score == TOY.score((0.5, 0.5, 0.5))


def test_quick_test_timeout_is_tenth_of_full_capped_at_30(tmp_path):
    # timeout_s=20 -> quick timeout 2 s; the sleeper must be killed fast.
    start = time.monotonic()
    passed, result = quick_test(spec_for(SLEEPER, tmp_path, timeout_s=20), TOY)
    assert not passed
    assert result.timed_out
    assert time.monotonic() - start < 2 + 2 + 1.0


def test_quick_test_rejects_invalid_payload(tmp_path):
    code = 'import json\nprint(json.dumps({"vector": [1.0]}))\n'  # wrong arity
    passed, result = quick_test(spec_for(code, tmp_path), TOY)
    assert not passed
