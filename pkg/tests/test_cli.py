from __future__ import annotations

import json
import os
import signal
import subprocess
import sys
import time
from pathlib import Path

import pytest

from evoloop.cli import main
from evoloop.trace import read_trace

TANGENT_PAIR = {"circles": [[0.25, 0.5, 0.25], [0.75, 0.5, 0.25]]}


def run_cli(args) -> tuple[int, str]:
    import io
    from contextlib import redirect_stdout
    buffer = io.StringIO()
    with redirect_stdout(buffer):
        code = main(args)
    return code, buffer.getvalue()


def test_score_tangent_pair_prints_half(tmp_path):
    payload = tmp_path / "pair.json"
    payload.write_text(json.dumps(TANGENT_PAIR))
    code, out = run_cli(["score", str(payload), "--benchmark", "circle_packing", "--n", "2"])
    assert code == 0
    assert out.strip() == "0.5"


def test_score_report_flag_lists_violations(tmp_path):
    payload = tmp_path / "bad.json"
    payload.write_text(json.dumps({"circles": [[0.5, 0.5, 0.51]]}))
    code, out = run_cli(["score", str(payload), "--n", "1", "--report"])
    assert code == 0
    assert out.splitlines()[0] == "0.0"
    assert "out_of_bounds" in out


def test_run_zero_rounds_exits_success(tmp_path):
    code, out = run_cli(["run", "--rounds", "0", "--benchmark", "toy_landscape",
                         "--agents", "stub", "--out", str(tmp_path / "r")])
    assert code == 0
    assert (tmp_path / "r" / "trace.jsonl").exists()
    assert read_trace(tmp_path / "r" / "trace.jsonl").rows == []


def test_run_writes_trace_and_state(tmp_path):
    code, out = run_cli(["run", "--rounds", "5", "--seed", "3", "--benchmark", "toy_landscape",
                         "--agents", "stub", "--out", str(tmp_path / "r")])
    assert code == 0
    trace = read_trace(tmp_path / "r" / "trace.jsonl")
    assert len(trace.rows) == 5
    assert "best score" in out


def test_seed_cognition_reports_counts(tmp_path):
    code, out = run_cli(["seed-cognition", "--out", str(tmp_path / "copy.jsonl")])
    assert code == 0
    assert "loaded 12 cognition items" in out
    assert "engineering_guideline=4" in out and "geometric_prior=4" in out and "optimization_method=4" in out
    assert len((tmp_path / "copy.jsonl").read_text().splitlines()) == 12


def test_dump_archive_lists_islands(tmp_path):
    run_cli(["run", "--rounds", "6", "--seed", "2", "--benchmark", "toy_landscape",
             "--agents", "stub", "--out", str(tmp_path / "r")])
    code, out = run_cli(["dump-archive", str(tmp_path / "r")])
    assert code == 0
    assert "island 0" in out
    assert "node" in out


def test_export_curve_csv(tmp_path):
    run_cli(["run", "--rounds", "3", "--seed", "2", "--benchmark", "toy_landscape",
             "--agents", "stub", "--out", str(tmp_path / "r")])
    out_path = tmp_path / "curve.csv"
    code, _ = run_cli(["export-curve", str(tmp_path / "r" / "trace.jsonl"),
                       "--out", str(out_path)])
    assert code == 0
    lines = out_path.read_text().splitlines()
    assert lines[0] == "round,score,best_so_far"
    assert len(lines) == 4


def test_export_curve_aggregate(tmp_path):
    for seed in (1, 2, 3):
        run_cli(["run", "--rounds", "4", "--seed", str(seed), "--benchmark", "toy_landscape",
                 "--agents", "stub", "--out", str(tmp_path / f"r{seed}")])
    out_path = tmp_path / "agg.csv"
    code, _ = run_cli(["export-curve",
                       *[str(tmp_path / f"r{s}" / "trace.jsonl") for s in (1, 2, 3)],
                       "--aggregate", "--out", str(out_path)])
    assert code == 0
    rows = out_path.read_text().splitlines()
    assert rows[0] == "round,mean,min,max"
    for line in rows[1:]:
        _, mean, low, high = line.split(",")
        assert float(low) <= float(mean) <= float(high)


def test_aggregate_of_identical_traces_has_mean_equal_to_each(tmp_path):
    for name in ("a", "b", "c"):
        run_cli(["run", "--rounds", "4", "--seed", "9", "--benchmark", "toy_landscape",
                 "--agents", "stub", "--out", str(tmp_path / name)])
    out_path = tmp_path / "agg.csv"
    run_cli(["export-curve", *[str(tmp_path / n / "trace.jsonl") for n in ("a", "b", "c")],
             "--aggregate", "--out", str(out_path)])
    single = read_trace(tmp_path / "a" / "trace.jsonl")
    for line, row in zip(out_path.read_text().splitlines()[1:], single.rows):
        _, mean, low, high = line.split(",")
        assert float(mean) == pytest.approx(row.best_so_far)
        assert float(low) == pytest.approx(row.best_so_far)
        assert float(high) == pytest.approx(row.best_so_far)


def test_missing_config_file_exits_2(tmp_path, capsys):
    code = main(["run", "--config", str(tmp_path / "nope.cfg"), "--rounds", "1",
                 "--benchmark", "toy_landscape", "--agents", "stub",
                 "--out", str(tmp_path / "r")])
    assert code == 2
    assert "nope.cfg" in capsys.readouterr().err


def test_missing_payload_file_exits_2(tmp_path, capsys):
    code = main(["score", str(tmp_path / "nope.json")])
    assert code == 2


def test_export_curve_structured_format(tmp_path):
    run_cli(["run", "--rounds", "3", "--seed", "2", "--benchmark", "toy_landscape",
             "--agents", "stub", "--out", str(tmp_path / "r")])
    out_path = tmp_path / "curve.json"
    code, _ = run_cli(["export-curve", str(tmp_path / "r" / "trace.jsonl"),
                       "--format", "structured", "--out", str(out_path)])
    assert code == 0
    rows = json.loads(out_path.read_text())
    assert [row["round"] for row in rows] == [1, 2, 3]
    assert all(set(row) == {"round", "score", "best_so_far"} for row in rows)


def test_ablation_flags_survive_resume(tmp_path):
    out = tmp_path / "r"
    run_cli(["run", "--rounds", "4", "--seed", "2", "--benchmark", "toy_landscape",
             "--agents", "stub", "--no-analyzer", "--out", str(out)])
    # resume WITHOUT re-passing --no-analyzer: the stored flag must stick
    code, _ = run_cli(["run", "--rounds", "8", "--resume", "--out", str(out)])
    assert code == 0
    from evoloop.state import read_state
    _, nodes = read_state(out / "state.jsonl")
    assert len(nodes) == 8
    assert all(n.meta["analysis_kind"] == "raw_logs" for n in nodes)


def test_kill_and_resume_yields_contiguous_rounds(tmp_path):
    """SIGKILL the CLI mid-run, then --resume to the full round count."""
    out_dir = tmp_path / "r"
    argv = [sys.executable, "-m", "evoloop.cli", "run", "--rounds", "60", "--seed", "4",
            "--benchmark", "toy_landscape", "--agents", "stub", "--out", str(out_dir)]
    env = {**os.environ, "PYTHONPATH": str(Path(__file__).resolve().parents[1] / "src")}
    proc = subprocess.Popen(argv, env=env, stdout=subprocess.DEVNULL, stderr=subprocess.DEVNULL)
    trace_path = out_dir / "trace.jsonl"
    deadline = time.monotonic() + 60
    while time.monotonic() < deadline:
        if trace_path.exists() and len(trace_path.read_text().splitlines()) >= 11:
            break
        time.sleep(0.05)
    else:
        proc.kill()
        pytest.fail("run never reached round 10")
    proc.send_signal(signal.SIGKILL)
    proc.wait()

    result = subprocess.run(
        [sys.executable, "-m", "evoloop.cli", "run", "--rounds", "60", "--resume",
         "--out", str(out_dir)],
        env=env, capture_output=True, text=True)
    assert result.returncode == 0, result.stderr
    trace = read_trace(trace_path)
    assert [r.round for r in trace.rows] == list(range(1, 61))
    trace.check_invariants()

    # The resumed run must equal an uninterrupted one byte for byte.
    reference = tmp_path / "ref"
    subprocess.run([sys.executable, "-m", "evoloop.cli", "run", "--rounds", "60", "--seed", "4",
                    "--benchmark", "toy_landscape", "--agents", "stub", "--out", str(reference)],
                   env=env, check=True, capture_output=True)
    assert (reference / "trace.jsonl").read_bytes() == trace_path.read_bytes()
