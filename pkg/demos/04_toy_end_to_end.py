"""A complete deterministic run: stub agents on the synthetic landscape.

Every round samples a parent, mutates its vector (stub researcher),
executes the candidate in a sandboxed child process, analyzes the result,
and inserts the node. With a fixed seed the whole run, including the trace
and state files it writes, is byte-reproducible.
"""

import dataclasses
import tempfile
from pathlib import Path

from evoloop.agents.analyzer import StubAnalyzer
from evoloop.agents.researcher import StubResearcher
from evoloop.benchmarks import make_benchmark
from evoloop.config import RunConfig
from evoloop.orchestrator import EvolutionRun

config = dataclasses.replace(RunConfig(), seed=42, engineer_timeout_s=30)
benchmark = make_benchmark("toy_landscape", seed=config.seed)
out_dir = Path(tempfile.mkdtemp(prefix="evoloop-demo-")) / "run"

run = EvolutionRun(config, benchmark,
                   StubResearcher(benchmark, config.seed), StubAnalyzer(),
                   out_dir=out_dir)
trace = run.run(60)

print(f"hidden target: {tuple(round(v, 3) for v in benchmark.target)}")
print(f"best score after {len(trace.rows)} rounds: {trace.best_score():.4f}\n")
print("round  score    best-so-far")
for row in trace.rows[::10]:
    print(f"{row.round:>5}  {row.score:>7.4f}  {row.best_so_far:.4f}")

print(f"\nrun directory: {out_dir}")
print("files:", sorted(p.name for p in out_dir.iterdir()))
print("rerun this script: identical trace bytes, every time")
