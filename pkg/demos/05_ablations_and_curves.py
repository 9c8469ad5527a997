"""Ablation toggles and evolution-curve export.

The no-analyzer toggle stores raw execution logs on every node instead of
templated reports; the no-cognition toggle removes exactly the cognition
section from the researcher's prompt. Curves export per-run or aggregated
across repeats as mean/min/max per round.
"""

import dataclasses
import tempfile
from pathlib import Path

from evoloop.agents.analyzer import StubAnalyzer
from evoloop.agents.prompts import TemplateSet, cognition_section, researcher_prompt
from evoloop.agents.researcher import StubResearcher
from evoloop.agents.types import GenerationRequest
from evoloop.benchmarks import make_benchmark
from evoloop.cognition import CognitionStore, load_packaged_seed
from evoloop.config import RunConfig
from evoloop.curve import aggregate_curves, export_curve
from evoloop.orchestrator import EvolutionRun
from evoloop.state import read_state
from evoloop.types import Node, ProgramArtifact

base = Path(tempfile.mkdtemp(prefix="evoloop-demo-"))

# --- no-analyzer: raw logs instead of reports -------------------------------
config = dataclasses.replace(RunConfig(), seed=7, engineer_timeout_s=30)
benchmark = make_benchmark("toy_landscape", seed=config.seed)
run = EvolutionRun(config, benchmark, StubResearcher(benchmark, config.seed),
                   StubAnalyzer(), out_dir=base / "na", no_analyzer=True)
run.run(5)
_, nodes = read_state(base / "na" / "state.jsonl")
print("analysis stored under no-analyzer (first node, first lines):")
print("\n".join(nodes[0].analysis.splitlines()[:3]))

# --- no-cognition: the prompt loses exactly one section ----------------------
store = CognitionStore()
load_packaged_seed(store)
items = tuple(store.retrieve(["hexagonal close packing density"], k=3, threshold=0.0))
parent = Node(id=1, parent_id=None, round=1, motivation="m",
              program=ProgramArtifact(code="print('p')"), eval=None,
              analysis="needs denser corners", score=1.0, created_at=1.0)
templates = TemplateSet()
with_items = researcher_prompt(templates, GenerationRequest(
    task_description="pack", parent=parent, cognition=items))
without = researcher_prompt(templates, GenerationRequest(
    task_description="pack", parent=parent, cognition=()))
section = cognition_section(templates, items)
print("\nbyte diff between full and no-cognition prompts is exactly the section:",
      with_items.replace(section, "", 1) == without)

# --- curves -------------------------------------------------------------------
traces = []
for seed in (1, 2, 3):
    cfg = dataclasses.replace(RunConfig(), seed=seed, engineer_timeout_s=30)
    bench = make_benchmark("toy_landscape", seed=seed)
    traces.append(EvolutionRun(cfg, bench, StubResearcher(bench, seed),
                               StubAnalyzer(), out_dir=base / f"s{seed}").run(30))
export_curve(traces[0], base / "single.csv")
print(f"\nwrote {base / 'single.csv'}")
print("aggregate (round, mean, min, max), every 10th row:")
for row in aggregate_curves(traces)[::10]:
    print(f"  {row[0]:>3}  {row[1]:.4f}  {row[2]:.4f}  {row[3]:.4f}")
