"""The learn-design-experiment-analyze loop.

Each round: sample context nodes from the database, retrieve cognition
(skipped under the no-cognition ablation), generate a candidate, quick-test
and evaluate it in a sandboxed child process, analyze the outcome (the
no-analyzer ablation stores raw logs instead), and insert the node. A
failed generation still consumes a round and records a score-0 node, so
round counts stay comparable across configurations.

With stub agents the loop runs strictly sequentially and every wall-clock
field is logical (created_at = round, runtime 0), making the trace, state
file, and curve byte-reproducible under a fixed seed. With remote agents,
up to ``workers`` rounds are pipelined; nodes are inserted in completion
order while the trace file stays round-ordered via a reorder buffer.
"""

from __future__ import annotations

import dataclasses
import logging
import shutil
import tempfile
import time
from concurrent.futures import FIRST_COMPLETED, ThreadPoolExecutor, wait
from dataclasses import dataclass
from pathlib import Path

from evoloop.agents.analyzer import raw_log_text
from evoloop.agents.judge import combine_fitness, safe_judge_score
from evoloop.agents.types import Candidate, GenerationRequest
from evoloop.benchmarks.base import Benchmark, last_payload_line
from evoloop.cognition import CognitionStore
from evoloop.config import RunConfig, config_as_flat_dict, config_from_flat_dict, dump_config
from evoloop.database import FeatureEngine, NodeDatabase, normalize_score
from evoloop.embedding import HashingEmbedder
from evoloop.engineer import DEFAULT_INTERPRETER, ExecutionSpec, ProcessRegistry, evaluate, quick_test
from evoloop.errors import ChatError, EvoloopError, GenerationFailedError, PayloadError
from evoloop.state import NodeLog, read_state
from evoloop.trace import RoundRecord, RunTrace, TraceLog, read_trace, trace_header
from evoloop.types import EvalResult, Node, ProgramArtifact
from evoloop.util import derived_rng, derived_seed

logger = logging.getLogger(__name__)

STATE_FILE = "state.jsonl"
TRACE_FILE = "trace.jsonl"
CONFIG_FILE = "config.cfg"


@dataclass
class _RoundOutcome:
    round_index: int
    parent_id: int | None
    reference_ids: tuple[int, ...]
    cognition_ids: tuple[int, ...]
    candidate: Candidate | None
    eval_result: EvalResult | None
    judge_value: float | None
    failure_reason: str | None


class EvolutionRun:
    """One run of the loop against a benchmark, resumable from its run dir."""

    def __init__(self, config: RunConfig, benchmark: Benchmark, researcher, analyzer,
                 judge=None, *, cognition_store: CognitionStore | None = None,
                 out_dir: str | Path | None = None, no_analyzer: bool = False,
                 no_cognition: bool = False, deterministic: bool = True,
                 pipeline: bool = False, interpreter_command: tuple[str, ...] | None = None):
        self.config = config
        self.benchmark = benchmark
        self.researcher = researcher
        self.analyzer = analyzer
        self.judge = judge
        self.store = cognition_store
        self.no_analyzer = no_analyzer
        self.no_cognition = no_cognition
        self.deterministic = deterministic
        self.pipeline = pipeline and config.workers > 1
        self.interpreter_command = interpreter_command
        self.registry = ProcessRegistry()

        embedder = cognition_store.embedder if cognition_store is not None else HashingEmbedder()
        self.db = NodeDatabase(config, FeatureEngine(config, embedder.embed))

        self.out_dir = Path(out_dir) if out_dir is not None else None
        self.state_log: NodeLog | None = None
        self.trace_log: TraceLog | None = None
        self.trace = RunTrace(seed=config.seed, benchmark=benchmark.name,
                              config=config_as_flat_dict(config))
        self._completed_round = 0

    # -- persistence wiring ---------------------------------------------

    def _open_logs(self) -> None:
        if self.out_dir is None:
            return
        self.out_dir.mkdir(parents=True, exist_ok=True)
        config_path = self.out_dir / CONFIG_FILE
        if not config_path.exists():
            config_path.write_text(dump_config(self.config), encoding="utf-8")
        header = trace_header(self.config.seed, self.benchmark.name, self.trace.config,
                              {"no_analyzer": self.no_analyzer, "no_cognition": self.no_cognition})
        self.state_log = NodeLog(self.out_dir / STATE_FILE)
        self.trace_log = TraceLog(self.out_dir / TRACE_FILE, header)

    def load_checkpoint(self) -> int:
        """Replay a run directory: nodes re-inserted round by round with
        migrations re-applied, stopping at the last round for which both the
        node record and the trace row survived. Returns that round."""
        assert self.out_dir is not None
        state_path = self.out_dir / STATE_FILE
        trace_path = self.out_dir / TRACE_FILE
        if not state_path.exists() or not trace_path.exists():
            self._open_logs()
            return 0
        _, nodes = read_state(state_path, recover=True)
        old_trace = read_trace(trace_path, recover=True)
        completed = min(
            max((n.round for n in nodes), default=0),
            max((r.round for r in old_trace.rows), default=0),
        )
        nodes = [n for n in nodes if n.round <= completed]
        rows = [r for r in old_trace.rows if r.round <= completed]

        # Rewrite both files truncated to the consistent prefix, then reopen
        # them in append mode.
        state_path.unlink()
        trace_path.unlink()
        self._open_logs()
        for node in sorted(nodes, key=lambda n: n.round):
            stored = self.db.insert_node(node)
            self.state_log.append(stored)
            if self.config.sampling.algorithm == "map_elites_island":
                self.db.migrate_if_due(node.round)
        for row in sorted(rows, key=lambda r: r.round):
            self.trace.rows.append(row)
            self.trace_log.append(row)
        self._completed_round = completed
        return completed

    # -- the loop ---------------------------------------------------------

    def run(self, rounds: int, *, resume: bool = False) -> RunTrace:
        if resume and self.out_dir is not None:
            start = self.load_checkpoint() + 1
        else:
            self._open_logs()
            start = self._completed_round + 1
        if rounds < start - 1:
            raise EvoloopError(f"run already has {start - 1} rounds, cannot shrink to {rounds}")
        if self.pipeline:
            self._run_pipelined(start, rounds)
        else:
            for round_index in range(start, rounds + 1):
                outcome = self._execute_round(round_index, self._build_request(round_index))
                self._finish_round(outcome)
                if self._failure_budget_exceeded():
                    break
        return self.trace

    def _run_pipelined(self, start: int, rounds: int) -> None:
        buffered: dict[int, _RoundOutcome] = {}
        next_to_finish = start
        with ThreadPoolExecutor(max_workers=self.config.workers) as executor:
            pending = {}
            next_to_submit = start
            try:
                while next_to_finish <= rounds:
                    while next_to_submit <= rounds and len(pending) < self.config.workers:
                        request = self._build_request(next_to_submit)
                        pending[executor.submit(self._execute_round, next_to_submit, request)] = next_to_submit
                        next_to_submit += 1
                    if not pending:
                        break
                    done, _ = wait(pending, return_when=FIRST_COMPLETED)
                    for future in done:
                        del pending[future]
                        outcome = future.result()  # propagates infrastructure errors
                        buffered[outcome.round_index] = outcome
                    # Insert in completion order; flush trace rows in round order.
                    while next_to_finish in buffered:
                        self._finish_round(buffered.pop(next_to_finish))
                        next_to_finish += 1
            except BaseException:
                # Abort: drop queued rounds and kill in-flight candidates.
                # Completed prefix rounds are already persisted, so the run
                # resumes from the checkpoint.
                for future in pending:
                    future.cancel()
                self.registry.kill_all()
                raise

    def _failure_budget_exceeded(self) -> bool:
        budget = self.config.max_failure_streak
        if budget <= 0:
            return False
        streak = 0
        for row in reversed(self.trace.rows):
            if row.failure_reason is None:
                break
            streak += 1
        return streak >= budget

    # -- one round ---------------------------------------------------------

    def _build_request(self, round_index: int) -> GenerationRequest:
        rng = derived_rng(self.config.seed, round_index, "sample")
        context = self.db.sample_context(self.config.sample_n, rng, round_index)
        items: tuple = ()
        if self.store is not None and not self.no_cognition and len(self.store) > 0:
            if context.parent is not None:
                pool = (context.parent, *context.references)
                queries = [n.analysis or n.motivation for n in pool]
            else:
                queries = [self.config.task_description or self.benchmark.task_description]
            items = tuple(self.store.retrieve(
                queries, k=self.config.cognition.top_k, threshold=self.config.cognition.threshold))
        mode = self.config.generation_mode if context.parent is not None else "full"
        return GenerationRequest(
            task_description=self.config.task_description or self.benchmark.task_description,
            parent=context.parent,
            references=context.references,
            cognition=items,
            mode=mode,
            decoding=dict(self.config.decoding),
        )

    def _execute_round(self, round_index: int, request: GenerationRequest) -> _RoundOutcome:
        parent_id = request.parent.id if request.parent is not None else None
        reference_ids = tuple(n.id for n in request.references)
        cognition_ids = tuple(r.item.id for r in request.cognition)
        try:
            candidate = self.researcher.generate(request, round_index=round_index)
        except GenerationFailedError as exc:
            logger.warning("round %d: generation failed: %s", round_index, exc)
            return _RoundOutcome(round_index, parent_id, reference_ids, cognition_ids,
                                 candidate=None, eval_result=None, judge_value=None,
                                 failure_reason="generation-failed")

        workdir = tempfile.mkdtemp(prefix=f"evoloop-round{round_index}-")
        spec = ExecutionSpec(
            program=candidate.program,
            interpreter_command=self.interpreter_command or DEFAULT_INTERPRETER,
            workdir=workdir,
            timeout_s=self.config.engineer_timeout_s,
            env={
                "SEED": str(derived_seed(self.config.seed, round_index, "exec") % (2 ** 31)),
                "BUDGET": str(self.config.engineer_timeout_s),
            },
            quick_test=self.config.quick_test,
        )
        failure_reason = None
        try:
            eval_result = None
            if self.config.quick_test:
                passed, quick_result = quick_test(spec, self.benchmark, registry=self.registry)
                if not passed:
                    eval_result = quick_result
                    failure_reason = "quick-test"
            if eval_result is None:
                eval_result = evaluate(spec, self.benchmark,
                                       retries=self.config.engineer_retries, registry=self.registry)
                if eval_result.timed_out:
                    failure_reason = "timeout"
                elif not eval_result.success:
                    failure_reason = "execution-failed"
        finally:
            shutil.rmtree(workdir, ignore_errors=True)

        judge_value = None
        if self.judge is not None and self.config.judge_enabled and eval_result.success:
            judge_value = safe_judge_score(self.judge, candidate.program.code,
                                           self.config.task_description or self.benchmark.task_description)
        return _RoundOutcome(round_index, parent_id, reference_ids, cognition_ids,
                             candidate, eval_result, judge_value, failure_reason)

    def _finish_round(self, outcome: _RoundOutcome) -> None:
        t = outcome.round_index
        eval_result = outcome.eval_result
        if eval_result is not None and self.deterministic:
            eval_result = dataclasses.replace(eval_result, runtime_s=0.0)

        score = eval_result.primary_score if eval_result is not None and eval_result.success else 0.0
        if outcome.judge_value is not None:
            low, high = self.db.score_bounds() if len(self.db) else (score, score)
            score = combine_fitness(
                score, outcome.judge_value, self.config.judge_weight, self.config.judge_enabled,
                normalize=lambda p: normalize_score(p, min(low, p), max(high, p)))

        analysis, analysis_kind = self._analyze(outcome, eval_result)
        program = outcome.candidate.program if outcome.candidate is not None else ProgramArtifact(code="")
        motivation = outcome.candidate.motivation if outcome.candidate is not None else ""
        meta = {
            "reference_ids": list(outcome.reference_ids),
            "cognition_ids": list(outcome.cognition_ids),
            "analysis_kind": analysis_kind,
        }
        if outcome.failure_reason is not None:
            meta["failure_reason"] = outcome.failure_reason
        node = Node(
            id=None,
            parent_id=outcome.parent_id,
            round=t,
            motivation=motivation,
            program=program,
            eval=eval_result,
            analysis=analysis,
            score=score,
            island=t % self.config.sampling.islands,
            features=None,
            created_at=float(t) if self.deterministic else time.time(),
            meta=meta,
        )
        stored = self.db.insert_node(node)
        if self.state_log is not None:
            self.state_log.append(stored)
        if self.config.sampling.algorithm == "map_elites_island":
            self.db.migrate_if_due(t)

        runtime = eval_result.runtime_s if eval_result is not None else 0.0
        row = RoundRecord(
            round=t,
            parent_id=outcome.parent_id,
            node_id=stored.id,
            score=score,
            best_so_far=self.db.best().score,
            runtime_s=runtime,
            failure_reason=outcome.failure_reason,
        )
        self.trace.rows.append(row)
        if self.trace_log is not None:
            self.trace_log.append(row)
        self._completed_round = t

    def _analyze(self, outcome: _RoundOutcome, eval_result: EvalResult | None) -> tuple[str, str]:
        if eval_result is None:
            text = f"score: 0.0\nfailure: {outcome.failure_reason or 'unknown'}"
            return text, "raw_logs" if self.no_analyzer else "report"
        if self.no_analyzer:
            return raw_log_text(eval_result), "raw_logs"
        diagnostics = ""
        if eval_result.success:
            try:
                payload = self.benchmark.parse_payload(last_payload_line(eval_result.stdout))
                diagnostics = self.benchmark.diagnostics(payload)
            except PayloadError:
                diagnostics = ""
        parent_score = None
        if outcome.parent_id is not None:
            try:
                parent_score = self.db.get(outcome.parent_id).score
            except KeyError:
                parent_score = None
        code = outcome.candidate.program.code if outcome.candidate is not None else ""
        try:
            text = self.analyzer.analyze(
                code, eval_result,
                self.config.task_description or self.benchmark.task_description,
                parent_score=parent_score, diagnostics=diagnostics,
                failure_reason=outcome.failure_reason or "")
            return text, "report"
        except ChatError as exc:
            logger.warning("analyzer failed, storing empty report: %s", exc)
            return "", "report-error"


def resumable_config(run_dir: str | Path) -> tuple[RunConfig, str, dict]:
    """Read (config, benchmark name, ablation flags) from a run's trace."""
    trace = read_trace(Path(run_dir) / TRACE_FILE, recover=True)
    return config_from_flat_dict(trace.config), trace.benchmark, dict(trace.flags)


def rebuild_database(run_dir: str | Path) -> NodeDatabase:
    """Replay a run directory into a database (for archive dumps etc.)."""
    config, benchmark, _ = resumable_config(run_dir)
    _, nodes = read_state(Path(run_dir) / STATE_FILE, recover=True)
    db = NodeDatabase(config, FeatureEngine(config, HashingEmbedder().embed))
    for node in sorted(nodes, key=lambda n: n.round):
        db.insert(node)
        if config.sampling.algorithm == "map_elites_island":
            db.migrate_if_due(node.round)
    return db
