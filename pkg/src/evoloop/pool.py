"""Bounded worker pool for candidate evaluation.

At most ``workers`` evaluations run concurrently; completion order may
differ from submission order, and callers join results back to their round
indices through the returned futures. Shutdown kills in-flight candidate
process groups so no orphans survive the pool.
"""

from __future__ import annotations

from concurrent.futures import Future, ThreadPoolExecutor

from evoloop.benchmarks.base import Benchmark
from evoloop.engineer import ExecutionSpec, ProcessRegistry, evaluate, quick_test
from evoloop.types import EvalResult


class EvaluationPool:
    def __init__(self, workers: int):
        if workers < 1:
            raise ValueError("workers must be >= 1")
        self.workers = workers
        self.registry = ProcessRegistry()
        self._executor = ThreadPoolExecutor(max_workers=workers, thread_name_prefix="evoloop-eval")

    def submit(self, spec: ExecutionSpec, benchmark: Benchmark, *, retries: int = 2) -> "Future[EvalResult]":
        return self._executor.submit(self._evaluate, spec, benchmark, retries)

    def _evaluate(self, spec: ExecutionSpec, benchmark: Benchmark, retries: int) -> EvalResult:
        if spec.quick_test:
            passed, result = quick_test(spec, benchmark, registry=self.registry)
            if not passed:
                return result
        return evaluate(spec, benchmark, retries=retries, registry=self.registry)

    def shutdown(self, *, cancel: bool = False) -> None:
        """Join the pool; with ``cancel`` pending work is dropped and live
        candidate process groups are killed before the join."""
        if cancel:
            self._executor.shutdown(wait=False, cancel_futures=True)
            self.registry.kill_all()
        self._executor.shutdown(wait=True)

    def __enter__(self) -> "EvaluationPool":
        return self

    def __exit__(self, exc_type, exc, tb) -> None:
        self.shutdown(cancel=exc_type is not None)
