"""Task plug-ins and their registry."""

from __future__ import annotations

from evoloop.benchmarks.base import (
    Benchmark,
    ValidationReport,
    Violation,
    extract_payload,
    last_payload_line,
    parse_json_payload,
    payload_program,
)
from evoloop.benchmarks.circle_packing import CirclePackingBenchmark, Packing
from evoloop.benchmarks.toy import ToyLandscapeBenchmark

BENCHMARKS = ("circle_packing", "toy_landscape")


def make_benchmark(name: str, *, seed: int = 0, **kwargs) -> Benchmark:
    if name == "circle_packing":
        return CirclePackingBenchmark(**kwargs)
    if name == "toy_landscape":
        return ToyLandscapeBenchmark(seed=seed, **kwargs)
    raise KeyError(f"unknown benchmark {name!r}; available: {BENCHMARKS}")


__all__ = [
    "Benchmark",
    "ValidationReport",
    "Violation",
    "extract_payload",
    "last_payload_line",
    "parse_json_payload",
    "payload_program",
    "CirclePackingBenchmark",
    "Packing",
    "ToyLandscapeBenchmark",
    "BENCHMARKS",
    "make_benchmark",
]
