"""Synthetic numeric landscape for deterministic end-to-end tests.

The candidate payload is a vector v; the score is 1 - ||v - target||^2
with the target fixed by the run seed. The stub mutation is a Gaussian
perturbation with a decaying step, so a seeded 200-round run climbs to
within 0.01 of the optimum without any model in the loop.
"""

from __future__ import annotations

import math
import random

from evoloop.benchmarks.base import (
    NONFINITE,
    WRONG_COUNT,
    ValidationReport,
    Violation,
    extract_payload,
    parse_json_payload,
    payload_program,
)
from evoloop.errors import PayloadError
from evoloop.util import derived_rng

DEFAULT_DIM = 3


class ToyLandscapeBenchmark:
    name = "toy_landscape"

    def __init__(self, seed: int = 0, dim: int = DEFAULT_DIM):
        self.dim = dim
        rng = derived_rng(seed, 0, "toy-target")
        self.target = tuple(rng.uniform(0.2, 0.8) for _ in range(dim))
        self.task_description = (
            f"Find the {dim}-dimensional vector maximizing a hidden concave score "
            '(1 minus squared distance to a fixed target). Print a final stdout '
            'line: {"vector": [v1, v2, ...]}.'
        )

    def parse_payload(self, line: str) -> tuple[float, ...]:
        payload = parse_json_payload(line)
        raw = payload.get("vector")
        if not isinstance(raw, list):
            raise PayloadError("payload is missing a 'vector' list")
        try:
            return tuple(float(v) for v in raw)
        except (TypeError, ValueError) as exc:
            raise PayloadError(f"non-numeric vector entry: {exc}") from exc

    def validate(self, payload: tuple[float, ...]) -> ValidationReport:
        violations = []
        if len(payload) != self.dim:
            violations.append(Violation(WRONG_COUNT, (), float(abs(len(payload) - self.dim))))
        for i, v in enumerate(payload):
            if not math.isfinite(v):
                violations.append(Violation(NONFINITE, (i,), math.inf))
        return ValidationReport(violations=tuple(violations))

    def score(self, payload: tuple[float, ...]) -> float:
        if not self.validate(payload).valid:
            return 0.0
        return 1.0 - math.fsum((v - t) ** 2 for v, t in zip(payload, self.target))

    def metrics(self, payload: tuple[float, ...], report: ValidationReport) -> dict[str, float]:
        return {
            "value": self.score(payload) if report.valid else 0.0,
            "dim": float(len(payload)),
            "valid": 1.0 if report.valid else 0.0,
        }

    def diagnostics(self, payload: tuple[float, ...]) -> str:
        return f"value: {self.score(payload):.6f}"

    def stub_candidate(self, parent_code: str | None, rng: random.Random,
                       round_index: int) -> tuple[str, str]:
        parent_payload = extract_payload(parent_code) if parent_code else None
        vector = None
        if parent_payload is not None:
            raw = parent_payload.get("vector")
            if isinstance(raw, list) and len(raw) == self.dim:
                vector = [float(v) for v in raw]
        if vector is None:
            vector = [rng.uniform(0.0, 1.0) for _ in range(self.dim)]
            motivation = "start from a uniform random vector"
        else:
            sigma = max(0.4 * (0.975 ** round_index), 0.01)
            vector = [v + rng.gauss(0.0, sigma) for v in vector]
            motivation = f"perturb parent vector (sigma={sigma:.4f})"
        return motivation, payload_program({"vector": vector})
