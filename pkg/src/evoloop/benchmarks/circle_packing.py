"""Circle packing in the unit square: place n circles, none overlapping,
all inside, maximizing the sum of radii. The shipped task uses n = 26.

The validator tolerance (1e-9) is slightly tighter than the optimizer-side
epsilon the domain notes recommend (1e-8), so optimizer-feasible solutions
always pass. Wrong circle count is invalid, never truncated.
"""

from __future__ import annotations

import json
import math
import random
from dataclasses import dataclass
from typing import Any, Sequence

from evoloop.benchmarks.base import (
    NONPOSITIVE_RADIUS,
    OUT_OF_BOUNDS,
    OVERLAP,
    WRONG_COUNT,
    ValidationReport,
    Violation,
    extract_payload,
    parse_json_payload,
    payload_program,
)
from evoloop.errors import PayloadError

DEFAULT_N = 26
DEFAULT_TOL = 1e-9

# Margin used by the stub's repair/inflation pass; above the validator
# tolerance so repaired packings always validate.
STUB_MARGIN = 1e-8

Circle = tuple[float, float, float]


@dataclass(frozen=True)
class Packing:
    circles: tuple[Circle, ...]

    @classmethod
    def from_payload(cls, payload: dict[str, Any]) -> "Packing":
        raw = payload.get("circles")
        if not isinstance(raw, list):
            raise PayloadError("payload is missing a 'circles' list")
        circles = []
        for entry in raw:
            if not isinstance(entry, (list, tuple)) or len(entry) != 3:
                raise PayloadError("each circle must be a [x, y, r] triple")
            try:
                circles.append(tuple(float(v) for v in entry))
            except (TypeError, ValueError) as exc:
                raise PayloadError(f"non-numeric circle entry: {entry!r}") from exc
        return cls(circles=tuple(circles))

    def to_payload(self) -> dict[str, Any]:
        return {"circles": [list(c) for c in self.circles]}

    def sum_radii(self) -> float:
        return math.fsum(r for _, _, r in self.circles)


def validate(packing: Packing, n_required: int, tol: float = DEFAULT_TOL) -> ValidationReport:
    """Check count, positivity, containment, and pairwise separation.

    A circle is inside when r <= x <= 1-r and r <= y <= 1-r within tol; a
    pair is disjoint when dist >= r_i + r_j - tol. Every violation is
    reported with its magnitude (how far past the constraint it lies).
    """
    violations: list[Violation] = []
    circles = packing.circles
    if len(circles) != n_required:
        violations.append(Violation(WRONG_COUNT, (), float(abs(len(circles) - n_required))))
    for i, (x, y, r) in enumerate(circles):
        if not all(math.isfinite(v) for v in (x, y, r)):
            violations.append(Violation(OUT_OF_BOUNDS, (i,), math.inf))
            continue
        if r <= 0:
            violations.append(Violation(NONPOSITIVE_RADIUS, (i,), -r))
            continue
        overshoot = max(r - x, x + r - 1.0, r - y, y + r - 1.0)
        if overshoot > tol:
            violations.append(Violation(OUT_OF_BOUNDS, (i,), overshoot))
    for i in range(len(circles)):
        xi, yi, ri = circles[i]
        for j in range(i + 1, len(circles)):
            xj, yj, rj = circles[j]
            overlap = (ri + rj) - math.dist((xi, yi), (xj, yj))
            if overlap > tol:
                violations.append(Violation(OVERLAP, (i, j), overlap))
    return ValidationReport(violations=tuple(violations))


def score(packing: Packing, n_required: int, tol: float = DEFAULT_TOL) -> float:
    """Sum of radii when valid, else exactly 0."""
    if not validate(packing, n_required, tol).valid:
        return 0.0
    return packing.sum_radii()


def boundary_slack(circle: Circle) -> float:
    x, y, r = circle
    return min(x - r, 1.0 - x - r, y - r, 1.0 - y - r)


def pair_slack(a: Circle, b: Circle) -> float:
    return math.dist((a[0], a[1]), (b[0], b[1])) - a[2] - b[2]


def packing_diagnostics(packing: Packing, n_required: int, tol: float = DEFAULT_TOL) -> str:
    """Readable summary for analysis: slacks, radius histogram, violations."""
    circles = packing.circles
    lines = [f"circles: {len(circles)}", f"sum_radii: {packing.sum_radii():.6f}"]
    if circles:
        b_slacks = [(boundary_slack(c), i) for i, c in enumerate(circles)]
        min_b, min_b_i = min(b_slacks)
        lines.append(f"min_boundary_slack: {min_b:.6f} (circle {min_b_i})")
        if len(circles) > 1:
            p_slacks = [
                (pair_slack(circles[i], circles[j]), i, j)
                for i in range(len(circles))
                for j in range(i + 1, len(circles))
            ]
            min_p, min_p_i, min_p_j = min(p_slacks)
            lines.append(f"min_pair_slack: {min_p:.6f} (circles {min_p_i}, {min_p_j})")
        radii = sorted(r for _, _, r in circles)
        lines.append("radius_histogram: " + _histogram(radii, bins=5))
    report = validate(packing, n_required, tol)
    lines.append(f"violations: {len(report.violations)}")
    for v in report.violations:
        where = ", ".join(str(i) for i in v.indices)
        lines.append(f"- {v.kind} ({where}): magnitude {v.magnitude:.6f}")
    return "\n".join(lines)


def _histogram(sorted_values: Sequence[float], bins: int) -> str:
    low, high = sorted_values[0], sorted_values[-1]
    if high <= low:
        return f"[{len(sorted_values)}] at {low:.4f}"
    counts = [0] * bins
    for v in sorted_values:
        idx = min(int((v - low) / (high - low) * bins), bins - 1)
        counts[idx] += 1
    return f"{counts} over [{low:.4f}, {high:.4f}]"


# -- stub researcher machinery -------------------------------------------


def max_feasible_radius(x: float, y: float, others: Sequence[Circle]) -> float:
    cap = min(x, 1.0 - x, y, 1.0 - y)
    for ox, oy, orad in others:
        cap = min(cap, math.dist((x, y), (ox, oy)) - orad)
    return cap


def _best_free_spot(others: Sequence[Circle], grid: int = 20) -> tuple[float, float, float]:
    """Grid point with the largest clearance from walls and placed circles."""
    best = (0.5, 0.5, -math.inf)
    for gi in range(1, grid):
        for gj in range(1, grid):
            x, y = gi / grid, gj / grid
            clearance = max_feasible_radius(x, y, others)
            if clearance > best[2]:
                best = (x, y, clearance)
    return best


def repair(circles: Sequence[Circle], n: int, margin: float = STUB_MARGIN) -> list[Circle]:
    """Deterministic feasibility repair: place circles sequentially, capping
    each radius by its clearance; relocate circles whose spot is swamped."""
    placed: list[Circle] = []
    todo = list(circles[:n])
    while len(todo) < n:
        todo.append((0.5, 0.5, 1e-4))
    for x, y, r in todo:
        x = min(max(x, 1e-6), 1.0 - 1e-6)
        y = min(max(y, 1e-6), 1.0 - 1e-6)
        r = max(r, 1e-6)
        cap = max_feasible_radius(x, y, placed) - margin
        if cap <= 1e-6:
            x, y, clearance = _best_free_spot(placed)
            cap = clearance - margin
            shrink = 1.0
            while cap <= 1e-6 and shrink > 1e-12:
                # Grid is swamped: shrink everything already placed and retry.
                shrink *= 0.5
                placed = [(px, py, pr * 0.5) for px, py, pr in placed]
                x, y, clearance = _best_free_spot(placed)
                cap = clearance - margin
        placed.append((x, y, min(r, cap)))
    return placed


def inflate(circles: Sequence[Circle], passes: int = 3, margin: float = STUB_MARGIN) -> list[Circle]:
    """Greedy radius inflation: grow each circle to its clearance, never
    shrinking, over a fixed number of passes."""
    out = list(circles)
    for _ in range(passes):
        for i, (x, y, r) in enumerate(out):
            others = out[:i] + out[i + 1:]
            cap = max_feasible_radius(x, y, others) - margin
            out[i] = (x, y, max(r, cap))
    return out


def stub_mutate(payload: dict[str, Any], rng: random.Random, sigma: float,
                n: int = DEFAULT_N) -> dict[str, Any]:
    """Seeded Gaussian perturbation of a random subset of circles (sometimes
    relocating the smallest circle to the emptiest spot instead), followed by
    a fixed-iteration feasibility repair and greedy radius inflation.

    Pure function of (payload, rng state, sigma); with sigma = 0 a valid
    parent comes back repaired and inflated, never meaningfully worse.
    """
    packing = Packing.from_payload(payload)
    circles = list(packing.circles)
    if sigma > 0.0 and circles:
        if rng.random() < 0.25:
            idx = min(range(len(circles)), key=lambda i: circles[i][2])
            others = circles[:idx] + circles[idx + 1:]
            x, y, clearance = _best_free_spot(others, grid=25)
            circles[idx] = (x, y, max(clearance - STUB_MARGIN, 1e-4))
        else:
            count = rng.randint(1, max(1, len(circles) // 4))
            for i in rng.sample(range(len(circles)), count):
                x, y, r = circles[i]
                circles[i] = (
                    x + rng.gauss(0.0, sigma),
                    y + rng.gauss(0.0, sigma),
                    r + rng.gauss(0.0, sigma / 4.0),
                )
    repaired = repair(circles, n)
    return Packing(tuple(inflate(repaired, passes=4))).to_payload()


def random_start_packing(n: int, rng: random.Random) -> Packing:
    """Jittered grid of tiny circles, inflated into a valid packing."""
    cols = math.ceil(math.sqrt(n))
    rows = math.ceil(n / cols)
    circles: list[Circle] = []
    for index in range(n):
        cx = (index % cols + 0.5) / cols + rng.uniform(-0.3, 0.3) / cols
        cy = (index // cols + 0.5) / rows + rng.uniform(-0.3, 0.3) / rows
        circles.append((cx, cy, 1e-3))
    return Packing(tuple(inflate(repair(circles, n))))


class CirclePackingBenchmark:
    name = "circle_packing"

    def __init__(self, n: int = DEFAULT_N, tol: float = DEFAULT_TOL):
        self.n = n
        self.tol = tol
        self.task_description = (
            f"Place {n} circles inside the unit square so that no circle crosses the "
            "boundary and no two circles overlap, maximizing the sum of all radii. "
            'Print the result as a final stdout line: {"circles": [[x, y, r], ...]}.'
        )

    def parse_payload(self, line: str) -> Packing:
        return Packing.from_payload(parse_json_payload(line))

    def validate(self, payload: Packing) -> ValidationReport:
        return validate(payload, self.n, self.tol)

    def score(self, payload: Packing) -> float:
        return score(payload, self.n, self.tol)

    def metrics(self, payload: Packing, report: ValidationReport) -> dict[str, float]:
        return {
            "sum_radii": payload.sum_radii(),
            "n_circles": float(len(payload.circles)),
            "valid": 1.0 if report.valid else 0.0,
            "violation_count": float(len(report.violations)),
        }

    def diagnostics(self, payload: Packing) -> str:
        return packing_diagnostics(payload, self.n, self.tol)

    def stub_candidate(self, parent_code: str | None, rng: random.Random,
                       round_index: int) -> tuple[str, str]:
        parent_payload = extract_payload(parent_code) if parent_code else None
        if parent_payload is None:
            packing = random_start_packing(self.n, rng)
            motivation = "construct a jittered-grid packing and inflate radii"
            return motivation, payload_program(packing.to_payload())
        sigma = max(0.12 * (0.985 ** round_index), 0.008)
        payload = stub_mutate(parent_payload, rng, sigma, self.n)
        motivation = f"perturb parent (sigma={sigma:.4f}), repair, and inflate radii"
        return motivation, payload_program(payload)


def load_packing_file(path) -> Packing:
    """Read a reference-solution file (same JSON schema as the wire payload)."""
    text = open(path, "r", encoding="utf-8").read().strip()
    return Packing.from_payload(json.loads(text))
