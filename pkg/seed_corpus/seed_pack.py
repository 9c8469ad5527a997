#!/usr/bin/env python3
"""26-circle packing candidate: greedy constructors + constrained refinement.

Builds several initial layouts (hexagonal rows, a 5x5 grid with one pocket
circle, a corner-weighted variant), repairs each to strict feasibility,
then runs a feasibility-preserving local search with greedy radius
inflation. No-overlap and in-bounds constraints are enforced explicitly
with a small epsilon at every step; no penalty terms.

Environment contract: SEED fixes all randomness (stdout is bit-identical
for a fixed SEED), QUICK=1 emits a constructor-only packing fast, BUDGET
is advisory. Prints exactly one final line: {"circles": [[x, y, r], ...]}.
"""

import json
import math
import os
import random

N = 26
EPS = 1e-8  # keeps every constraint strictly satisfied under rescoring


def clearance(x, y, others):
    cap = min(x, 1.0 - x, y, 1.0 - y)
    for ox, oy, orad in others:
        cap = min(cap, math.hypot(x - ox, y - oy) - orad)
    return cap


def repair(circles):
    placed = []
    for x, y, r in circles[:N]:
        x = min(max(x, 1e-6), 1.0 - 1e-6)
        y = min(max(y, 1e-6), 1.0 - 1e-6)
        cap = clearance(x, y, placed) - EPS
        if cap <= 1e-6:
            # fall back to the emptiest grid point
            best = None
            for gi in range(1, 20):
                for gj in range(1, 20):
                    px, py = gi / 20, gj / 20
                    c = clearance(px, py, placed)
                    if best is None or c > best[2]:
                        best = (px, py, c)
            x, y, cap = best[0], best[1], best[2] - EPS
        placed.append((x, y, max(min(r, cap), 1e-6)))
    while len(placed) < N:
        placed.append((0.5, 0.5, 1e-6))
    return placed


def inflate(circles, passes=4):
    out = list(circles)
    for _ in range(passes):
        for i, (x, y, r) in enumerate(out):
            cap = clearance(x, y, out[:i] + out[i + 1:]) - EPS
            out[i] = (x, y, max(r, cap))
    return out


def total(circles):
    return sum(r for _, _, r in circles)


# -- constructors (multi-start: five initial configurations) ------------------

def hex_rows(pattern):
    rows = len(pattern)
    circles = []
    for row, count in enumerate(pattern):
        y = (row + 0.5) / rows
        for col in range(count):
            x = (col + 0.5) / count
            circles.append((x, y, 0.4 / max(max(pattern), rows)))
    return circles


def grid_plus_one():
    circles = [((i + 0.5) / 5, (j + 0.5) / 5, 0.099) for i in range(5) for j in range(5)]
    circles.append((0.2, 0.2, 0.01))  # pocket between four grid circles
    return circles


def corner_weighted():
    circles = [(0.13, 0.13, 0.13), (0.87, 0.13, 0.13), (0.13, 0.87, 0.13), (0.87, 0.87, 0.13)]
    inner = hex_rows((5, 4, 4, 5, 4))
    for x, y, _ in inner:
        circles.append((0.18 + 0.64 * x, 0.18 + 0.64 * y, 0.06))
    return circles


CONSTRUCTORS = (
    lambda: hex_rows((6, 5, 6, 5, 4)),
    lambda: hex_rows((5, 6, 5, 6, 4)),
    lambda: hex_rows((7, 6, 7, 6)),
    grid_plus_one,
    corner_weighted,
)


# -- refinement -----------------------------------------------------------------

def local_refine(circles, rng, iterations):
    """Annealed feasibility-preserving search.

    Each proposal moves 1-3 circles, re-derives their radii from clearance,
    and re-inflates once; small regressions are accepted early so the walk
    can leave the tangent local optima the constructors produce. The best
    packing ever seen is what gets returned.
    """
    current = inflate(circles)
    current_sum = total(current)
    best, best_sum = list(current), current_sum
    for step in range(iterations):
        sigma = max(0.18 * (0.9993 ** step), 0.008)
        temperature = 0.03 * (0.9992 ** step)
        trial = list(current)
        for i in rng.sample(range(N), rng.randint(1, 3)):
            x, y, _ = trial[i]
            nx = min(max(x + rng.gauss(0.0, sigma), 1e-6), 1.0 - 1e-6)
            ny = min(max(y + rng.gauss(0.0, sigma), 1e-6), 1.0 - 1e-6)
            cap = clearance(nx, ny, trial[:i] + trial[i + 1:]) - EPS
            if cap > 1e-6:
                trial[i] = (nx, ny, cap)
        trial = inflate(trial, passes=1)
        trial_sum = total(trial)
        if trial_sum > current_sum - temperature:
            current, current_sum = trial, trial_sum
            if trial_sum > best_sum:
                best, best_sum = list(trial), trial_sum
    return inflate(best)


def main():
    seed = int(os.environ.get("SEED", "0"))
    quick = os.environ.get("QUICK") == "1"
    rng = random.Random(seed)

    candidates = [inflate(repair(make())) for make in CONSTRUCTORS]
    best = max(candidates, key=total)
    if not quick:
        iterations = 4000
        refined = []
        for start in candidates:
            refined.append(local_refine(start, rng, iterations))
        best = max(refined + [best], key=total)

    print(json.dumps({"circles": [[x, y, r] for x, y, r in best]}))


if __name__ == "__main__":
    main()
