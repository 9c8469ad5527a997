#!/usr/bin/env python3
"""One-time build step: produce the 26-circle golden reference packing.

Runs the offline refinement oracle (multi-start constructors + SLSQP with
explicit constraints + basin hopping) and writes the best strictly-valid
packing to tests/fixtures/packing26_reference.json in the candidate wire
schema. Give it minutes to hours; more budget, better packing.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "src"))

from evoloop.benchmarks.circle_packing import validate
from evoloop.benchmarks.refine import build_reference


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--out", type=Path,
                        default=Path(__file__).resolve().parents[1] / "tests/fixtures/packing26_reference.json")
    parser.add_argument("--budget", type=float, default=1200.0, help="time budget in seconds")
    parser.add_argument("--seed", type=int, default=7)
    args = parser.parse_args()

    packing = build_reference(time_budget_s=args.budget, seed=args.seed,
                              log=lambda msg: print(msg, flush=True))
    report = validate(packing, 26)
    assert report.valid, f"builder produced an invalid packing: {report.violations}"
    args.out.parent.mkdir(parents=True, exist_ok=True)
    args.out.write_text(json.dumps(packing.to_payload()) + "\n", encoding="utf-8")
    print(f"wrote {args.out} with sum_radii = {packing.sum_radii():.6f}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
