"""Evolution-curve export: per-round score and best-so-far, optionally
aggregated over repeated runs as mean/min/max per round."""

from __future__ import annotations

import csv
import json
from pathlib import Path
from typing import Sequence

from evoloop.trace import RunTrace


def export_curve(trace: RunTrace, path: str | Path, fmt: str = "csv") -> None:
    rows = [(r.round, r.score, r.best_so_far) for r in trace.rows]
    path = Path(path)
    if fmt == "csv":
        with path.open("w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh)
            writer.writerow(["round", "score", "best_so_far"])
            writer.writerows(rows)
    elif fmt == "structured":
        payload = [{"round": r, "score": s, "best_so_far": b} for r, s, b in rows]
        path.write_text(json.dumps(payload, indent=2) + "\n", encoding="utf-8")
    else:
        raise ValueError(f"unknown curve format {fmt!r}")


def aggregate_curves(traces: Sequence[RunTrace]) -> list[tuple[int, float, float, float]]:
    """Merge best-so-far curves: (round, mean, min, max) per round, over the
    rounds every trace covers."""
    if not traces:
        return []
    common = min(len(t.rows) for t in traces)
    out = []
    for i in range(common):
        values = [t.rows[i].best_so_far for t in traces]
        out.append((traces[0].rows[i].round, sum(values) / len(values), min(values), max(values)))
    return out


def export_aggregate(traces: Sequence[RunTrace], path: str | Path, fmt: str = "csv") -> None:
    rows = aggregate_curves(traces)
    path = Path(path)
    if fmt == "csv":
        with path.open("w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh)
            writer.writerow(["round", "mean", "min", "max"])
            writer.writerows(rows)
    elif fmt == "structured":
        payload = [{"round": r, "mean": m, "min": lo, "max": hi} for r, m, lo, hi in rows]
        path.write_text(json.dumps(payload, indent=2) + "\n", encoding="utf-8")
    else:
        raise ValueError(f"unknown curve format {fmt!r}")
