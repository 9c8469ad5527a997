"""MAP-Elites island archive: one elite per feature cell, per island.

Cell coordinates come from binning each feature (already in [0, 1]) into
``bins_per_feature`` buckets. Islands form a directed ring; on migration
rounds each island copies its top elites into the next island, where they
enter through the ordinary elite-replacement rule. All tie-breaks are by
lower node id so seeded runs are fully deterministic.
"""

from __future__ import annotations

import logging
import math
import random
from dataclasses import dataclass
from typing import Callable, Sequence

from evoloop.config import SamplingConfig
from evoloop.errors import NoCandidateError

logger = logging.getLogger(__name__)

Cell = tuple[int, ...]

MODE_EXPLOIT = "exploit"
MODE_EXPLORE = "explore"
MODE_UNIFORM = "uniform"


def bin_features(features: Sequence[float], bins: int) -> Cell:
    """Map unit-interval features to integer cell coordinates.

    coordinate_j = min(floor(f_j * bins), bins - 1); out-of-range values
    are clamped with a warning since extractors promise [0, 1].
    """
    coords = []
    for value in features:
        if value < 0.0 or value > 1.0:
            logger.warning("feature value %r outside [0, 1]; clamping", value)
            value = min(max(value, 0.0), 1.0)
        coords.append(min(int(math.floor(value * bins)), bins - 1))
    return tuple(coords)


def draw_mode(rng: random.Random, config: SamplingConfig) -> str:
    """Pick a sampling mode by the configured exploitation/exploration ratios."""
    r = rng.random()
    if r < config.exploitation_ratio:
        return MODE_EXPLOIT
    if r < config.exploitation_ratio + config.exploration_ratio:
        return MODE_EXPLORE
    return MODE_UNIFORM


@dataclass(frozen=True)
class MigrationEvent:
    source: int
    destination: int
    node_ids: tuple[int, ...]


class Archive:
    """Per-island grids mapping cell coordinates to a single elite node id."""

    def __init__(self, config: SamplingConfig):
        self.config = config
        self.islands: list[dict[Cell, int]] = [{} for _ in range(config.islands)]

    def island_for_round(self, round_index: int) -> int:
        return round_index % self.config.islands

    def offer(self, island: int, cell: Cell, node_id: int, score: float,
              get_score: Callable[[int], float]) -> bool:
        """Standard elite-replacement: fill an empty cell, or beat the
        incumbent's score strictly. Returns True when placed."""
        grid = self.islands[island]
        incumbent = grid.get(cell)
        if incumbent is None or score > get_score(incumbent):
            grid[cell] = node_id
            return True
        return False

    def offer_node(self, island: int, features: Sequence[float], node_id: int,
                   score: float, get_score: Callable[[int], float]) -> bool:
        cell = bin_features(features, self.config.bins_per_feature)
        return self.offer(island, cell, node_id, score, get_score)

    def elite_ids(self) -> set[int]:
        ids: set[int] = set()
        for grid in self.islands:
            ids.update(grid.values())
        return ids

    def remove_node(self, node_id: int) -> None:
        """Purge a node from every cell (only used by forced evictions)."""
        for grid in self.islands:
            for cell in [c for c, nid in grid.items() if nid == node_id]:
                del grid[cell]

    def occupied_cells(self, island: int) -> int:
        return len(self.islands[island])

    def migrate(self, round_index: int, get_score: Callable[[int], float]) -> list[MigrationEvent]:
        """Copy each island's top ceil(rate * occupied) elites into the next
        island on the ring. Copies are computed from a pre-migration snapshot
        so the outcome does not depend on island iteration order. No node is
        ever removed from the database by migration.
        """
        if round_index <= 0 or round_index % self.config.migration_interval != 0:
            return []
        snapshot = [dict(grid) for grid in self.islands]
        events: list[MigrationEvent] = []
        for island, grid in enumerate(snapshot):
            if not grid:
                continue
            count = math.ceil(self.config.migration_rate * len(grid))
            ranked = sorted(grid.items(), key=lambda kv: (-get_score(kv[1]), kv[1]))
            destination = (island + 1) % self.config.islands
            moved = []
            for cell, node_id in ranked[:count]:
                self.offer(destination, cell, node_id, get_score(node_id), get_score)
                moved.append(node_id)
            events.append(MigrationEvent(island, destination, tuple(moved)))
        return events

    # -- sampling ---------------------------------------------------------

    def sample(self, round_index: int, rng: random.Random, *,
               get_score: Callable[[int], float], mode: str | None = None) -> int:
        """Pick a parent elite from the round's island (ring round-robin).

        exploit: probability proportional to the island-normalized score;
        explore: uniform over elites whose cell neighborhoods are in the
        least-populated half (sparse regions of the grid);
        uniform: uniform over all elites of the island.
        """
        island = self.island_for_round(round_index)
        grid = self.islands[island]
        if not grid:
            raise NoCandidateError(f"island {island} archive is empty")
        if mode is None:
            mode = draw_mode(rng, self.config)

        entries = sorted(grid.items(), key=lambda kv: kv[1])  # stable order by node id
        if len(entries) == 1:
            return entries[0][1]

        if mode == MODE_EXPLOIT:
            scores = [get_score(node_id) for _, node_id in entries]
            low, high = min(scores), max(scores)
            if high > low:
                weights = [(s - low) / (high - low) for s in scores]
            else:
                weights = [1.0] * len(entries)
            total = sum(weights)
            if total <= 0.0:
                weights = [1.0] * len(entries)
                total = float(len(entries))
            pick = rng.random() * total
            acc = 0.0
            for (_, node_id), weight in zip(entries, weights):
                acc += weight
                if pick < acc:
                    return node_id
            return entries[-1][1]

        if mode == MODE_EXPLORE:
            sparse = self._sparse_half(grid)
            return rng.choice(sorted(grid[cell] for cell in sparse))

        return rng.choice(sorted(node_id for _, node_id in entries))

    def _sparse_half(self, grid: dict[Cell, int]) -> list[Cell]:
        """Occupied cells ranked by how many occupied neighbors they have
        (Chebyshev distance 1, self excluded); the emptier half."""
        occupied = set(grid)

        def neighbor_count(cell: Cell) -> int:
            count = 0
            for other in occupied:
                if other == cell:
                    continue
                if max(abs(a - b) for a, b in zip(cell, other)) <= 1:
                    count += 1
            return count

        ranked = sorted(occupied, key=lambda c: (neighbor_count(c), c))
        keep = math.ceil(len(ranked) / 2)
        return ranked[:keep]

    def dump(self, get_score: Callable[[int], float]) -> str:
        """Human-readable island -> cell -> (node id, score) listing."""
        lines = []
        for island, grid in enumerate(self.islands):
            lines.append(f"island {island}: {len(grid)} occupied cells")
            for cell in sorted(grid):
                node_id = grid[cell]
                lines.append(f"  cell {cell}: node {node_id} score {get_score(node_id):.6f}")
        return "\n".join(lines)
