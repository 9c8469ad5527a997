"""Persistent memory of the loop: node storage, eviction, parent sampling.

Four parent-selection policies sit behind one interface: UCB1 (each node
is a bandit arm valued by its range-normalized score), uniform random,
greedy (global best), and the MAP-Elites island archive. Writers are
serialized by a lock; readers see either the pre- or post-write snapshot.
"""

from __future__ import annotations

import math
import random
import threading
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Callable, Sequence

from evoloop.archive import Archive
from evoloop.config import RunConfig
from evoloop.errors import NoCandidateError, ValidationError
from evoloop.features import FeatureContext, resolve_extractors
from evoloop.state import read_state, write_state
from evoloop.types import Node


def normalize_score(raw: float, observed_min: float, observed_max: float) -> float:
    """Affine map of raw onto [0, 1]; a degenerate range maps to 0.5."""
    if observed_min > observed_max:
        raise ValidationError("normalize_score", "observed_min must be <= observed_max")
    if observed_min == observed_max:
        return 0.5
    value = (raw - observed_min) / (observed_max - observed_min)
    return min(max(value, 0.0), 1.0)


@dataclass(frozen=True)
class BanditStats:
    """Arm statistics for UCB1 over the current database contents."""

    visits: dict[int, int]
    values: dict[int, float]

    @property
    def total(self) -> int:
        return sum(self.visits.values())


def ucb1_select(stats: BanditStats, c: float) -> int:
    """UCB1 arm choice: unvisited arms first (oldest = lowest id), then
    argmax of value_i + c * sqrt(ln N / n_i), ties to the lower node id."""
    if not stats.visits:
        raise NoCandidateError("no selectable nodes")
    unvisited = sorted(nid for nid, n in stats.visits.items() if n == 0)
    if unvisited:
        return unvisited[0]
    total = stats.total
    best_id, best_ucb = None, -math.inf
    for nid in sorted(stats.visits):
        ucb = stats.values[nid] + c * math.sqrt(math.log(total) / stats.visits[nid])
        if ucb > best_ucb:
            best_id, best_ucb = nid, ucb
    return best_id


@dataclass
class _ExtractionContext:
    code: str
    max_code_length: int
    elite_embeddings: list[Sequence[float]]
    embed: Callable[[str], Sequence[float]]


class FeatureEngine:
    """Computes archive coordinates for a program, given the current elites."""

    def __init__(self, config: RunConfig, embed: Callable[[str], Sequence[float]],
                 extra_extractors: dict[str, Callable[[FeatureContext], float]] | None = None):
        self.config = config
        self.embed = embed
        self.extractors = resolve_extractors(config.sampling.feature_dims, extra_extractors)

    def compute(self, code: str, elite_embeddings: list[Sequence[float]]) -> tuple[float, ...]:
        ctx = _ExtractionContext(code, self.config.max_code_length, elite_embeddings, self.embed)
        return tuple(min(max(fn(ctx), 0.0), 1.0) for fn in self.extractors)


@dataclass(frozen=True)
class SampledContext:
    parent: Node | None
    references: tuple[Node, ...]


class NodeDatabase:
    """Stores nodes up to ``max_db_size``; evicts the lowest-score node
    that is neither the global best nor a current archive elite."""

    def __init__(self, config: RunConfig, feature_engine: FeatureEngine | None = None):
        self.config = config
        self.feature_engine = feature_engine
        self.archive = Archive(config.sampling)
        self._nodes: dict[int, Node] = {}
        self._visits: dict[int, int] = {}
        self._embeddings: dict[int, Sequence[float]] = {}
        self._next_id = 1
        self._lock = threading.RLock()

    # -- basic access -------------------------------------------------------

    def __len__(self) -> int:
        with self._lock:
            return len(self._nodes)

    def get(self, node_id: int) -> Node:
        with self._lock:
            return self._nodes[node_id]

    def nodes(self) -> list[Node]:
        with self._lock:
            return [self._nodes[nid] for nid in sorted(self._nodes)]

    def score_of(self, node_id: int) -> float:
        return self._nodes[node_id].score

    # -- insertion ----------------------------------------------------------

    def insert(self, node: Node) -> int:
        return self.insert_node(node).id

    def insert_node(self, node: Node) -> Node:
        """Insert and return the materialized node (id, island, and features
        filled in). The returned node may already have been evicted when the
        database was full and it scored lowest."""
        with self._lock:
            node = self._validated(node)
            node_id = node.id if node.id is not None else self._next_id
            if node_id in self._nodes:
                raise ValidationError("node.id", f"duplicate id {node_id}")
            node = node.with_id(node_id)
            self._next_id = max(self._next_id, node_id + 1)

            if node.island is None:
                node = replace(node, island=node.round % self.config.sampling.islands)
            has_code = bool(node.program.code.strip())
            if node.features is None and self.feature_engine is not None and has_code:
                elites = [self._embeddings[eid] for eid in sorted(self.archive.elite_ids())
                          if eid in self._embeddings]
                node = replace(node, features=self.feature_engine.compute(node.program.code, elites))

            self._nodes[node_id] = node
            self._visits.setdefault(node_id, 0)
            if self.feature_engine is not None and has_code:
                self._embeddings[node_id] = self.feature_engine.embed(node.program.code)
            if node.features is not None:
                self.archive.offer_node(node.island, node.features, node_id, node.score, self.score_of)
            if node.parent_id is not None and node.parent_id in self._visits:
                self._visits[node.parent_id] += 1
            self._enforce_capacity()
            return node

    def _validated(self, node: Node) -> Node:
        if node.program.length > self.config.max_code_length:
            raise ValidationError("node.program", f"length {node.program.length} exceeds max_code_length")
        if node.features is not None and len(node.features) != len(self.config.sampling.feature_dims):
            raise ValidationError(
                "node.features",
                f"expected {len(self.config.sampling.feature_dims)} feature values, got {len(node.features)}")
        return node

    def _enforce_capacity(self) -> None:
        while len(self._nodes) > self.config.max_db_size:
            best_id = self.best().id
            protected = self.archive.elite_ids()
            protected.add(best_id)
            ranked = sorted(self._nodes.values(), key=lambda n: (n.score, n.id))
            victim = next((n for n in ranked if n.id not in protected), None)
            if victim is None:
                # Every node is an elite: give up elite protection (but never
                # the global best) and keep the archive consistent.
                victim = next(n for n in ranked if n.id != best_id)
                self.archive.remove_node(victim.id)
            self._evict(victim.id)

    def _evict(self, node_id: int) -> None:
        del self._nodes[node_id]
        self._visits.pop(node_id, None)
        self._embeddings.pop(node_id, None)

    # -- queries ------------------------------------------------------------

    def best(self) -> Node:
        with self._lock:
            if not self._nodes:
                raise NoCandidateError("database is empty")
            return min(self._nodes.values(), key=lambda n: (-n.score, n.round, n.id))

    def score_bounds(self) -> tuple[float, float]:
        with self._lock:
            scores = [n.score for n in self._nodes.values()]
            return min(scores), max(scores)

    def bandit_stats(self, pool: set[int] | None = None) -> BanditStats:
        with self._lock:
            selectable = {nid: n for nid, n in self._nodes.items()
                          if pool is None or nid in pool}
            if not selectable:
                return BanditStats({}, {})
            scores = [n.score for n in selectable.values()]
            low, high = min(scores), max(scores)
            values = {nid: normalize_score(n.score, low, high) for nid, n in selectable.items()}
            visits = {nid: self._visits.get(nid, 0) for nid in selectable}
            return BanditStats(visits=visits, values=values)

    def _selectable_ids(self) -> set[int]:
        """Parent candidates, optionally restricted to the top-N overlay pool."""
        pool = self.config.sampling.candidate_pool
        if pool <= 0 or pool >= len(self._nodes):
            return set(self._nodes)
        ranked = sorted(self._nodes.values(), key=lambda n: (-n.score, n.id))
        return {n.id for n in ranked[:pool]}

    def sample_context(self, n: int, rng: random.Random, round_index: int = 0) -> SampledContext:
        """Parent by the active policy plus the n-1 best distinct references.

        An empty database signals cold start by returning a None parent.
        """
        with self._lock:
            if not self._nodes:
                return SampledContext(parent=None, references=())
            algorithm = self.config.sampling.algorithm
            pool = self._selectable_ids()
            if algorithm == "greedy":
                parent = self.best()
            elif algorithm == "random":
                parent = self._nodes[rng.choice(sorted(pool))]
            elif algorithm == "ucb1":
                parent = self._nodes[ucb1_select(self.bandit_stats(pool), self.config.sampling.ucb_c)]
            elif algorithm == "map_elites_island":
                try:
                    elite = self.archive.sample(round_index, rng, get_score=self.score_of)
                    if elite not in pool:
                        elite = rng.choice(sorted(pool))
                    parent = self._nodes[elite]
                except NoCandidateError:
                    parent = self._nodes[rng.choice(sorted(pool))]
            else:  # pragma: no cover - enum validated at config load
                raise ValidationError("sampling.algorithm", f"unknown algorithm {algorithm!r}")

            ranked = sorted(self._nodes.values(), key=lambda node: (-node.score, node.id))
            references = tuple(node for node in ranked if node.id != parent.id)[: max(n - 1, 0)]
            return SampledContext(parent=parent, references=references)

    def migrate_if_due(self, round_index: int):
        with self._lock:
            return self.archive.migrate(round_index, self.score_of)

    def dump_archive(self) -> str:
        with self._lock:
            return self.archive.dump(self.score_of)


def persist_state(database: NodeDatabase, path: str | Path) -> None:
    """Snapshot the database's current node set to a state file."""
    write_state(path, database.nodes())


def load_state(path: str | Path, config: RunConfig,
               feature_engine: FeatureEngine | None = None) -> NodeDatabase:
    """Rebuild a database from a snapshot; node fields round-trip bit-exactly."""
    _, nodes = read_state(path)
    db = NodeDatabase(config, feature_engine)
    for node in nodes:
        db.insert(node)
    return db
