"""The four parent-selection policies over the same little database.

Greedy always exploits the best node; random ignores scores entirely; UCB1
balances a node's normalized score against how rarely it has been tried;
the MAP-Elites island archive keeps one elite per feature cell and samples
islands round-robin.
"""

import dataclasses
import random

from evoloop.config import RunConfig, SamplingConfig
from evoloop.database import NodeDatabase
from evoloop.types import Node, ProgramArtifact


def node(score, round_index):
    return Node(id=None, parent_id=None, round=round_index, motivation="demo",
                program=ProgramArtifact(code=f"print({round_index})"), eval=None,
                analysis=None, score=score, features=(score, round_index % 10 / 10),
                created_at=float(round_index))


def build_db(algorithm):
    config = dataclasses.replace(
        RunConfig(), sampling=dataclasses.replace(SamplingConfig(), algorithm=algorithm, islands=2))
    db = NodeDatabase(config)
    for i, score in enumerate((0.2, 0.9, 0.5, 0.7), start=1):
        db.insert(node(score, i))
    return db


for algorithm in ("greedy", "random", "ucb1", "map_elites_island"):
    db = build_db(algorithm)
    rng = random.Random(0)
    picks = []
    for t in range(8):
        parent = db.sample_context(3, rng, round_index=t).parent
        picks.append(parent.score)
        # recording the child is what bumps the parent's visit count,
        # which is how UCB1's exploration bonus decays
        child = node(score=max(parent.score - 0.05, 0.0), round_index=5 + t)
        db.insert(dataclasses.replace(child, parent_id=parent.id))
    print(f"{algorithm:>18}: parents {picks}")

# The archive itself: island -> cell -> elite.
db = build_db("map_elites_island")
print("\narchive contents:")
print(db.dump_archive())
