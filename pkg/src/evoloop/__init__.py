"""Evolutionary program-search engine.

A learn-design-experiment-analyze loop over a program space: a node
database with pluggable parent sampling (UCB1, random, greedy, MAP-Elites
islands), an embedding-retrieved cognition store, researcher/analyzer/
judge agents (remote chat model or deterministic stubs), and a sandboxed
execution harness, validated end to end on circle packing and a synthetic
landscape.
"""

from evoloop.config import CognitionConfig, RunConfig, SamplingConfig, load_config
from evoloop.database import NodeDatabase, load_state, normalize_score, persist_state, ucb1_select
from evoloop.types import EvalResult, Node, ProgramArtifact

__version__ = "0.1.0"

__all__ = [
    "CognitionConfig",
    "RunConfig",
    "SamplingConfig",
    "load_config",
    "NodeDatabase",
    "load_state",
    "normalize_score",
    "persist_state",
    "ucb1_select",
    "EvalResult",
    "Node",
    "ProgramArtifact",
    "__version__",
]
