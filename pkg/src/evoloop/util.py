"""Seed derivation for reproducible per-round randomness.

Every stochastic draw in round t uses a stream keyed by (seed, t, name),
so resuming a run from round k+1 replays exactly the uninterrupted run.
Derivation goes through sha256, never the builtin hash, to stay stable
across processes.
"""

from __future__ import annotations

import hashlib
import random

TRUNCATION_MARKER = "\n[... truncated ...]\n"


def derived_seed(seed: int, round_index: int, stream: str) -> int:
    digest = hashlib.sha256(f"{seed}:{round_index}:{stream}".encode("utf-8")).digest()
    return int.from_bytes(digest[:8], "big")


def derived_rng(seed: int, round_index: int, stream: str) -> random.Random:
    return random.Random(derived_seed(seed, round_index, stream))


def truncate_middle(text: str, cap: int) -> str:
    """Cap text length, preserving the head and tail halves verbatim."""
    if len(text) <= cap:
        return text
    head = cap // 2
    tail = cap - head
    return text[:head] + TRUNCATION_MARKER + text[-tail:]
