"""Feature extractors for archive coordinates.

The two built-in dimensions are cheap, monotone proxies:

* ``complexity`` — program length as a fraction of the code-length budget.
* ``diversity`` — 1 minus the highest cosine similarity between the
  program's embedding and the embeddings of the current elites (1.0 for
  the first program seen).

Extractors are pluggable: register a callable under a new name and list
that name in ``sampling.feature_dims``.
"""

from __future__ import annotations

from typing import Callable, Protocol, Sequence

from evoloop.errors import ConfigError


class FeatureContext(Protocol):
    code: str
    max_code_length: int
    elite_embeddings: Sequence[Sequence[float]]
    embed: Callable[[str], Sequence[float]]


def complexity(ctx: FeatureContext) -> float:
    return min(len(ctx.code) / max(ctx.max_code_length, 1), 1.0)


def diversity(ctx: FeatureContext) -> float:
    if not ctx.elite_embeddings:
        return 1.0
    vec = ctx.embed(ctx.code)
    best = max(_dot(vec, other) for other in ctx.elite_embeddings)
    # embeddings are unit vectors, so the dot product is the cosine
    return min(max(1.0 - best, 0.0), 1.0)


def _dot(a: Sequence[float], b: Sequence[float]) -> float:
    return sum(x * y for x, y in zip(a, b))


BUILTIN_EXTRACTORS: dict[str, Callable[[FeatureContext], float]] = {
    "complexity": complexity,
    "diversity": diversity,
}


def resolve_extractors(names: Sequence[str],
                       extra: dict[str, Callable[[FeatureContext], float]] | None = None,
                       ) -> list[Callable[[FeatureContext], float]]:
    table = dict(BUILTIN_EXTRACTORS)
    if extra:
        table.update(extra)
    missing = [name for name in names if name not in table]
    if missing:
        raise ConfigError(f"unknown feature dimensions: {missing}")
    return [table[name] for name in names]
