"""Text embedding providers behind one interface.

The built-in provider hashes whitespace tokens into 384 signed buckets and
L2-normalizes, so every property test and the deterministic end-to-end run
work without a network. The remote provider speaks a minimal JSON wire
format: POST {"texts": [...]} -> {"vectors": [[...], ...]}.
"""

from __future__ import annotations

import hashlib
import math
import os
from typing import Protocol, Sequence

import requests

from evoloop.errors import EmbeddingError

EMBEDDING_DIM = 384

EMBED_URL_ENV = "EVOLOOP_EMBED_URL"
EMBED_KEY_ENV = "EVOLOOP_EMBED_API_KEY"


class Embedder(Protocol):
    dim: int

    def embed(self, text: str) -> list[float]: ...


class HashingEmbedder:
    """Deterministic bag-of-tokens feature hashing.

    Each token lands in bucket sha256(token) % dim with a sign taken from
    the next hash byte; counts are accumulated and the vector normalized
    to unit length. Token order does not matter.
    """

    def __init__(self, dim: int = EMBEDDING_DIM):
        self.dim = dim

    def embed(self, text: str) -> list[float]:
        tokens = text.split()
        if not tokens:
            raise EmbeddingError("cannot embed empty text")
        vec = [0.0] * self.dim
        for token in tokens:
            digest = hashlib.sha256(token.encode("utf-8")).digest()
            bucket = int.from_bytes(digest[:8], "big") % self.dim
            sign = 1.0 if digest[8] & 1 else -1.0
            vec[bucket] += sign
        norm = math.sqrt(sum(v * v for v in vec))
        if norm == 0.0:
            # Signed counts cancelled exactly; fall back to unsigned counts.
            for token in tokens:
                digest = hashlib.sha256(token.encode("utf-8")).digest()
                vec[int.from_bytes(digest[:8], "big") % self.dim] += 1.0
            norm = math.sqrt(sum(v * v for v in vec))
        return [v / norm for v in vec]


class RemoteEmbedder:
    """Client for a remote embedding endpoint configured via environment."""

    def __init__(self, url: str | None = None, api_key: str | None = None,
                 dim: int = EMBEDDING_DIM, timeout_s: float = 30.0):
        self.url = url or os.environ.get(EMBED_URL_ENV, "")
        self.api_key = api_key if api_key is not None else os.environ.get(EMBED_KEY_ENV, "")
        self.dim = dim
        self.timeout_s = timeout_s
        if not self.url:
            raise EmbeddingError(f"no embedding endpoint configured ({EMBED_URL_ENV})")

    def embed(self, text: str) -> list[float]:
        return self.embed_batch([text])[0]

    def embed_batch(self, texts: Sequence[str]) -> list[list[float]]:
        if any(not t.strip() for t in texts):
            raise EmbeddingError("cannot embed empty text")
        headers = {"Content-Type": "application/json"}
        if self.api_key:
            headers["Authorization"] = f"Bearer {self.api_key}"
        try:
            response = requests.post(self.url, json={"texts": list(texts)},
                                     headers=headers, timeout=self.timeout_s)
        except requests.RequestException as exc:
            raise EmbeddingError(f"embedding request failed (retryable): {exc}") from exc
        if response.status_code != 200:
            raise EmbeddingError(f"embedding endpoint returned {response.status_code}")
        vectors = response.json().get("vectors")
        if not isinstance(vectors, list) or len(vectors) != len(texts):
            raise EmbeddingError("embedding endpoint returned a malformed reply")
        return [_renormalize(v, self.dim) for v in vectors]


def _renormalize(vec: Sequence[float], dim: int) -> list[float]:
    if len(vec) != dim:
        raise EmbeddingError(f"expected dimension {dim}, got {len(vec)}")
    norm = math.sqrt(sum(v * v for v in vec))
    if norm == 0.0:
        raise EmbeddingError("embedding endpoint returned a zero vector")
    return [v / norm for v in vec]


def cosine(a: Sequence[float], b: Sequence[float]) -> float:
    return sum(x * y for x, y in zip(a, b))
