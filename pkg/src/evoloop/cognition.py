"""Store of human-prior knowledge items with top-k semantic retrieval.

Items are embedded once on insertion; retrieval is a linear cosine scan
(the store stays small), threshold applied before top-k truncation. The
store is append-only during a run; analysis may add items back.
"""

from __future__ import annotations

import json
import math
import threading
from dataclasses import dataclass
from importlib import resources
from pathlib import Path
from typing import Iterable, Sequence

from evoloop.embedding import Embedder, HashingEmbedder, cosine
from evoloop.errors import EvoloopError, ValidationError

CATEGORIES = ("geometric_prior", "optimization_method", "engineering_guideline", "other")

DEFAULT_TOP_K = 5
DEFAULT_THRESHOLD = 0.4


@dataclass(frozen=True)
class CognitionItem:
    id: int
    category: str
    text: str
    embedding: tuple[float, ...]
    source: str

    def __post_init__(self):
        if self.category not in CATEGORIES:
            raise ValidationError("cognition.category", f"unknown category {self.category!r}")
        norm = math.sqrt(sum(v * v for v in self.embedding))
        if abs(norm - 1.0) > 1e-6:
            raise ValidationError("cognition.embedding", f"embedding norm {norm} is not 1")


@dataclass(frozen=True)
class RetrievalResult:
    item: CognitionItem
    similarity: float


class SeedFileError(EvoloopError):
    """A seed file line failed to parse; carries the 1-based item index."""

    def __init__(self, item_index: int, message: str):
        super().__init__(f"seed item {item_index}: {message}")
        self.item_index = item_index


class CognitionStore:
    def __init__(self, embedder: Embedder | None = None):
        self.embedder = embedder or HashingEmbedder()
        self._items: list[CognitionItem] = []
        self._lock = threading.Lock()

    def __len__(self) -> int:
        return len(self._items)

    def items(self) -> list[CognitionItem]:
        return list(self._items)

    def add_item(self, category: str, text: str, source: str = "") -> int:
        embedding = tuple(self.embedder.embed(text))
        with self._lock:
            item = CognitionItem(id=len(self._items) + 1, category=category,
                                 text=text, embedding=embedding, source=source)
            self._items.append(item)
            return item.id

    def load_seed(self, path: str | Path) -> int:
        """Load line-delimited {category, text, source} records; returns count."""
        count = 0
        for index, line in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), start=1):
            if not line.strip():
                continue
            try:
                record = json.loads(line)
                self.add_item(record["category"], record["text"], record.get("source", ""))
            except (json.JSONDecodeError, KeyError, TypeError, ValidationError) as exc:
                raise SeedFileError(index, str(exc)) from exc
            count += 1
        return count

    def query_vector(self, query_texts: Sequence[str]) -> list[float]:
        """Normalized mean of the query embeddings."""
        texts = [t for t in query_texts if t and t.strip()]
        if not texts:
            raise ValidationError("cognition.query", "no non-empty query texts")
        vectors = [self.embedder.embed(t) for t in texts]
        mean = [sum(col) / len(vectors) for col in zip(*vectors)]
        norm = math.sqrt(sum(v * v for v in mean))
        if norm == 0.0:
            return vectors[0]
        return [v / norm for v in mean]

    def retrieve(self, query_texts: Sequence[str], k: int = DEFAULT_TOP_K,
                 threshold: float = DEFAULT_THRESHOLD) -> list[RetrievalResult]:
        """Top-k items with cosine >= threshold, sorted descending.

        Ties are broken by lower item id so seeded runs are deterministic.
        """
        if not self._items:
            return []
        query = self.query_vector(query_texts)
        scored = [RetrievalResult(item, cosine(query, item.embedding)) for item in self._items]
        passing = [r for r in scored if r.similarity >= threshold]
        passing.sort(key=lambda r: (-r.similarity, r.item.id))
        return passing[:k]


def packaged_seed_path() -> Path:
    """Location of the shipped circle-packing seed file."""
    return Path(str(resources.files("evoloop").joinpath("data/circle_packing_cognition.jsonl")))


def load_packaged_seed(store: CognitionStore) -> int:
    return store.load_seed(packaged_seed_path())


def write_seed_file(path: str | Path, records: Iterable[dict]) -> None:
    with Path(path).open("w", encoding="utf-8") as fh:
        for record in records:
            fh.write(json.dumps(record) + "\n")
