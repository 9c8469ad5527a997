"""The cognition store: prior knowledge retrieved by embedding similarity.

The shipped seed file holds 12 circle-packing notes in three categories.
Queries are embedded with the built-in deterministic token-hashing
embedder (384 dimensions, unit norm); retrieval is a cosine scan with a
similarity threshold applied before the top-k cut.
"""

from evoloop.cognition import CognitionStore, load_packaged_seed

store = CognitionStore()
count = load_packaged_seed(store)
print(f"loaded {count} seed items\n")

for query in (
    "hexagonal close packing density in the unit square",
    "SLSQP constraints warm-start optimization",
    "stuck at a plateau, what should change",
):
    print(f"query: {query!r}")
    # threshold 0.1: the hashing embedder scores raw token overlap, which
    # runs lower than a sentence-transformer would
    for result in store.retrieve([query], k=3, threshold=0.1):
        print(f"  {result.similarity:.3f} [{result.item.category}] {result.item.text[:70]}...")
    print()

# The store is append-only: analysis can write new knowledge back in.
store.add_item("engineering_guideline", "cache pairwise distances when iterating repairs", "run-42")
print("items after append:", len(store))
