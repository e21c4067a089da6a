"""Similarity sources: embedding cosines and relation-label lookup.

Real deployments feed the engine embeddings produced offline by neural
encoders; this module only consumes them. `mock_provider` supplies a fully
deterministic stand-in (seeded embeddings and relation table) so the engine
can be exercised without any models.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatch, ZeroVector
from .model import GraphNode, RelationSimilarityTable, SceneGraph

# Lookup rules for labels outside the table: identical unknown labels count
# as a perfect match, distinct ones as a neutral half similarity.
IDENTICAL_FALLBACK = 1.0
DISTINCT_FALLBACK = 0.5


def clip_score(a: np.ndarray, b: np.ndarray) -> float:
    """Cosine similarity of two embeddings, clamped into [0, 1].

    Anti-correlated directions carry no usable similarity signal here, so
    negative cosines clamp to 0 rather than being affinely remapped.
    """
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if a.shape != b.shape or a.ndim != 1:
        raise DimensionMismatch(f"embedding shapes differ: {a.shape} vs {b.shape}")
    na = float(np.linalg.norm(a))
    nb = float(np.linalg.norm(b))
    if na == 0.0 or nb == 0.0:
        raise ZeroVector("cosine similarity is undefined for a zero vector")
    # A vector against itself must score exactly 1.0; the general formula
    # can land one ulp below.
    if np.array_equal(a, b):
        return 1.0
    cos = float(np.dot(a, b)) / (na * nb)
    return min(1.0, max(0.0, cos))


def relation_similarity(r1: str, r2: str, table: RelationSimilarityTable) -> float:
    """Similarity of two relation labels under a table plus fallback rules."""
    if r1 in table and r2 in table:
        return table.lookup(r1, r2)
    if r1 == r2:
        return IDENTICAL_FALLBACK
    return DISTINCT_FALLBACK


@dataclass(frozen=True)
class SimilarityProvider:
    """Bundles the three similarity sources one comparison needs."""

    relation_table: RelationSimilarityTable

    def node_similarity(self, u: GraphNode, v: GraphNode) -> float:
        return clip_score(u.embedding, v.embedding)

    def image_similarity(self, g1: SceneGraph, g2: SceneGraph) -> float:
        return clip_score(g1.image_embedding, g2.image_embedding)

    def relation_similarity(self, r1: str, r2: str) -> float:
        return relation_similarity(r1, r2, self.relation_table)


def _digest_seed(seed: int, key: str) -> int:
    digest = hashlib.sha256(f"{seed}:{key}".encode()).digest()
    return int.from_bytes(digest[:8], "little")


@dataclass(frozen=True)
class MockProvider(SimilarityProvider):
    """Deterministic provider for desk-scale runs without neural models.

    The relation table and every embedding are pure functions of the seed,
    so identical queries always return identical similarities and distinct
    seeds disagree somewhere.
    """

    seed: int = 0
    dimension: int = 16

    def embedding(self, key: str) -> np.ndarray:
        """Seeded pseudo-embedding for an arbitrary string key."""
        rng = np.random.default_rng(_digest_seed(self.seed, key))
        vec = rng.normal(size=self.dimension)
        # A standard normal draw is never the zero vector in practice, but
        # the cosine contract requires it outright.
        while float(np.linalg.norm(vec)) == 0.0:
            vec = rng.normal(size=self.dimension)
        return vec


MOCK_RELATION_LABELS = tuple(f"rel{i}" for i in range(8))


def mock_provider(seed: int = 0, dimension: int = 16) -> MockProvider:
    """Build a MockProvider with a seeded random relation table.

    The table covers MOCK_RELATION_LABELS with symmetric values in [0, 1]
    and a forced unit diagonal.
    """
    if dimension < 1:
        raise ValueError(f"dimension must be >= 1, got {dimension}")
    rng = np.random.default_rng(_digest_seed(seed, "relation-table"))
    n = len(MOCK_RELATION_LABELS)
    raw = rng.uniform(0.0, 1.0, size=(n, n))
    values = (raw + raw.T) / 2.0
    np.fill_diagonal(values, 1.0)
    table = RelationSimilarityTable(labels=MOCK_RELATION_LABELS, values=values)
    return MockProvider(relation_table=table, seed=seed, dimension=dimension)
