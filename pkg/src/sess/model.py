"""Core domain types for scene-graph similarity scoring.

Embeddings are plain 1-D float64 numpy arrays. All embeddings taking part in
one comparison (node embeddings and whole-image embeddings on both sides)
must share a single dimension; cross-graph agreement is enforced where the
vectors actually meet, within-graph agreement by :func:`validate_graph`.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np


def as_embedding(values: Sequence[float] | np.ndarray) -> np.ndarray:
    """Coerce to a read-only 1-D float64 vector with at least one entry."""
    vec = np.asarray(values, dtype=np.float64)
    if vec.ndim != 1 or vec.size == 0:
        raise ValueError(f"embedding must be a non-empty 1-D vector, got shape {vec.shape}")
    if not np.all(np.isfinite(vec)):
        raise ValueError("embedding contains non-finite entries")
    vec = vec.copy()
    vec.setflags(write=False)
    return vec


@dataclass(frozen=True, slots=True)
class Region:
    """Image support of one object: pixel-aligned bbox, optional binary mask.

    bbox is (x, y, w, h) in pixels with w > 0 and h > 0. The mask, when
    present, covers the full image (same height/width) with the object's
    pixels set.
    """

    x: int
    y: int
    w: int
    h: int
    mask: Optional[np.ndarray] = None

    def __post_init__(self) -> None:
        if self.w <= 0 or self.h <= 0:
            raise ValueError(f"bbox must have positive extent, got w={self.w} h={self.h}")
        if self.mask is not None:
            m = self.mask
            if m.ndim != 2 or m.dtype != np.bool_:
                raise ValueError("mask must be a 2-D boolean array")
            m.setflags(write=False)

    @property
    def bbox(self) -> tuple[int, int, int, int]:
        return (self.x, self.y, self.w, self.h)


@dataclass(frozen=True, slots=True)
class GraphNode:
    """One detected object: id, free-text label, region, embedding."""

    id: int
    label: str
    region: Region
    embedding: np.ndarray
    raw_importance: Optional[float] = None

    def __post_init__(self) -> None:
        object.__setattr__(self, "embedding", as_embedding(self.embedding))
        if self.raw_importance is not None and not (
            np.isfinite(self.raw_importance) and self.raw_importance >= 0.0
        ):
            raise ValueError(f"raw_importance must be finite and >= 0, got {self.raw_importance}")


@dataclass(frozen=True, slots=True)
class GraphEdge:
    """Directed relation between two node ids."""

    subject: int
    object: int
    relation: str

    def __post_init__(self) -> None:
        if self.subject == self.object:
            raise ValueError(f"edge may not relate node {self.subject} to itself")


@dataclass(frozen=True, slots=True)
class ImageMeta:
    """Identity and pixel dimensions of the underlying image."""

    source_id: str
    width: int
    height: int

    def __post_init__(self) -> None:
        if self.width <= 0 or self.height <= 0:
            raise ValueError(f"image dimensions must be positive, got {self.width}x{self.height}")


@dataclass(frozen=True, slots=True)
class SceneGraph:
    """A scene graph: image metadata plus object nodes and relation edges.

    A graph with zero nodes is legal (an image in which nothing was
    detected). Instances are treated as immutable after construction.
    `provenance` is free-form producer metadata (model names, crop policy,
    versions); the engine never reads it.
    """

    image: ImageMeta
    image_embedding: np.ndarray
    nodes: tuple[GraphNode, ...] = ()
    edges: tuple[GraphEdge, ...] = ()
    provenance: Optional[dict] = None

    def __post_init__(self) -> None:
        object.__setattr__(self, "image_embedding", as_embedding(self.image_embedding))
        object.__setattr__(self, "nodes", tuple(self.nodes))
        object.__setattr__(self, "edges", tuple(self.edges))

    def node_ids(self) -> tuple[int, ...]:
        return tuple(n.id for n in self.nodes)


@dataclass(frozen=True)
class RelationSimilarityTable:
    """Symmetric similarity over a fixed relation-label vocabulary.

    Values lie in [0, 1]; the diagonal is exactly 1.0. An empty table is
    legal and sends every lookup to the caller's fallback rules.
    """

    labels: tuple[str, ...]
    values: np.ndarray  # square, len(labels) x len(labels)
    _index: dict = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        labels = tuple(self.labels)
        object.__setattr__(self, "labels", labels)
        vals = np.asarray(self.values, dtype=np.float64)
        n = len(labels)
        if len(set(labels)) != n:
            raise ValueError("relation labels must be unique")
        if vals.shape != (n, n):
            raise ValueError(f"table must be {n}x{n}, got {vals.shape}")
        if n:
            if not np.all(np.isfinite(vals)):
                raise ValueError("table contains non-finite entries")
            if vals.min() < 0.0 or vals.max() > 1.0:
                raise ValueError("table entries must lie in [0, 1]")
            if not np.allclose(vals, vals.T, atol=1e-9):
                raise ValueError("table must be symmetric")
            if not np.all(vals.diagonal() == 1.0):
                raise ValueError("table diagonal must be exactly 1.0")
        vals = vals.copy()
        vals.setflags(write=False)
        object.__setattr__(self, "values", vals)
        object.__setattr__(self, "_index", {lab: i for i, lab in enumerate(labels)})

    def __contains__(self, label: str) -> bool:
        return label in self._index

    def lookup(self, a: str, b: str) -> float:
        """Table value for two labels; both must be in the vocabulary."""
        return float(self.values[self._index[a], self._index[b]])

    @staticmethod
    def empty() -> "RelationSimilarityTable":
        return RelationSimilarityTable(labels=(), values=np.zeros((0, 0)))


@dataclass(frozen=True, slots=True)
class HyperParams:
    """Knobs of the scoring engine; ranges are enforced at construction.

    alpha   weight of node similarity against relation similarity inside
            the neighborhood matrices
    beta    per-sweep update rate of the similarity matrix
    gamma   weight of the whole-image score in the final blend
    iterations  number of refinement sweeps
    k       root applied to raw importance mass before normalising
    """

    alpha: float = 0.25
    beta: float = 0.05
    gamma: float = 0.10
    iterations: int = 7
    k: float = 2.25

    def __post_init__(self) -> None:
        for name in ("alpha", "beta", "gamma"):
            v = getattr(self, name)
            if not (0.0 <= v <= 1.0):
                raise ValueError(f"{name} must lie in [0, 1], got {v}")
        if not (isinstance(self.iterations, int) and self.iterations >= 0):
            raise ValueError(f"iterations must be a non-negative integer, got {self.iterations!r}")
        if not self.k >= 1.0:
            raise ValueError(f"k must be >= 1, got {self.k}")


@dataclass(frozen=True, slots=True)
class MatchedPair:
    """One matched node pair in a final report, identified by node ids."""

    node1: int
    node2: int
    weight: float
    similarity: float


@dataclass(frozen=True, slots=True)
class ScoreReport:
    """Everything one comparison produced.

    sess == (1 - gamma) * graph_score + gamma * image_score up to float
    rounding; `matching` lists (node id, node id, pair weight, similarity)
    for the final matching.
    """

    sess: float
    image_score: float
    graph_score: float
    matching: tuple[MatchedPair, ...] = ()
    snapshots: Optional[tuple[np.ndarray, ...]] = None
    baselines: Optional[dict] = None


def validate_graph(graph: SceneGraph) -> list[str]:
    """Check internal consistency; return human-readable violations.

    An empty list means the graph is valid. Checks: unique node ids, edge
    endpoints resolve to nodes and differ, bboxes lie inside the image,
    masks match the image dimensions and are non-empty, and all embeddings
    share the image embedding's dimension.
    """
    problems: list[str] = []
    w, h = graph.image.width, graph.image.height
    dim = graph.image_embedding.shape[0]

    seen: set[int] = set()
    for i, node in enumerate(graph.nodes):
        if node.id in seen:
            problems.append(f"node {i}: duplicate id {node.id}")
        seen.add(node.id)
        r = node.region
        if r.x < 0 or r.y < 0 or r.x + r.w > w or r.y + r.h > h:
            problems.append(f"node {i}: bbox {r.bbox} outside {w}x{h} image")
        if r.mask is not None:
            if r.mask.shape != (h, w):
                problems.append(f"node {i}: mask shape {r.mask.shape} does not match image {h}x{w}")
            elif not r.mask.any():
                problems.append(f"node {i}: mask has no set pixels")
        if node.embedding.shape[0] != dim:
            problems.append(
                f"node {i}: embedding dimension {node.embedding.shape[0]} != image embedding {dim}"
            )

    for j, edge in enumerate(graph.edges):
        if edge.subject not in seen:
            problems.append(f"edge {j}: subject id {edge.subject} unresolved")
        if edge.object not in seen:
            problems.append(f"edge {j}: object id {edge.object} unresolved")

    return problems
