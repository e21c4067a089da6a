"""Semantic image similarity via iterative scene-graph matching."""

from .assignment import Matching, brute_force_matching, km_max_matching
from .matching import initial_matrix, iterate, neighbor_score, sess, weighted_matching_score
from .model import (
    GraphEdge,
    GraphNode,
    HyperParams,
    ImageMeta,
    MatchedPair,
    Region,
    RelationSimilarityTable,
    SceneGraph,
    ScoreReport,
    validate_graph,
)
from .providers import MockProvider, SimilarityProvider, clip_score, mock_provider, relation_similarity

__all__ = [
    "GraphEdge",
    "GraphNode",
    "HyperParams",
    "ImageMeta",
    "MatchedPair",
    "Matching",
    "MockProvider",
    "Region",
    "RelationSimilarityTable",
    "SceneGraph",
    "ScoreReport",
    "SimilarityProvider",
    "brute_force_matching",
    "clip_score",
    "initial_matrix",
    "iterate",
    "km_max_matching",
    "mock_provider",
    "neighbor_score",
    "relation_similarity",
    "sess",
    "validate_graph",
    "weighted_matching_score",
]

__version__ = "0.1.0"
