"""The scoring engine: iterative scene-graph matching.

A comparison starts from the matrix of pairwise node-embedding cosines,
refines it with a fixed number of synchronous sweeps (each entry blends in
a small bipartite-matching score over the two nodes' neighborhoods, scored
on the matrix from the previous sweep), and ends with an importance-
weighted maximum matching. The final score blends that matching value with
the whole-image embedding cosine.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .assignment import km_max_matching, matching_value
from .importance import node_importance
from .model import HyperParams, MatchedPair, SceneGraph, ScoreReport
from .providers import SimilarityProvider


def initial_matrix(g1: SceneGraph, g2: SceneGraph, provider: SimilarityProvider) -> np.ndarray:
    """Node-to-node similarity seed: L[i, j] = cosine of the two embeddings."""
    L = np.empty((len(g1.nodes), len(g2.nodes)))
    for i, u in enumerate(g1.nodes):
        for j, v in enumerate(g2.nodes):
            L[i, j] = provider.node_similarity(u, v)
    return L


def _adjacency(graph: SceneGraph) -> list[dict[int, list[tuple[bool, str]]]]:
    """Per node index: neighbor index -> [(is_outgoing, relation), ...].

    Neighbors are nodes joined by an edge in either direction; multi-edges
    keep every (orientation, relation) entry.
    """
    pos = {node.id: i for i, node in enumerate(graph.nodes)}
    adj: list[dict[int, list[tuple[bool, str]]]] = [{} for _ in graph.nodes]
    for edge in graph.edges:
        if edge.subject not in pos or edge.object not in pos:
            raise ValueError(
                f"edge {edge.subject}->{edge.object} references a missing node; "
                "run validate_graph before scoring"
            )
        s, o = pos[edge.subject], pos[edge.object]
        adj[s].setdefault(o, []).append((True, edge.relation))
        adj[o].setdefault(s, []).append((False, edge.relation))
    return adj


@dataclass(frozen=True)
class _PairNeighborhood:
    """Fixed ingredients of one entry's neighborhood matching.

    rows/cols index into the two graphs' node lists; relation holds, per
    neighbor pair, the best relation similarity over all same-orientation
    edge combinations (0 when every combination crosses orientation).
    """

    rows: np.ndarray
    cols: np.ndarray
    relation: np.ndarray
    denom: int


class MatchContext:
    """Precomputed state shared by every sweep of one comparison."""

    def __init__(
        self,
        g1: SceneGraph,
        g2: SceneGraph,
        provider: SimilarityProvider,
        params: HyperParams,
    ) -> None:
        self.g1 = g1
        self.g2 = g2
        self.provider = provider
        self.params = params
        self.adj1 = _adjacency(g1)
        self.adj2 = _adjacency(g2)
        # The relation part of each neighborhood matrix never changes
        # across sweeps, so it is resolved once up front.
        self._pairs: dict[tuple[int, int], Optional[_PairNeighborhood]] = {}
        for i in range(len(g1.nodes)):
            nb1 = self.adj1[i]
            for j in range(len(g2.nodes)):
                nb2 = self.adj2[j]
                if not nb1 or not nb2:
                    self._pairs[(i, j)] = None
                    continue
                rows = sorted(nb1)
                cols = sorted(nb2)
                rel = np.zeros((len(rows), len(cols)))
                for a, u_k in enumerate(rows):
                    for b, v_l in enumerate(cols):
                        best = 0.0
                        for out1, r1 in nb1[u_k]:
                            for out2, r2 in nb2[v_l]:
                                if out1 != out2:
                                    continue
                                r = provider.relation_similarity(r1, r2)
                                if r > best:
                                    best = r
                        rel[a, b] = best
                self._pairs[(i, j)] = _PairNeighborhood(
                    rows=np.array(rows),
                    cols=np.array(cols),
                    relation=rel,
                    denom=max(len(rows), len(cols)),
                )

    def neighbor_score(self, i: int, j: int, L: np.ndarray) -> float:
        """Neighborhood agreement of node pair (i, j) under the matrix L.

        Builds the small matrix alpha * L[neighbors] + (1 - alpha) *
        relation similarity, solves its maximum matching, and normalises
        by the larger neighborhood size. Two isolated nodes keep their
        current similarity; an isolated node against a connected one
        scores 0.
        """
        pn = self._pairs[(i, j)]
        if pn is None:
            if not self.adj1[i] and not self.adj2[j]:
                return float(L[i, j])
            return 0.0
        alpha = self.params.alpha
        local = alpha * L[np.ix_(pn.rows, pn.cols)] + (1.0 - alpha) * pn.relation
        return matching_value(local) / pn.denom


def neighbor_score(i: int, j: int, L: np.ndarray, ctx: MatchContext) -> float:
    return ctx.neighbor_score(i, j, L)


def iterate(
    L: np.ndarray, ctx: MatchContext, collect_snapshots: bool = False
) -> tuple[np.ndarray, Optional[tuple[np.ndarray, ...]]]:
    """Run the configured number of synchronous refinement sweeps.

    Every sweep scores all pairs against the previous matrix before any
    entry is updated, then blends: L' = (1 - beta) * L + beta * scores,
    clamped into [0, 1]. beta == 0 or zero sweeps leave L untouched.
    """
    params = ctx.params
    snapshots: list[np.ndarray] = []
    if params.beta == 0.0 or params.iterations == 0:
        return L, (tuple(snapshots) if collect_snapshots else None)
    n1, n2 = L.shape
    for _ in range(params.iterations):
        scores = np.empty_like(L)
        for i in range(n1):
            for j in range(n2):
                scores[i, j] = ctx.neighbor_score(i, j, L)
        L = np.clip((1.0 - params.beta) * L + params.beta * scores, 0.0, 1.0)
        if collect_snapshots:
            snapshots.append(L.copy())
    return L, (tuple(snapshots) if collect_snapshots else None)


def weighted_matching_score(
    L: np.ndarray, imp1: Sequence[float], imp2: Sequence[float]
) -> tuple[float, tuple[tuple[int, int], ...]]:
    """Importance-weighted maximum matching over the final matrix.

    Entry weights are ((imp1[i] + imp2[j]) / 2) * L[i, j]; with each
    importance vector summing to 1 the matching value lies in [0, 1].
    Returns the value and the selected (row, col) pairs.
    """
    imp1 = np.asarray(imp1, dtype=np.float64)
    imp2 = np.asarray(imp2, dtype=np.float64)
    if imp1.shape[0] != L.shape[0] or imp2.shape[0] != L.shape[1]:
        raise ValueError("importance vectors must align with the matrix")
    W = ((imp1[:, None] + imp2[None, :]) / 2.0) * L
    result = km_max_matching(W)
    return result.value, result.pairs


def sess(
    g1: SceneGraph,
    g2: SceneGraph,
    provider: SimilarityProvider,
    params: HyperParams = HyperParams(),
    imp1: Optional[Sequence[float]] = None,
    imp2: Optional[Sequence[float]] = None,
    collect_snapshots: bool = False,
) -> ScoreReport:
    """Score two valid scene graphs; see ScoreReport for the parts.

    Node importance defaults to the masses stored on the nodes (uniform
    when absent); pass imp1/imp2 to override, e.g. with weights computed
    from a pixel importance map. When both graphs are empty the image
    cosine stands in for the graph score, so the blend identity still
    holds; when exactly one side is empty the graph score is 0.
    """
    image_score = provider.image_similarity(g1, g2)
    n1, n2 = len(g1.nodes), len(g2.nodes)
    matching: tuple[MatchedPair, ...] = ()
    snapshots: Optional[tuple[np.ndarray, ...]] = None

    if n1 == 0 and n2 == 0:
        graph_score = image_score
    elif n1 == 0 or n2 == 0:
        graph_score = 0.0
    else:
        w1 = np.asarray(imp1, dtype=np.float64) if imp1 is not None else None
        w2 = np.asarray(imp2, dtype=np.float64) if imp2 is not None else None
        if w1 is None:
            w1 = node_importance(g1.nodes, params.k)
        if w2 is None:
            w2 = node_importance(g2.nodes, params.k)
        ctx = MatchContext(g1, g2, provider, params)
        L = initial_matrix(g1, g2, provider)
        L, snapshots = iterate(L, ctx, collect_snapshots=collect_snapshots)
        graph_score, pairs = weighted_matching_score(L, w1, w2)
        matching = tuple(
            MatchedPair(
                node1=g1.nodes[i].id,
                node2=g2.nodes[j].id,
                weight=float((w1[i] + w2[j]) / 2.0),
                similarity=float(L[i, j]),
            )
            for i, j in pairs
        )

    value = (1.0 - params.gamma) * graph_score + params.gamma * image_score
    return ScoreReport(
        sess=value,
        image_score=image_score,
        graph_score=graph_score,
        matching=matching,
        snapshots=snapshots,
    )
