"""Seeded generation of synthetic scene graphs.

Everything here is driven by a caller-supplied numpy Generator plus a
MockProvider, so fixtures are reproducible end to end: same seeds, same
graphs, same scores.
"""

from __future__ import annotations

import numpy as np

from .model import GraphEdge, GraphNode, ImageMeta, Region, SceneGraph
from .providers import MOCK_RELATION_LABELS, MockProvider

# Labels outside the mock relation table, to exercise the fallback rules.
EXTRA_RELATION_LABELS = ("touching", "within", "behind", "holding")

_NODE_LABELS = ("person", "dog", "car", "tree", "chair", "cup", "bird", "table")


def random_graph(
    provider: MockProvider,
    rng: np.random.Generator,
    n_nodes: int | None = None,
    node_range: tuple[int, int] = (2, 10),
    edge_density: float = 0.35,
    image_size: tuple[int, int] = (64, 64),
    source_id: str | None = None,
) -> SceneGraph:
    """A valid random scene graph with embeddings from the mock provider.

    Node count is uniform over node_range when not given; each ordered
    node pair gets an edge with probability edge_density. Nodes carry
    random raw importance mass.
    """
    if n_nodes is None:
        n_nodes = int(rng.integers(node_range[0], node_range[1] + 1))
    width, height = image_size
    if source_id is None:
        source_id = f"mock-{rng.integers(0, 1 << 32)}"

    nodes = []
    for i in range(n_nodes):
        w = int(rng.integers(4, max(5, width // 2)))
        h = int(rng.integers(4, max(5, height // 2)))
        x = int(rng.integers(0, width - w + 1))
        y = int(rng.integers(0, height - h + 1))
        nodes.append(
            GraphNode(
                id=i,
                label=str(rng.choice(_NODE_LABELS)),
                region=Region(x=x, y=y, w=w, h=h),
                embedding=provider.embedding(f"{source_id}:node:{i}"),
                raw_importance=float(rng.uniform(0.5, 4.0)),
            )
        )

    vocabulary = MOCK_RELATION_LABELS + EXTRA_RELATION_LABELS
    edges = []
    for s in range(n_nodes):
        for o in range(n_nodes):
            if s != o and rng.random() < edge_density:
                edges.append(
                    GraphEdge(subject=s, object=o, relation=str(rng.choice(vocabulary)))
                )

    return SceneGraph(
        image=ImageMeta(source_id=source_id, width=width, height=height),
        image_embedding=provider.embedding(f"{source_id}:image"),
        nodes=tuple(nodes),
        edges=tuple(edges),
    )


def permute_graph(graph: SceneGraph, rng: np.random.Generator) -> SceneGraph:
    """Reorder nodes and relabel ids with a random bijection.

    Scores must be invariant under this: it changes only the presentation
    of the graph, not its content.
    """
    n = len(graph.nodes)
    order = rng.permutation(n)
    new_ids = rng.permutation(n * 3)[:n]  # sparse ids, not just 0..n-1
    id_map = {graph.nodes[int(old)].id: int(new_ids[pos]) for pos, old in enumerate(order)}

    nodes = tuple(
        GraphNode(
            id=id_map[graph.nodes[int(old)].id],
            label=graph.nodes[int(old)].label,
            region=graph.nodes[int(old)].region,
            embedding=graph.nodes[int(old)].embedding,
            raw_importance=graph.nodes[int(old)].raw_importance,
        )
        for old in order
    )
    edges = tuple(
        GraphEdge(subject=id_map[e.subject], object=id_map[e.object], relation=e.relation)
        for e in graph.edges
    )
    return SceneGraph(
        image=graph.image, image_embedding=graph.image_embedding, nodes=nodes, edges=edges
    )


def perturb_embedding(vec: np.ndarray, rng: np.random.Generator, scale: float) -> np.ndarray:
    return np.asarray(vec) + rng.normal(scale=scale, size=np.asarray(vec).shape)


def corrupt_graph(
    graph: SceneGraph,
    rng: np.random.Generator,
    drop_fraction: float,
    noise_scale: float,
) -> SceneGraph:
    """Degrade a graph: drop a fraction of its nodes, add embedding noise.

    Surviving node and image embeddings get independent Gaussian noise.
    Edges touching dropped nodes disappear. drop_fraction 0 with noise 0
    returns an equivalent graph.
    """
    if not (0.0 <= drop_fraction <= 1.0):
        raise ValueError(f"drop_fraction must lie in [0, 1], got {drop_fraction}")
    n = len(graph.nodes)
    n_drop = int(round(drop_fraction * n))
    dropped = set(int(i) for i in rng.choice(n, size=n_drop, replace=False)) if n_drop else set()

    nodes = []
    kept_ids = set()
    for i, node in enumerate(graph.nodes):
        if i in dropped:
            continue
        kept_ids.add(node.id)
        embedding = node.embedding
        if noise_scale > 0.0:
            embedding = perturb_embedding(embedding, rng, noise_scale)
        nodes.append(
            GraphNode(
                id=node.id,
                label=node.label,
                region=node.region,
                embedding=embedding,
                raw_importance=node.raw_importance,
            )
        )
    edges = tuple(
        e for e in graph.edges if e.subject in kept_ids and e.object in kept_ids
    )
    image_embedding = graph.image_embedding
    if noise_scale > 0.0:
        image_embedding = perturb_embedding(image_embedding, rng, noise_scale)
    return SceneGraph(
        image=graph.image,
        image_embedding=image_embedding,
        nodes=tuple(nodes),
        edges=edges,
    )
