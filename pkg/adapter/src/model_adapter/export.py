"""Export pipeline: image file in, interchange files out.

One image becomes one graph file: segments become nodes (id, label,
bbox, full-image mask, embedding, salience mass), geometric proposals
above the confidence threshold become edges, and the whole frame is
encoded as the image embedding. The crop policy decides what the node
encoder sees: the bounding-box cutout, or the full frame with pixels
outside the mask zeroed. Every run stamps its configuration into the
graph's provenance block.

A label list becomes a relation table: each label is text-encoded, the
matrix holds clamped pairwise cosines, mirrored exactly, diagonal forced
to 1. Identical inputs produce byte-identical files for a fixed backend
version, which is what makes committed fixtures regenerable.
"""

from __future__ import annotations

from pathlib import Path
from typing import Sequence

import numpy as np
from PIL import Image, UnidentifiedImageError

from .config import AdapterConfig
from .encoders import patch_embeddings, text_embedding, thumbprint
from .errors import AdapterError, InferenceError
from .formats import (
    encode_mask,
    graph_payload,
    table_payload,
    write_canonical_json,
    write_embedding_matrix,
)
from .relations import filter_proposals, propose_relations
from .saliency import segment_masses
from .segmentation import Segment, describe, segment_image


def load_image(path: Path | str) -> np.ndarray:
    """Decode an image file to an (H, W, 3) uint8 array."""
    path = Path(path)
    try:
        with Image.open(path) as img:
            return np.asarray(img.convert("RGB"))
    except FileNotFoundError as e:
        raise InferenceError(f"{path}: cannot read: {e.strerror or e}") from e
    except (OSError, UnidentifiedImageError, ValueError) as e:
        raise InferenceError(f"{path}: cannot decode image: {e}") from e


def _node_pixels(pixels: np.ndarray, segment: Segment, crop_policy: str) -> np.ndarray:
    if crop_policy == "mask-zeroed-frame":
        return np.where(segment.mask[:, :, None], pixels, 0)
    x, y, w, h = segment.bbox
    return pixels[y : y + h, x : x + w]


def build_graph_payload(image_path: Path | str, config: AdapterConfig) -> dict:
    """Run the full pipeline on one image and return the graph payload."""
    if config.backend == "neural":
        from .neural import load_neural_backend

        load_neural_backend(config)

    image_path = Path(image_path)
    pixels = load_image(image_path)
    height, width = pixels.shape[:2]
    segments = segment_image(pixels, config)
    masses = segment_masses(pixels, segments)
    proposals = filter_proposals(
        propose_relations(segments, width, height), config.relation_threshold
    )

    nodes = []
    for i, (segment, mass) in enumerate(zip(segments, masses)):
        crop = _node_pixels(pixels, segment, config.crop_policy)
        nodes.append(
            {
                "id": i,
                "label": describe(segment, width * height),
                "bbox": list(segment.bbox),
                "mask_rle": encode_mask(segment.mask),
                "embedding": [float(v) for v in thumbprint(crop, config.embedding_dim)],
                "raw_importance": mass,
            }
        )
    edges = [
        {"subject": p.subject, "object": p.object, "relation": p.relation} for p in proposals
    ]
    return graph_payload(
        image_id=image_path.stem,
        width=width,
        height=height,
        image_embedding=thumbprint(pixels, config.embedding_dim),
        nodes=nodes,
        edges=edges,
        provenance=config.provenance(),
    )


def export_graph(image_path: Path | str, config: AdapterConfig, out_path: Path | str) -> dict:
    """Write the graph file for one image; returns the payload written."""
    payload = build_graph_payload(image_path, config)
    write_canonical_json(payload, out_path)
    return payload


def build_table_payload(labels: Sequence[str], config: AdapterConfig) -> dict:
    """Pairwise text-similarity table over a label vocabulary."""
    labels = list(labels)
    if not labels:
        raise AdapterError("relation table needs at least one label")
    if len(set(labels)) != len(labels):
        raise AdapterError("relation labels must be unique")
    vectors = [text_embedding(label) for label in labels]
    n = len(labels)
    values = np.zeros((n, n))
    for i in range(n):
        values[i, i] = 1.0
        for j in range(i + 1, n):
            cosine = min(1.0, max(0.0, float(vectors[i] @ vectors[j])))
            values[i, j] = cosine
            values[j, i] = cosine
    return table_payload(labels, values)


def export_relation_table(
    labels: Sequence[str], config: AdapterConfig, out_path: Path | str
) -> dict:
    payload = build_table_payload(labels, config)
    write_canonical_json(payload, out_path)
    return payload


def build_patch_matrix(image_path: Path | str, config: AdapterConfig) -> np.ndarray:
    """Patch-embedding matrix for one image, rows unit-normalized."""
    pixels = load_image(image_path)
    return patch_embeddings(pixels, config.patch_grid, config.embedding_dim)


def export_patch_embeddings(
    image_path: Path | str, config: AdapterConfig, out_path: Path | str
) -> np.ndarray:
    matrix = build_patch_matrix(image_path, config)
    write_embedding_matrix(matrix, out_path)
    return matrix
