"""Object importance weighting from image gradients.

Pixel importance is the Sobel gradient magnitude of the luma channel,
smoothed with a 3x3 box filter. Per-object raw mass is the map summed over
the object's mask (bbox as fallback); masses are flattened with a k-th
root before normalising so dominant objects do not swamp the matching.
"""

from __future__ import annotations

from typing import Optional, Sequence

import numpy as np
from scipy import ndimage

from .errors import EmptyImage, NoNodes
from .model import GraphNode

# BT.601 luma coefficients for RGB input.
_LUMA = np.array([0.299, 0.587, 0.114])


def predict_pixel_importance(image: np.ndarray) -> np.ndarray:
    """Per-pixel importance map of a grayscale (H, W) or RGB (H, W, 3) image.

    Returns a float64 (H, W) array, >= 0 everywhere; a constant image maps
    to all zeros. Linear in the pixel values (up to the luma conversion),
    so doubling contrast doubles the map.
    """
    img = np.asarray(image, dtype=np.float64)
    if img.size == 0:
        raise EmptyImage("image has no pixels")
    if img.ndim == 3 and img.shape[2] == 3:
        img = img @ _LUMA
    if img.ndim != 2:
        raise ValueError(f"expected (H, W) or (H, W, 3) image, got shape {image.shape}")
    gx = ndimage.sobel(img, axis=1, mode="reflect")
    gy = ndimage.sobel(img, axis=0, mode="reflect")
    magnitude = np.sqrt(gx * gx + gy * gy)
    return ndimage.uniform_filter(magnitude, size=3, mode="reflect")


def flatten_weights(raw: Sequence[float], k: float) -> np.ndarray:
    """Normalise raw non-negative masses into weights via a k-th root.

    w_i = raw_i**(1/k) / sum_j raw_j**(1/k); an all-zero input degenerates
    to the uniform distribution. Larger k pushes the weights toward
    uniform regardless of how skewed the raw masses are.
    """
    s = np.asarray(raw, dtype=np.float64)
    if s.size == 0:
        raise NoNodes("cannot build an importance distribution over zero objects")
    if s.min() < 0.0 or not np.all(np.isfinite(s)):
        raise ValueError("raw importance masses must be finite and >= 0")
    if k < 1.0:
        raise ValueError(f"k must be >= 1, got {k}")
    t = s ** (1.0 / k)
    total = t.sum()
    if total == 0.0:
        return np.full(s.size, 1.0 / s.size)
    return t / total


def object_importance(
    importance_map: np.ndarray, nodes: Sequence[GraphNode], k: float
) -> np.ndarray:
    """Importance weight per node from a pixel importance map.

    Each node's raw mass is the map summed over its mask, or over its bbox
    when no mask is present. Weights sum to 1; a map that is zero over
    every object yields uniform weights.
    """
    imap = np.asarray(importance_map, dtype=np.float64)
    if imap.ndim != 2:
        raise ValueError(f"importance map must be 2-D, got shape {imap.shape}")
    if not nodes:
        raise NoNodes("cannot weight an empty node list")
    h, w = imap.shape
    masses = np.empty(len(nodes))
    for i, node in enumerate(nodes):
        r = node.region
        if r.x < 0 or r.y < 0 or r.x + r.w > w or r.y + r.h > h:
            raise ValueError(f"node {node.id}: bbox {r.bbox} outside {w}x{h} map")
        if r.mask is not None:
            if r.mask.shape != (h, w):
                raise ValueError(f"node {node.id}: mask shape {r.mask.shape} != map {(h, w)}")
            masses[i] = imap[r.mask].sum()
        else:
            masses[i] = imap[r.y : r.y + r.h, r.x : r.x + r.w].sum()
    return flatten_weights(masses, k)


def graph_importance(nodes: Sequence[GraphNode], k: float) -> np.ndarray:
    """Importance weights from the raw masses stored on the nodes.

    Nodes without a stored raw_importance contribute zero mass; if no node
    carries any mass the distribution is uniform (this also covers graphs
    that never had importance computed).
    """
    if not nodes:
        raise NoNodes("cannot weight an empty node list")
    raw = [n.raw_importance if n.raw_importance is not None else 0.0 for n in nodes]
    return flatten_weights(raw, k)


def node_importance(
    nodes: Sequence[GraphNode], k: float, importance_map: Optional[np.ndarray] = None
) -> np.ndarray:
    """Dispatch: pixel map when available, stored raw masses otherwise."""
    if importance_map is not None:
        return object_importance(importance_map, nodes, k)
    return graph_importance(nodes, k)
