"""Deterministic classical encoders for images, crops, and label text.

The image encoder ("thumbprint") block-averages a region to a g-by-g
intensity grid, appends the region's mean color and a constant slot, and
unit-normalizes. Two crops of the same scene content land close in
cosine even after mild resampling, while differently shaped or colored
regions land far apart. The constant slot guarantees a nonzero norm, so
flat black crops still encode.

The text encoder hashes character trigrams of a label into a fixed-size
count vector and unit-normalizes. Labels sharing words ("standing on",
"lying on") overlap in trigrams and score higher than unrelated labels.
Counts are nonnegative, so all pairwise cosines already lie in [0, 1].
"""

from __future__ import annotations

import hashlib

import numpy as np

from .config import grid_size

# BT.601 luma coefficients for RGB input.
_LUMA = np.array([0.299, 0.587, 0.114])

TEXT_DIM = 256


def _spans(extent: int, parts: int) -> list[tuple[int, int]]:
    """Split [0, extent) into `parts` non-empty index spans.

    Downsampling spans are disjoint and cover everything; upsampling
    (extent < parts) repeats pixels so every span stays non-empty.
    """
    edges = np.linspace(0.0, float(extent), parts + 1)
    spans = []
    for i in range(parts):
        lo = min(int(edges[i]), extent - 1)
        hi = min(extent, max(lo + 1, int(np.ceil(edges[i + 1]))))
        spans.append((lo, hi))
    return spans


def block_mean(channel: np.ndarray, g: int) -> np.ndarray:
    """Reduce a 2-D array to a g-by-g grid of block means."""
    h, w = channel.shape
    rows = _spans(h, g)
    cols = _spans(w, g)
    out = np.empty((g, g))
    for i, (y0, y1) in enumerate(rows):
        band = channel[y0:y1]
        for j, (x0, x1) in enumerate(cols):
            out[i, j] = band[:, x0:x1].mean()
    return out


def thumbprint(pixels: np.ndarray, embedding_dim: int) -> np.ndarray:
    """Unit-norm embedding of an (H, W, 3) pixel region.

    Layout: g*g centered intensity cells, mean R, mean G, mean B (each
    scaled to [0, 1]), and a constant 1.0 that keeps the norm positive.
    """
    region = np.asarray(pixels, dtype=np.float64)
    if region.ndim != 3 or region.shape[2] != 3 or region.shape[0] == 0 or region.shape[1] == 0:
        raise ValueError(f"expected a non-empty (H, W, 3) region, got shape {region.shape}")
    g = grid_size(embedding_dim)
    luma = region @ _LUMA
    grid = (block_mean(luma, g).ravel() - 128.0) / 255.0
    mean_rgb = region.reshape(-1, 3).mean(axis=0) / 255.0
    features = np.concatenate([grid, mean_rgb, [1.0]])
    return features / np.linalg.norm(features)


def patch_embeddings(pixels: np.ndarray, patch_grid: int, embedding_dim: int) -> np.ndarray:
    """Thumbprint every cell of a patch_grid^2 tiling of the image.

    Returns a (patch_grid^2, embedding_dim) matrix with unit-norm rows,
    tiles ordered row-major from the top-left.
    """
    image = np.asarray(pixels, dtype=np.float64)
    if image.ndim != 3 or image.shape[2] != 3:
        raise ValueError(f"expected an (H, W, 3) image, got shape {image.shape}")
    h, w = image.shape[:2]
    rows = _spans(h, patch_grid)
    cols = _spans(w, patch_grid)
    out = np.empty((patch_grid * patch_grid, embedding_dim))
    idx = 0
    for y0, y1 in rows:
        for x0, x1 in cols:
            out[idx] = thumbprint(image[y0:y1, x0:x1], embedding_dim)
            idx += 1
    return out


def _trigram_slot(trigram: str) -> int:
    digest = hashlib.sha256(trigram.encode("utf-8")).digest()
    return int.from_bytes(digest[:8], "big") % TEXT_DIM


def text_embedding(label: str) -> np.ndarray:
    """Unit-norm trigram-count embedding of a relation label."""
    words = label.lower().split()
    if not words:
        raise ValueError("label must contain at least one character")
    text = " " + " ".join(words) + " "
    counts = np.zeros(TEXT_DIM)
    for i in range(len(text) - 2):
        counts[_trigram_slot(text[i : i + 3])] += 1.0
    return counts / np.linalg.norm(counts)
