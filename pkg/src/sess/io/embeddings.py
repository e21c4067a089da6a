"""Sidecar binary format for embedding matrices (e.g. patch embeddings).

Layout, all little-endian: 4-byte magic "EMB1", uint32 dimension, uint32
row count, then count * dimension float32 values in row-major order.
"""

from __future__ import annotations

import struct
from pathlib import Path

import numpy as np

from ..errors import CorruptFile, ZeroVector

MAGIC = b"EMB1"
_HEADER = struct.Struct("<4sII")


def save_embedding_matrix(matrix, path: Path | str) -> None:
    arr = np.ascontiguousarray(matrix, dtype=np.float32)
    if arr.ndim != 2 or arr.shape[1] == 0:
        raise ValueError(f"expected a (count, dim) matrix with dim >= 1, got {arr.shape}")
    with Path(path).open("wb") as fh:
        fh.write(_HEADER.pack(MAGIC, arr.shape[1], arr.shape[0]))
        fh.write(arr.tobytes())


def load_embedding_matrix(path: Path | str) -> np.ndarray:
    path = Path(path)
    try:
        blob = path.read_bytes()
    except OSError as e:
        raise CorruptFile(f"{path}: cannot read: {e.strerror or e}") from e
    if len(blob) < _HEADER.size:
        raise CorruptFile(f"{path}: too short for an embedding file header")
    magic, dim, count = _HEADER.unpack_from(blob)
    if magic != MAGIC:
        raise CorruptFile(f"{path}: bad magic {magic!r}")
    if dim == 0:
        raise CorruptFile(f"{path}: dimension 0")
    want = _HEADER.size + 4 * dim * count
    if len(blob) != want:
        raise CorruptFile(f"{path}: expected {want} bytes for {count}x{dim}, got {len(blob)}")
    data = np.frombuffer(blob, dtype="<f4", offset=_HEADER.size)
    matrix = data.reshape(count, dim).astype(np.float64)
    if not np.all(np.isfinite(matrix)):
        raise CorruptFile(f"{path}: non-finite embedding values")
    return matrix


def load_patches(path: Path | str) -> np.ndarray:
    """Load a patch embedding set with rows normalised to unit length."""
    matrix = load_embedding_matrix(path)
    norms = np.linalg.norm(matrix, axis=1)
    if np.any(norms == 0.0):
        raise ZeroVector(f"{path}: patch set contains a zero row")
    return matrix / norms[:, None]
