"""Writers for the interchange formats the scoring engine consumes.

Three formats are produced, matching the published contracts exactly:

- Graph and relation-table files are canonical JSON: sorted keys, compact
  separators, one trailing newline. Canonical output makes byte equality
  meaningful, so determinism checks reduce to file comparison.
- Binary masks use the COCO counts-string convention: run lengths over
  the column-major flattening, zeros first, packed in 5-bit chunks with
  a continuation bit, shifted into printable ASCII, counts from index 3
  on stored as deltas against the count two back.
- Embedding matrices use the EMB1 sidecar layout: 4-byte magic, uint32
  dimension, uint32 row count, then row-major float32 values, all
  little-endian.

This package writes these formats and never reads them back; reading is
the scoring engine's side of the contract.
"""

from __future__ import annotations

import json
import struct
from pathlib import Path
from typing import Any, Sequence

import numpy as np

GRAPH_SCHEMA_VERSION = "1"

_CHAR_BASE = 48
_EMB_HEADER = struct.Struct("<4sII")
_EMB_MAGIC = b"EMB1"


def canonical_dumps(payload: Any) -> str:
    return json.dumps(payload, sort_keys=True, separators=(",", ":"), allow_nan=False) + "\n"


def write_canonical_json(payload: Any, path: Path | str) -> None:
    Path(path).write_text(canonical_dumps(payload), encoding="utf-8")


def mask_to_counts(mask: np.ndarray) -> list[int]:
    """Column-major run lengths, always starting with the zero run."""
    m = np.asarray(mask)
    if m.ndim != 2:
        raise ValueError(f"mask must be 2-D, got shape {m.shape}")
    flat = m.astype(bool).flatten(order="F")
    counts: list[int] = []
    current = False
    run = 0
    for bit in flat:
        if bit == current:
            run += 1
        else:
            counts.append(run)
            current = bit
            run = 1
    counts.append(run)
    return counts


def encode_counts(counts: Sequence[int]) -> str:
    chars: list[str] = []
    for i, count in enumerate(counts):
        x = count
        if i > 2:
            x -= counts[i - 2]
        more = True
        while more:
            c = x & 0x1F
            x >>= 5
            more = (x != -1) if (c & 0x10) else (x != 0)
            if more:
                c |= 0x20
            chars.append(chr(c + _CHAR_BASE))
    return "".join(chars)


def encode_mask(mask: np.ndarray) -> str:
    return encode_counts(mask_to_counts(mask))


def graph_payload(
    image_id: str,
    width: int,
    height: int,
    image_embedding: np.ndarray,
    nodes: Sequence[dict],
    edges: Sequence[dict],
    provenance: dict,
) -> dict:
    """Assemble a schema-valid graph payload from prepared node/edge dicts."""
    return {
        "schema_version": GRAPH_SCHEMA_VERSION,
        "image": {
            "id": image_id,
            "width": int(width),
            "height": int(height),
            "embedding": [float(v) for v in image_embedding],
        },
        "nodes": list(nodes),
        "edges": list(edges),
        "provenance": provenance,
    }


def table_payload(labels: Sequence[str], values: np.ndarray) -> dict:
    return {
        "schema_version": GRAPH_SCHEMA_VERSION,
        "labels": list(labels),
        "values": [[float(v) for v in row] for row in np.asarray(values)],
    }


def write_embedding_matrix(matrix: np.ndarray, path: Path | str) -> None:
    arr = np.ascontiguousarray(matrix, dtype=np.float32)
    if arr.ndim != 2 or arr.shape[1] == 0:
        raise ValueError(f"expected a (count, dim) matrix with dim >= 1, got {arr.shape}")
    with Path(path).open("wb") as fh:
        fh.write(_EMB_HEADER.pack(_EMB_MAGIC, arr.shape[1], arr.shape[0]))
        fh.write(arr.tobytes())
