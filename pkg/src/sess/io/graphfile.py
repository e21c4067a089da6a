"""Graph and relation-table files: versioned JSON with a canonical form.

Canonical output has sorted keys, compact separators, and one trailing
newline, so writing any loaded file is byte-stable: load -> save -> load
is a fixpoint and canonicalized files round-trip byte-identically.
Unknown fields are rejected under strict parsing and ignored otherwise;
they are never preserved on save.
"""

from __future__ import annotations

import json
import math
from pathlib import Path
from typing import Any, Optional

import numpy as np

from ..errors import CorruptFile
from ..model import (
    GraphEdge,
    GraphNode,
    ImageMeta,
    Region,
    RelationSimilarityTable,
    SceneGraph,
    validate_graph,
)
from .rle import decode_mask, encode_mask

SCHEMA_VERSION = "1"

_GRAPH_FIELDS = {"schema_version", "image", "nodes", "edges", "provenance"}
_IMAGE_FIELDS = {"id", "width", "height", "embedding"}
_NODE_FIELDS = {"id", "label", "bbox", "mask_rle", "embedding", "raw_importance"}
_EDGE_FIELDS = {"subject", "object", "relation"}
_TABLE_FIELDS = {"schema_version", "labels", "values"}


def canonical_dumps(payload: Any) -> str:
    return json.dumps(payload, sort_keys=True, separators=(",", ":"), allow_nan=False) + "\n"


def _load_json(path: Path) -> Any:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as e:
        raise CorruptFile(f"{path}: cannot read: {e.strerror or e}") from e
    try:
        return json.loads(text)
    except json.JSONDecodeError as e:
        raise CorruptFile(f"{path}: malformed JSON at byte offset {e.pos}: {e.msg}") from e


def _check_fields(obj: dict, allowed: set[str], where: str, strict: bool) -> None:
    if not strict:
        return
    unknown = sorted(set(obj) - allowed)
    if unknown:
        raise CorruptFile(f"{where}: unknown field(s) {', '.join(unknown)}")


def _want(obj: dict, field: str, where: str) -> Any:
    if field not in obj:
        raise CorruptFile(f"{where}: missing field '{field}'")
    return obj[field]


def _as_int(value: Any, where: str) -> int:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise CorruptFile(f"{where}: expected an integer, got {value!r}")
    if isinstance(value, float):
        if not value.is_integer():
            raise CorruptFile(f"{where}: expected an integer, got {value!r}")
        value = int(value)
    return value


def _as_number(value: Any, where: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise CorruptFile(f"{where}: expected a number, got {value!r}")
    if not math.isfinite(value):
        raise CorruptFile(f"{where}: number must be finite, got {value!r}")
    return float(value)


def _as_str(value: Any, where: str) -> str:
    if not isinstance(value, str):
        raise CorruptFile(f"{where}: expected a string, got {value!r}")
    return value


def _as_vector(value: Any, where: str) -> np.ndarray:
    if not isinstance(value, list) or not value:
        raise CorruptFile(f"{where}: expected a non-empty array of numbers")
    return np.array([_as_number(v, f"{where}[{i}]") for i, v in enumerate(value)])


def parse_graph(payload: Any, strict: bool = False, where: str = "graph") -> SceneGraph:
    if not isinstance(payload, dict):
        raise CorruptFile(f"{where}: expected a JSON object at the top level")
    _check_fields(payload, _GRAPH_FIELDS, where, strict)
    version = _as_str(_want(payload, "schema_version", where), f"{where}.schema_version")
    if version != SCHEMA_VERSION:
        raise CorruptFile(f"{where}: unsupported schema_version {version!r}")

    img = _want(payload, "image", where)
    if not isinstance(img, dict):
        raise CorruptFile(f"{where}.image: expected an object")
    _check_fields(img, _IMAGE_FIELDS, f"{where}.image", strict)
    width = _as_int(_want(img, "width", f"{where}.image"), f"{where}.image.width")
    height = _as_int(_want(img, "height", f"{where}.image"), f"{where}.image.height")

    nodes = []
    raw_nodes = payload.get("nodes", [])
    if not isinstance(raw_nodes, list):
        raise CorruptFile(f"{where}.nodes: expected an array")
    for i, rn in enumerate(raw_nodes):
        at = f"{where}.nodes[{i}]"
        if not isinstance(rn, dict):
            raise CorruptFile(f"{at}: expected an object")
        _check_fields(rn, _NODE_FIELDS, at, strict)
        bbox = _want(rn, "bbox", at)
        if not isinstance(bbox, list) or len(bbox) != 4:
            raise CorruptFile(f"{at}.bbox: expected [x, y, w, h]")
        x, y, w, h = (_as_int(v, f"{at}.bbox[{j}]") for j, v in enumerate(bbox))
        mask = None
        if rn.get("mask_rle") is not None:
            try:
                mask = decode_mask(_as_str(rn["mask_rle"], f"{at}.mask_rle"), height, width)
            except CorruptFile as e:
                raise CorruptFile(f"{at}.mask_rle: {e}") from e
        raw_imp = rn.get("raw_importance")
        try:
            nodes.append(
                GraphNode(
                    id=_as_int(_want(rn, "id", at), f"{at}.id"),
                    label=_as_str(_want(rn, "label", at), f"{at}.label"),
                    region=Region(x=x, y=y, w=w, h=h, mask=mask),
                    embedding=_as_vector(_want(rn, "embedding", at), f"{at}.embedding"),
                    raw_importance=(
                        None if raw_imp is None else _as_number(raw_imp, f"{at}.raw_importance")
                    ),
                )
            )
        except ValueError as e:
            raise CorruptFile(f"{at}: {e}") from e

    edges = []
    raw_edges = payload.get("edges", [])
    if not isinstance(raw_edges, list):
        raise CorruptFile(f"{where}.edges: expected an array")
    for i, re_ in enumerate(raw_edges):
        at = f"{where}.edges[{i}]"
        if not isinstance(re_, dict):
            raise CorruptFile(f"{at}: expected an object")
        _check_fields(re_, _EDGE_FIELDS, at, strict)
        try:
            edges.append(
                GraphEdge(
                    subject=_as_int(_want(re_, "subject", at), f"{at}.subject"),
                    object=_as_int(_want(re_, "object", at), f"{at}.object"),
                    relation=_as_str(_want(re_, "relation", at), f"{at}.relation"),
                )
            )
        except ValueError as e:
            raise CorruptFile(f"{at}: {e}") from e

    provenance = payload.get("provenance")
    if provenance is not None and not isinstance(provenance, dict):
        raise CorruptFile(f"{where}.provenance: expected an object")

    try:
        graph = SceneGraph(
            image=ImageMeta(
                source_id=_as_str(_want(img, "id", f"{where}.image"), f"{where}.image.id"),
                width=width,
                height=height,
            ),
            image_embedding=_as_vector(
                _want(img, "embedding", f"{where}.image"), f"{where}.image.embedding"
            ),
            nodes=tuple(nodes),
            edges=tuple(edges),
            provenance=provenance,
        )
    except ValueError as e:
        raise CorruptFile(f"{where}: {e}") from e

    problems = validate_graph(graph)
    if problems:
        raise CorruptFile(f"{where}: invalid graph: " + "; ".join(problems))
    return graph


def load_graph_file(path: Path | str, strict: bool = False) -> SceneGraph:
    return parse_graph(_load_json(Path(path)), strict=strict, where=str(path))


def graph_to_payload(graph: SceneGraph) -> dict:
    nodes = []
    for n in graph.nodes:
        entry: dict[str, Any] = {
            "id": n.id,
            "label": n.label,
            "bbox": [n.region.x, n.region.y, n.region.w, n.region.h],
            "embedding": [float(v) for v in n.embedding],
        }
        if n.region.mask is not None:
            entry["mask_rle"] = encode_mask(n.region.mask)
        if n.raw_importance is not None:
            entry["raw_importance"] = float(n.raw_importance)
        nodes.append(entry)
    payload: dict[str, Any] = {
        "schema_version": SCHEMA_VERSION,
        "image": {
            "id": graph.image.source_id,
            "width": graph.image.width,
            "height": graph.image.height,
            "embedding": [float(v) for v in graph.image_embedding],
        },
        "nodes": nodes,
        "edges": [
            {"subject": e.subject, "object": e.object, "relation": e.relation}
            for e in graph.edges
        ],
    }
    if graph.provenance is not None:
        payload["provenance"] = graph.provenance
    return payload


def save_graph_file(graph: SceneGraph, path: Path | str) -> None:
    Path(path).write_text(canonical_dumps(graph_to_payload(graph)), encoding="utf-8")


def parse_relation_table(payload: Any, strict: bool = False, where: str = "table") -> RelationSimilarityTable:
    if not isinstance(payload, dict):
        raise CorruptFile(f"{where}: expected a JSON object at the top level")
    _check_fields(payload, _TABLE_FIELDS, where, strict)
    version = _as_str(_want(payload, "schema_version", where), f"{where}.schema_version")
    if version != SCHEMA_VERSION:
        raise CorruptFile(f"{where}: unsupported schema_version {version!r}")
    labels = _want(payload, "labels", where)
    if not isinstance(labels, list):
        raise CorruptFile(f"{where}.labels: expected an array of strings")
    labels = tuple(_as_str(v, f"{where}.labels[{i}]") for i, v in enumerate(labels))
    rows = _want(payload, "values", where)
    if not isinstance(rows, list) or len(rows) != len(labels):
        raise CorruptFile(f"{where}.values: expected {len(labels)} rows")
    values = np.zeros((len(labels), len(labels)))
    for i, row in enumerate(rows):
        if not isinstance(row, list) or len(row) != len(labels):
            raise CorruptFile(f"{where}.values[{i}]: expected {len(labels)} numbers")
        for j, v in enumerate(row):
            values[i, j] = _as_number(v, f"{where}.values[{i}][{j}]")
    try:
        return RelationSimilarityTable(labels=labels, values=values)
    except ValueError as e:
        raise CorruptFile(f"{where}: {e}") from e


def load_relation_table(path: Path | str, strict: bool = False) -> RelationSimilarityTable:
    return parse_relation_table(_load_json(Path(path)), strict=strict, where=str(path))


def table_to_payload(table: RelationSimilarityTable) -> dict:
    return {
        "schema_version": SCHEMA_VERSION,
        "labels": list(table.labels),
        "values": [[float(v) for v in row] for row in table.values],
    }


def save_relation_table(table: RelationSimilarityTable, path: Path | str) -> None:
    Path(path).write_text(canonical_dumps(table_to_payload(table)), encoding="utf-8")
