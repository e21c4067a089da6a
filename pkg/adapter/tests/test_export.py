"""End-to-end export pipeline: images to payloads and files."""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np
import pytest

from helpers import draw_scene, save_png
from model_adapter.config import AdapterConfig
from model_adapter.errors import AdapterError, InferenceError, ModelLoadError
from model_adapter.export import (
    build_graph_payload,
    build_patch_matrix,
    build_table_payload,
    export_graph,
    export_patch_embeddings,
    export_relation_table,
    load_image,
)
from model_adapter.vocab import PSG_RELATIONS

_NODE_FIELDS = {"id", "label", "bbox", "mask_rle", "embedding", "raw_importance"}


def _stacked_scene(tmp_path: Path) -> Path:
    img = np.full((96, 96, 3), 255, dtype=np.uint8)
    img[60:80, 20:76] = (50, 80, 220)
    img[36:60, 30:54] = (220, 40, 40)
    return save_png(img, tmp_path / "stack.png")


def test_graph_payload_structure(tmp_path: Path):
    payload = build_graph_payload(_stacked_scene(tmp_path), AdapterConfig())
    assert payload["schema_version"] == "1"
    assert payload["image"]["id"] == "stack"
    assert payload["image"]["width"] == 96
    assert payload["image"]["height"] == 96
    assert len(payload["image"]["embedding"]) == 68
    assert len(payload["nodes"]) == 2
    for i, node in enumerate(payload["nodes"]):
        assert set(node) == _NODE_FIELDS
        assert node["id"] == i
        assert isinstance(node["mask_rle"], str) and node["mask_rle"]
        assert len(node["embedding"]) == 68
        assert node["raw_importance"] >= 0.0
    assert payload["edges"] == [{"subject": 1, "object": 0, "relation": "on"}]
    assert payload["provenance"]["crop_policy"] == "bbox-crop"
    assert payload["provenance"]["backend_version"] == "classical-1"


def test_export_is_deterministic(tmp_path: Path):
    scene = _stacked_scene(tmp_path)
    cfg = AdapterConfig()
    first = tmp_path / "a.json"
    second = tmp_path / "b.json"
    export_graph(scene, cfg, first)
    export_graph(scene, cfg, second)
    assert first.read_bytes() == second.read_bytes()


def test_blank_image_yields_empty_valid_payload(tmp_path: Path):
    blank = save_png(np.full((64, 64, 3), 255, dtype=np.uint8), tmp_path / "blank.png")
    payload = build_graph_payload(blank, AdapterConfig())
    assert payload["nodes"] == []
    assert payload["edges"] == []
    assert len(payload["image"]["embedding"]) == 68


def test_crop_policy_changes_node_embeddings_and_is_recorded(tmp_path: Path):
    scene = _stacked_scene(tmp_path)
    bbox = build_graph_payload(scene, AdapterConfig(crop_policy="bbox-crop"))
    frame = build_graph_payload(scene, AdapterConfig(crop_policy="mask-zeroed-frame"))
    assert bbox["provenance"]["crop_policy"] == "bbox-crop"
    assert frame["provenance"]["crop_policy"] == "mask-zeroed-frame"
    assert bbox["nodes"][0]["embedding"] != frame["nodes"][0]["embedding"]
    assert bbox["image"]["embedding"] == frame["image"]["embedding"]


def test_relation_threshold_gates_edges(tmp_path: Path):
    img = np.full((96, 96, 3), 255, dtype=np.uint8)
    img[60:80, 20:60] = (50, 80, 220)
    img[36:60, 30:80] = (220, 40, 40)
    scene = save_png(img, tmp_path / "partial.png")
    loose = build_graph_payload(scene, AdapterConfig(relation_threshold=0.0))
    tight = build_graph_payload(scene, AdapterConfig(relation_threshold=0.99))
    assert len(loose["edges"]) > len(tight["edges"])


def test_embedding_dim_flows_through(tmp_path: Path):
    scene = _stacked_scene(tmp_path)
    payload = build_graph_payload(scene, AdapterConfig(embedding_dim=20))
    assert len(payload["image"]["embedding"]) == 20
    assert all(len(n["embedding"]) == 20 for n in payload["nodes"])


def test_neural_backend_requires_checkpoints(tmp_path: Path):
    scene = _stacked_scene(tmp_path)
    with pytest.raises(ModelLoadError, match="sam_checkpoint"):
        build_graph_payload(scene, AdapterConfig(backend="neural"))


def test_neural_backend_fails_cleanly_with_checkpoints(tmp_path: Path):
    scene = _stacked_scene(tmp_path)
    ckpt = tmp_path / "sam.pth"
    ckpt.write_bytes(b"weights")
    cfg = AdapterConfig(backend="neural", sam_checkpoint=str(ckpt), clip_model="vit-b-32")
    with pytest.raises(ModelLoadError):
        build_graph_payload(scene, cfg)


def test_missing_image_raises_inference_error(tmp_path: Path):
    with pytest.raises(InferenceError, match="cannot read"):
        load_image(tmp_path / "absent.png")


def test_undecodable_image_raises_inference_error(tmp_path: Path):
    bogus = tmp_path / "bogus.png"
    bogus.write_text("not an image")
    with pytest.raises(InferenceError, match="cannot decode"):
        load_image(bogus)


def test_single_label_table_is_identity():
    payload = build_table_payload(["on"], AdapterConfig())
    assert payload["labels"] == ["on"]
    assert payload["values"] == [[1.0]]


def test_table_is_symmetric_with_unit_diagonal():
    payload = build_table_payload(["standing on", "lying on", "eating"], AdapterConfig())
    values = np.array(payload["values"])
    assert np.array_equal(values, values.T)
    assert np.array_equal(np.diag(values), np.ones(3))
    assert values.min() >= 0.0
    assert values.max() <= 1.0
    assert values[0, 1] > values[0, 2]


def test_full_vocabulary_table_shape():
    payload = build_table_payload(PSG_RELATIONS, AdapterConfig())
    assert len(payload["labels"]) == 56
    assert len(payload["values"]) == 56
    assert all(len(row) == 56 for row in payload["values"])


def test_table_rejects_duplicates_and_empty():
    with pytest.raises(AdapterError, match="unique"):
        build_table_payload(["on", "on"], AdapterConfig())
    with pytest.raises(AdapterError, match="at least one"):
        build_table_payload([], AdapterConfig())


def test_table_file_round_trips_canonically(tmp_path: Path):
    path = tmp_path / "table.json"
    payload = export_relation_table(["on", "in"], AdapterConfig(), path)
    assert json.loads(path.read_text()) == payload


def test_patch_matrix_shape_and_file(tmp_path: Path):
    scene = save_png(draw_scene(41), tmp_path / "scene.png")
    cfg = AdapterConfig()
    matrix = build_patch_matrix(scene, cfg)
    assert matrix.shape == (16, 68)
    assert np.allclose(np.linalg.norm(matrix, axis=1), 1.0)
    out = tmp_path / "scene.emb"
    export_patch_embeddings(scene, cfg, out)
    assert out.read_bytes().startswith(b"EMB1")


def test_patch_matrix_missing_image(tmp_path: Path):
    with pytest.raises(InferenceError):
        build_patch_matrix(tmp_path / "absent.png", AdapterConfig())


def test_bbox_crop_ignores_pixels_outside_the_box(tmp_path: Path):
    base = np.full((96, 96, 3), 255, dtype=np.uint8)
    base[30:60, 30:60] = (220, 40, 40)
    other = base.copy()
    other[70:90, 70:90] = (50, 80, 220)
    p_base = save_png(base, tmp_path / "one.png")
    p_other = save_png(other, tmp_path / "two.png")
    cfg = AdapterConfig(crop_policy="bbox-crop")
    e_base = build_graph_payload(p_base, cfg)["nodes"][0]["embedding"]
    e_other = build_graph_payload(p_other, cfg)["nodes"][0]["embedding"]
    assert e_base == e_other
