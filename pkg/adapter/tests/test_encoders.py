"""Image thumbprint and trigram text encoders."""

from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from model_adapter.encoders import (
    block_mean,
    patch_embeddings,
    text_embedding,
    thumbprint,
)
from model_adapter.errors import ConfigError


def _crop(rng: np.random.Generator, h: int, w: int) -> np.ndarray:
    return rng.integers(0, 256, size=(h, w, 3), dtype=np.uint8)


def test_block_mean_constant_array():
    arr = np.full((17, 9), 42.0)
    grid = block_mean(arr, 4)
    assert grid.shape == (4, 4)
    assert np.allclose(grid, 42.0)


def test_block_mean_exact_quadrants():
    arr = np.zeros((4, 4))
    arr[:2, :2] = 1.0
    arr[:2, 2:] = 2.0
    arr[2:, :2] = 3.0
    arr[2:, 2:] = 4.0
    assert np.array_equal(block_mean(arr, 2), [[1.0, 2.0], [3.0, 4.0]])


def test_block_mean_upsamples_tiny_inputs():
    arr = np.array([[1.0, 2.0], [3.0, 4.0]])
    grid = block_mean(arr, 8)
    assert grid.shape == (8, 8)
    assert grid[0, 0] == 1.0
    assert grid[-1, -1] == 4.0


def test_thumbprint_is_unit_norm_on_random_crops():
    rng = np.random.default_rng(11)
    for _ in range(30):
        crop = _crop(rng, int(rng.integers(1, 41)), int(rng.integers(1, 41)))
        vec = thumbprint(crop, 68)
        assert vec.shape == (68,)
        assert np.isclose(np.linalg.norm(vec), 1.0)


def test_thumbprint_handles_flat_black_and_white():
    for value in (0, 255):
        crop = np.full((5, 7, 3), value, dtype=np.uint8)
        vec = thumbprint(crop, 68)
        assert np.isfinite(vec).all()
        assert np.isclose(np.linalg.norm(vec), 1.0)


@pytest.mark.parametrize("dim", [8, 20, 68, 260])
def test_thumbprint_honors_dimension(dim):
    crop = np.full((10, 10, 3), 90, dtype=np.uint8)
    assert thumbprint(crop, dim).shape == (dim,)


def test_thumbprint_rejects_bad_dimension():
    crop = np.full((10, 10, 3), 90, dtype=np.uint8)
    with pytest.raises(ConfigError):
        thumbprint(crop, 67)


@pytest.mark.parametrize("shape", [(10, 10), (0, 5, 3), (5, 0, 3), (5, 5, 4)])
def test_thumbprint_rejects_bad_shapes(shape):
    with pytest.raises(ValueError):
        thumbprint(np.zeros(shape), 68)


def test_thumbprint_noise_stays_closer_than_other_crops():
    rng = np.random.default_rng(23)
    for _ in range(20):
        base = _crop(rng, 24, 24)
        noisy = np.clip(
            base.astype(np.int64) + rng.integers(-8, 9, size=base.shape), 0, 255
        ).astype(np.uint8)
        other = _crop(rng, 24, 24)
        v_base = thumbprint(base, 68)
        v_noisy = thumbprint(noisy, 68)
        v_other = thumbprint(other, 68)
        assert v_base @ v_noisy > v_base @ v_other


def test_thumbprint_deterministic():
    rng = np.random.default_rng(3)
    crop = _crop(rng, 15, 9)
    assert np.array_equal(thumbprint(crop, 68), thumbprint(crop, 68))


def test_patch_embeddings_shape_and_norms():
    rng = np.random.default_rng(5)
    image = _crop(rng, 96, 96)
    matrix = patch_embeddings(image, 4, 68)
    assert matrix.shape == (16, 68)
    assert np.allclose(np.linalg.norm(matrix, axis=1), 1.0)


def test_patch_embeddings_single_patch_equals_whole_thumbprint():
    rng = np.random.default_rng(6)
    image = _crop(rng, 40, 56)
    matrix = patch_embeddings(image, 1, 68)
    assert np.array_equal(matrix[0], thumbprint(image, 68))


def test_patch_embeddings_first_row_is_top_left_tile():
    rng = np.random.default_rng(7)
    image = _crop(rng, 96, 96)
    matrix = patch_embeddings(image, 4, 68)
    assert np.array_equal(matrix[0], thumbprint(image[:24, :24], 68))


def test_text_embedding_unit_norm_and_deterministic():
    vec = text_embedding("standing on")
    assert np.isclose(np.linalg.norm(vec), 1.0)
    assert np.array_equal(vec, text_embedding("standing on"))


def test_text_embedding_normalizes_case_and_whitespace():
    assert np.array_equal(text_embedding("On"), text_embedding("on"))
    assert np.array_equal(text_embedding("in  front   of"), text_embedding("in front of"))


def test_text_embedding_shared_words_score_higher():
    standing = text_embedding("standing on")
    lying = text_embedding("lying on")
    eating = text_embedding("eating")
    assert standing @ lying > standing @ eating


def test_text_embedding_rejects_empty_labels():
    for label in ("", "   "):
        with pytest.raises(ValueError):
            text_embedding(label)


@settings(max_examples=50, deadline=None)
@given(
    st.text(alphabet="abcdefghijklmnopqrstuvwxyz ", min_size=1, max_size=30).filter(
        lambda s: s.strip()
    )
)
def test_text_embedding_norm_is_one_for_any_label(label):
    assert np.isclose(np.linalg.norm(text_embedding(label)), 1.0)


@settings(max_examples=50, deadline=None)
@given(
    st.text(alphabet="abcdefghijklmnopqrstuvwxyz ", min_size=1, max_size=20).filter(
        lambda s: s.strip()
    ),
    st.text(alphabet="abcdefghijklmnopqrstuvwxyz ", min_size=1, max_size=20).filter(
        lambda s: s.strip()
    ),
)
def test_text_embedding_cosines_stay_in_unit_interval(a, b):
    cosine = float(text_embedding(a) @ text_embedding(b))
    assert -1e-12 <= cosine <= 1.0 + 1e-12
