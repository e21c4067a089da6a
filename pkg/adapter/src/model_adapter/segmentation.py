"""Classical object proposals: color quantization plus connected components.

Each pixel is quantized to a small color code; 4-connected components of
equal code become candidate segments. Components are then filtered:
specks below an area floor go, fringes only a few pixels thin go, ring
fragments that barely fill their own bounding box go (both are
resampling artifacts, not objects), and background is dropped: any
component hugging three or more image borders, or covering most of the
image while touching two. Survivors
are ordered by decreasing area with position tie-breaks, capped, and
numbered. Everything is pure array arithmetic, so the same image always
yields the same segments.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import ndimage

from .config import AdapterConfig

_FOUR_CONNECTED = np.array([[0, 1, 0], [1, 1, 1], [0, 1, 0]], dtype=bool)

# Anchor colors for descriptive labels, alphabetical by name.
_PALETTE = (
    ("black", (0.0, 0.0, 0.0)),
    ("blue", (50.0, 80.0, 220.0)),
    ("brown", (140.0, 90.0, 50.0)),
    ("cyan", (70.0, 200.0, 200.0)),
    ("gray", (128.0, 128.0, 128.0)),
    ("green", (60.0, 180.0, 75.0)),
    ("orange", (240.0, 150.0, 40.0)),
    ("pink", (240.0, 150.0, 180.0)),
    ("purple", (150.0, 60.0, 180.0)),
    ("red", (220.0, 40.0, 40.0)),
    ("white", (255.0, 255.0, 255.0)),
    ("yellow", (240.0, 220.0, 60.0)),
)


@dataclass(frozen=True, slots=True)
class Segment:
    """One proposed object: full-image boolean mask plus summary stats."""

    mask: np.ndarray
    bbox: tuple[int, int, int, int]
    area: int
    mean_rgb: tuple[float, float, float]

    def __post_init__(self) -> None:
        self.mask.setflags(write=False)


def quantize_codes(pixels: np.ndarray, levels: int) -> np.ndarray:
    """Map (H, W, 3) pixels to one small integer code per pixel."""
    arr = np.asarray(pixels, dtype=np.int64)
    q = np.clip((arr * levels) // 256, 0, levels - 1)
    return q[:, :, 0] * levels * levels + q[:, :, 1] * levels + q[:, :, 2]


def _bbox_of(mask: np.ndarray) -> tuple[int, int, int, int]:
    ys, xs = np.nonzero(mask)
    x, y = int(xs.min()), int(ys.min())
    return (x, y, int(xs.max()) - x + 1, int(ys.max()) - y + 1)


def _borders_touched(mask: np.ndarray) -> int:
    return int(mask[0].any()) + int(mask[-1].any()) + int(mask[:, 0].any()) + int(mask[:, -1].any())


def segment_image(pixels: np.ndarray, config: AdapterConfig) -> list[Segment]:
    """Propose up to config.max_nodes object segments for an RGB image."""
    image = np.asarray(pixels)
    if image.ndim != 3 or image.shape[2] != 3:
        raise ValueError(f"expected an (H, W, 3) image, got shape {image.shape}")
    h, w = image.shape[:2]
    total = h * w
    min_area = max(1, int(round(config.min_area_fraction * total)))
    codes = quantize_codes(image, config.quant_levels)

    kept: list[tuple[int, int, int, int, np.ndarray, tuple[int, int, int, int]]] = []
    for code in np.unique(codes):
        labeled, count = ndimage.label(codes == code, structure=_FOUR_CONNECTED)
        for idx in range(1, count + 1):
            mask = labeled == idx
            area = int(mask.sum())
            if area < min_area:
                continue
            bbox = _bbox_of(mask)
            if bbox[2] < config.min_extent or bbox[3] < config.min_extent:
                continue
            if area < config.min_fill_ratio * bbox[2] * bbox[3]:
                continue
            borders = _borders_touched(mask)
            if borders >= 3 or (area > 0.5 * total and borders >= 2):
                continue
            kept.append((-area, bbox[1], bbox[0], int(code), mask, bbox))

    kept.sort(key=lambda item: item[:4])
    segments = []
    for neg_area, _, _, _, mask, bbox in kept[: config.max_nodes]:
        mean_rgb = image[mask].astype(np.float64).mean(axis=0)
        segments.append(
            Segment(
                mask=mask,
                bbox=bbox,
                area=-neg_area,
                mean_rgb=(float(mean_rgb[0]), float(mean_rgb[1]), float(mean_rgb[2])),
            )
        )
    return segments


def describe(segment: Segment, image_area: int) -> str:
    """Descriptive label from size and nearest anchor color."""
    best_name = _PALETTE[0][0]
    best_dist = float("inf")
    for name, anchor in _PALETTE:
        dist = sum((c - a) ** 2 for c, a in zip(segment.mean_rgb, anchor))
        if dist < best_dist:
            best_name = name
            best_dist = dist
    fraction = segment.area / image_area
    if fraction >= 0.25:
        size = "large"
    elif fraction >= 0.05:
        size = "medium"
    else:
        size = "small"
    return f"{size} {best_name} region"
