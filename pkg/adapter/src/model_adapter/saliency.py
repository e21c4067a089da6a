"""Per-object salience from image gradients.

Pixel salience is the Sobel gradient magnitude of the luma channel,
smoothed with a 3x3 box filter; an object's raw mass is that map summed
over its mask. Flat regions carry zero mass, busy regions carry a lot.
The masses are written to the graph file as raw importance so the
scoring engine can weight objects without ever seeing the pixels.
"""

from __future__ import annotations

from typing import Sequence

import numpy as np
from scipy import ndimage

from .segmentation import Segment

_LUMA = np.array([0.299, 0.587, 0.114])


def pixel_salience(pixels: np.ndarray) -> np.ndarray:
    """Nonnegative (H, W) salience map of an (H, W, 3) image."""
    image = np.asarray(pixels, dtype=np.float64)
    if image.ndim != 3 or image.shape[2] != 3:
        raise ValueError(f"expected an (H, W, 3) image, got shape {image.shape}")
    luma = image @ _LUMA
    gx = ndimage.sobel(luma, axis=1, mode="reflect")
    gy = ndimage.sobel(luma, axis=0, mode="reflect")
    magnitude = np.sqrt(gx * gx + gy * gy)
    return ndimage.uniform_filter(magnitude, size=3, mode="reflect")


def segment_masses(pixels: np.ndarray, segments: Sequence[Segment]) -> list[float]:
    """Raw salience mass under each segment's mask."""
    if not segments:
        return []
    salience = pixel_salience(pixels)
    return [float(salience[seg.mask].sum()) for seg in segments]
