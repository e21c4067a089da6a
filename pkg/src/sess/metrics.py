"""Reference image metrics: MSE, PSNR, SSIM, multi-scale SSIM, patch F-score.

Pixel metrics assume 8-bit sample values (peak 255). MSE and PSNR run over
all channels; the SSIM family converts RGB to BT.601 luma first. The patch
F-score compares two sets of patch embeddings by greedy best-match cosine
in both directions.
"""

from __future__ import annotations

import math

import numpy as np
from scipy import ndimage

from .errors import DimensionMismatch, EmptySet, ShapeMismatch, TooSmall, ZeroVector

_PEAK = 255.0

SSIM_WINDOW = 11
SSIM_SIGMA = 1.5
SSIM_K1 = 0.01
SSIM_K2 = 0.03
_C1 = (SSIM_K1 * _PEAK) ** 2
_C2 = (SSIM_K2 * _PEAK) ** 2

# Per-scale weights of the 5-scale configuration (they sum to 1); fewer
# scales renormalise the prefix.
MS_SSIM_WEIGHTS = (0.0448, 0.2856, 0.3001, 0.2363, 0.1333)

_LUMA = np.array([0.299, 0.587, 0.114])


def _as_pair(x, y) -> tuple[np.ndarray, np.ndarray]:
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if x.shape != y.shape:
        raise ShapeMismatch(f"images differ in shape: {x.shape} vs {y.shape}")
    if x.size == 0:
        raise ShapeMismatch("images have no pixels")
    return x, y


def _to_luma(img: np.ndarray) -> np.ndarray:
    if img.ndim == 3 and img.shape[2] == 3:
        return img @ _LUMA
    if img.ndim == 2:
        return img
    raise ShapeMismatch(f"expected (H, W) or (H, W, 3) image, got shape {img.shape}")


def mse(x, y) -> float:
    """Mean squared error over every sample (all channels)."""
    x, y = _as_pair(x, y)
    d = x - y
    return float(np.mean(d * d))


def psnr(x, y) -> float:
    """Peak signal-to-noise ratio in dB against a peak of 255.

    Identical images have zero error; that case returns +inf (rendered as
    the string "inf" in file output).
    """
    err = mse(x, y)
    if err == 0.0:
        return math.inf
    return 10.0 * math.log10(_PEAK * _PEAK / err)


def _gaussian_window(size: int, sigma: float) -> np.ndarray:
    half = (size - 1) / 2.0
    coords = np.arange(size) - half
    g = np.exp(-(coords * coords) / (2.0 * sigma * sigma))
    win = np.outer(g, g)
    return win / win.sum()


_WINDOW = _gaussian_window(SSIM_WINDOW, SSIM_SIGMA)


def _ssim_maps(x: np.ndarray, y: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Per-window luminance and contrast-structure maps (valid region only).

    With C3 = C2 / 2 the contrast and structure factors collapse to
    (2*cov + C2) / (var_x + var_y + C2); the luminance factor stays
    separate so multi-scale use can apply it at one scale only.
    """
    margin = SSIM_WINDOW // 2
    valid = (slice(margin, x.shape[0] - margin), slice(margin, x.shape[1] - margin))

    def smooth(img: np.ndarray) -> np.ndarray:
        return ndimage.correlate(img, _WINDOW, mode="constant")[valid]

    mu_x = smooth(x)
    mu_y = smooth(y)
    var_x = smooth(x * x) - mu_x * mu_x
    var_y = smooth(y * y) - mu_y * mu_y
    cov = smooth(x * y) - mu_x * mu_y

    lum = (2.0 * mu_x * mu_y + _C1) / (mu_x * mu_x + mu_y * mu_y + _C1)
    cs = (2.0 * cov + _C2) / (var_x + var_y + _C2)
    return lum, cs


def _check_ssim_input(x, y) -> tuple[np.ndarray, np.ndarray]:
    x, y = _as_pair(x, y)
    x, y = _to_luma(x), _to_luma(y)
    if min(x.shape) < SSIM_WINDOW:
        raise TooSmall(f"images must be at least {SSIM_WINDOW} pixels per side, got {x.shape}")
    return x, y


def ssim(x, y) -> float:
    """Structural similarity over sliding 11x11 Gaussian windows.

    Mean of the luminance * contrast-structure product over all fully
    contained windows. Identical images score exactly 1.0.
    """
    x, y = _check_ssim_input(x, y)
    lum, cs = _ssim_maps(x, y)
    return float(np.mean(lum * cs))


def _downsample(img: np.ndarray) -> np.ndarray:
    h2, w2 = img.shape[0] // 2, img.shape[1] // 2
    img = img[: h2 * 2, : w2 * 2]
    return img.reshape(h2, 2, w2, 2).mean(axis=(1, 3))


def _scales_that_fit(h: int, w: int) -> int:
    scales = 0
    while scales < len(MS_SSIM_WEIGHTS) and min(h, w) >= SSIM_WINDOW:
        scales += 1
        h //= 2
        w //= 2
    return scales


def ms_ssim(x, y) -> float:
    """Multi-scale SSIM: contrast-structure at every scale, luminance only
    at the coarsest, combined as a weighted geometric mean.

    Scales are built by 2x2 mean downsampling. Images too small for all 5
    scales use as many as fit (renormalised weights); anything below one
    window is TooSmall. Negative factor means clamp to 0.
    """
    x, y = _check_ssim_input(x, y)
    n_scales = _scales_that_fit(*x.shape)
    weights = np.array(MS_SSIM_WEIGHTS[:n_scales])
    if n_scales < len(MS_SSIM_WEIGHTS):
        weights = weights / weights.sum()

    value = 1.0
    for level in range(n_scales):
        lum, cs = _ssim_maps(x, y)
        if level < n_scales - 1:
            factor = float(np.mean(cs))
            x, y = _downsample(x), _downsample(y)
        else:
            factor = float(np.mean(lum * cs))
        value *= max(factor, 0.0) ** weights[level]
    return float(value)


def _unit_rows(patches, side: str) -> np.ndarray:
    p = np.asarray(patches, dtype=np.float64)
    if p.ndim != 2:
        raise ValueError(f"{side} patches must be a 2-D (count, dim) array, got {p.shape}")
    if p.shape[0] == 0:
        raise EmptySet(f"{side} patch set is empty")
    norms = np.linalg.norm(p, axis=1)
    if np.any(norms == 0.0):
        raise ZeroVector(f"{side} patch set contains a zero row")
    return p / norms[:, None]


def vit_score(reference, candidate) -> float:
    """Harmonic mean of best-match patch cosines in both directions.

    Rows are unit-normalised; negative cosines clamp to 0, so the result
    lies in [0, 1]. Two sets with no positively aligned pair score 0.
    """
    ref = _unit_rows(reference, "reference")
    cand = _unit_rows(candidate, "candidate")
    if ref.shape[1] != cand.shape[1]:
        raise DimensionMismatch(
            f"patch dimensions differ: {ref.shape[1]} vs {cand.shape[1]}"
        )
    sim = np.clip(ref @ cand.T, 0.0, 1.0)
    recall = float(sim.max(axis=1).mean())
    precision = float(sim.max(axis=0).mean())
    if recall + precision == 0.0:
        return 0.0
    return 2.0 * recall * precision / (recall + precision)
