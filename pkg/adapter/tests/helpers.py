"""Shared test utilities: synthetic scenes and scoring-engine subprocess calls."""

from __future__ import annotations

import json
import subprocess
import sys
from pathlib import Path

import numpy as np
from PIL import Image

PALETTE = (
    (220, 40, 40),
    (50, 80, 220),
    (60, 180, 75),
    (240, 220, 60),
    (150, 60, 180),
    (240, 150, 40),
    (70, 200, 200),
    (240, 150, 180),
    (140, 90, 50),
    (128, 128, 128),
)


def draw_scene(seed: int, size: int = 96) -> np.ndarray:
    """A white canvas with two to four solid colored rectangles."""
    rng = np.random.default_rng(seed)
    img = np.full((size, size, 3), 255, dtype=np.uint8)
    count = int(rng.integers(2, 5))
    colors = rng.permutation(len(PALETTE))[:count]
    for ci in colors:
        w = int(rng.integers(14, 34))
        h = int(rng.integers(14, 34))
        x = int(rng.integers(2, size - 2 - w))
        y = int(rng.integers(2, size - 2 - h))
        img[y : y + h, x : x + w] = PALETTE[ci]
    return img


def reencode(pixels: np.ndarray) -> np.ndarray:
    """Lossy round trip: downscale to 75 percent and back, bilinear."""
    h, w = pixels.shape[:2]
    img = Image.fromarray(pixels)
    small = img.resize((int(w * 0.75), int(h * 0.75)), Image.BILINEAR)
    return np.asarray(small.resize((w, h), Image.BILINEAR))


def save_png(pixels: np.ndarray, path: Path) -> Path:
    Image.fromarray(pixels).save(path)
    return path


def run_sess(*args: str) -> subprocess.CompletedProcess:
    """Invoke the scoring engine's CLI in a subprocess."""
    return subprocess.run(
        [sys.executable, "-m", "sess.cli", *args], capture_output=True, text=True
    )


def sess_score(ref: Path | str, cand: Path | str, *extra: str) -> dict:
    """Score two graph files; returns the parsed JSON payload."""
    result = run_sess("score", "--ref", str(ref), "--cand", str(cand), *extra)
    if result.returncode != 0:
        raise AssertionError(f"sess score failed ({result.returncode}): {result.stderr}")
    return json.loads(result.stdout)
