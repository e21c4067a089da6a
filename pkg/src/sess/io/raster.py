"""Raster decoding: 8-bit grayscale or RGB from PNG and binary PPM/PGM.

Alpha channels are stripped (no compositing semantics here), palette
images expand to RGB, and anything deeper than 8 bits per sample is
rejected. Format detection goes by file content, not extension.
"""

from __future__ import annotations

import io as _stdio
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from PIL import Image, UnidentifiedImageError

from ..errors import CorruptFile, UnsupportedFormat

_PNG_MAGIC = b"\x89PNG\r\n\x1a\n"


@dataclass(frozen=True, slots=True)
class Raster:
    """Decoded image samples: uint8, (h, w) or (h, w, 3)."""

    width: int
    height: int
    channels: int
    samples: np.ndarray

    def __post_init__(self) -> None:
        self.samples.setflags(write=False)


def _from_pillow(image: Image.Image, path: Path) -> Raster:
    mode = image.mode
    if mode in ("LA",):
        image = image.convert("LA")
        arr = np.asarray(image)[:, :, 0]
    elif mode == "RGBA":
        arr = np.asarray(image)[:, :, :3]
    elif mode == "P":
        arr = np.asarray(image.convert("RGB"))
    elif mode in ("L", "RGB"):
        arr = np.asarray(image)
    else:
        raise UnsupportedFormat(f"{path}: unsupported sample layout '{mode}' (8-bit gray/RGB only)")
    arr = np.ascontiguousarray(arr, dtype=np.uint8)
    channels = 1 if arr.ndim == 2 else 3
    return Raster(width=arr.shape[1], height=arr.shape[0], channels=channels, samples=arr)


def decode_raster(path: Path | str) -> Raster:
    """Decode a PNG or binary PPM/PGM file into 8-bit samples.

    UnsupportedFormat for anything else (by magic bytes, not extension);
    CorruptFile when the container is right but the data is broken.
    """
    path = Path(path)
    try:
        head = path.open("rb").read(8)
    except OSError as e:
        raise CorruptFile(f"{path}: cannot read: {e.strerror or e}") from e
    if head.startswith(_PNG_MAGIC):
        kind = "png"
    elif head[:2] in (b"P5", b"P6"):
        kind = "pnm"
    else:
        raise UnsupportedFormat(f"{path}: not a PNG or binary PPM/PGM file")

    try:
        with Image.open(path) as im:
            im.load()
            return _from_pillow(im, path)
    except UnsupportedFormat:
        raise
    except (UnidentifiedImageError, OSError, SyntaxError, ValueError) as e:
        raise CorruptFile(f"{path}: broken {kind} data: {e}") from e


def encode_pgm(samples: np.ndarray) -> bytes:
    """Binary PGM bytes for an (h, w) uint8 array; used by fixtures."""
    arr = np.ascontiguousarray(samples, dtype=np.uint8)
    if arr.ndim != 2:
        raise ValueError(f"PGM is single-channel, got shape {arr.shape}")
    header = f"P5\n{arr.shape[1]} {arr.shape[0]}\n255\n".encode("ascii")
    return header + arr.tobytes()


def encode_ppm(samples: np.ndarray) -> bytes:
    """Binary PPM bytes for an (h, w, 3) uint8 array; used by fixtures."""
    arr = np.ascontiguousarray(samples, dtype=np.uint8)
    if arr.ndim != 3 or arr.shape[2] != 3:
        raise ValueError(f"PPM is three-channel, got shape {arr.shape}")
    header = f"P6\n{arr.shape[1]} {arr.shape[0]}\n255\n".encode("ascii")
    return header + arr.tobytes()
