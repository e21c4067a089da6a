"""Run-length codec for binary masks, COCO counts-string compatible.

Runs are taken over the column-major flattening of the mask and always
start with the count of zeros. The string packs each count in 5-bit
chunks (6th bit marks continuation) shifted into printable ASCII, with
counts from index 3 on stored as deltas against the count two back.
"""

from __future__ import annotations

import numpy as np

from ..errors import CorruptFile

_CHAR_BASE = 48


def mask_to_counts(mask: np.ndarray) -> list[int]:
    m = np.asarray(mask)
    if m.ndim != 2:
        raise ValueError(f"mask must be 2-D, got shape {m.shape}")
    flat = m.astype(bool).flatten(order="F")
    counts: list[int] = []
    current = False  # runs start with zeros; an initial 1-run gets a 0 count
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


def counts_to_mask(counts: list[int], height: int, width: int) -> np.ndarray:
    if any(c < 0 for c in counts):
        raise CorruptFile("negative run length in mask encoding")
    if sum(counts) != height * width:
        raise CorruptFile(
            f"mask runs cover {sum(counts)} pixels, image has {height * width}"
        )
    flat = np.zeros(height * width, dtype=bool)
    pos = 0
    value = False
    for run in counts:
        if value:
            flat[pos : pos + run] = True
        pos += run
        value = not value
    return flat.reshape((height, width), order="F")


def encode_counts(counts: list[int]) -> str:
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


def decode_counts(data: str) -> list[int]:
    counts: list[int] = []
    pos = 0
    n = len(data)
    while pos < n:
        x = 0
        shift = 0
        more = True
        while more:
            if pos >= n:
                raise CorruptFile("truncated mask encoding")
            c = ord(data[pos]) - _CHAR_BASE
            if not (0 <= c < 64):
                raise CorruptFile(f"invalid character {data[pos]!r} in mask encoding")
            x |= (c & 0x1F) << shift
            more = bool(c & 0x20)
            pos += 1
            shift += 5
            if not more and (c & 0x10):
                x |= -1 << shift
        if len(counts) > 2:
            x += counts[-2]
        counts.append(x)
    return counts


def encode_mask(mask: np.ndarray) -> str:
    return encode_counts(mask_to_counts(mask))


def decode_mask(data: str, height: int, width: int) -> np.ndarray:
    return counts_to_mask(decode_counts(data), height, width)
