"""Exporter configuration: backend choice, crop policy, dimensions.

Every run is self-describing: the fields that shape the output (backend,
crop policy, threshold, embedding dimension) are copied into each graph
file's provenance block, so a file always records how it was produced.

The embedding dimension is constrained to g*g + 4 for an integer grid
size g >= 2, because the classical encoder lays features out as a g-by-g
intensity grid followed by three mean-color channels and one constant.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, fields, replace
from pathlib import Path
from typing import Any, Optional

from .errors import ConfigError

BACKENDS = ("classical", "neural")
DEVICES = ("cpu", "cuda")
CROP_POLICIES = ("bbox-crop", "mask-zeroed-frame")
PSG_HEADS = ("imp", "motifs", "vctree", "gpsnet")

# Bumped whenever any numeric behavior of the classical backend changes;
# byte-identical regeneration of committed fixtures is promised only for
# a fixed value of this string. It is recorded in every provenance block.
BACKEND_VERSION = "classical-1"


def grid_size(embedding_dim: int) -> int:
    """Side length of the intensity grid encoded in the first dim-4 slots."""
    g = math.isqrt(max(embedding_dim - 4, 0))
    if g < 2 or g * g + 4 != embedding_dim:
        raise ConfigError(
            f"embedding_dim must be g*g + 4 for an integer g >= 2, got {embedding_dim}"
        )
    return g


@dataclass(frozen=True, slots=True)
class AdapterConfig:
    """Knobs of one export run.

    backend             classical (deterministic, no model weights) or
                        neural (SAM plus CLIP plus a PSG second stage;
                        needs checkpoints and torch)
    device              cpu or cuda; only the neural backend cares
    crop_policy         how a node's pixels are presented to the image
                        encoder: bbox-crop cuts the bounding box out,
                        mask-zeroed-frame keeps the full frame with
                        pixels outside the mask set to black
    embedding_dim       length of node, image, and patch embeddings
    patch_grid          patch embeddings cover a patch_grid^2 tiling
    relation_threshold  minimum confidence for an edge to be emitted
    max_nodes           keep at most this many segments, largest first
    min_area_fraction   drop segments smaller than this image fraction
    min_extent          drop segments whose bounding box is thinner than
                        this many pixels on either side (suppresses
                        resampling fringes, which are a few pixels wide)
    min_fill_ratio      drop segments filling less than this fraction of
                        their own bounding box (suppresses ring-shaped
                        fragments)
    quant_levels        color quantization levels per channel
    sam_checkpoint      neural backend: path to SAM weights
    clip_model          neural backend: CLIP model identifier or path
    psg_head            neural backend: second-stage predictor choice
    """

    backend: str = "classical"
    device: str = "cpu"
    crop_policy: str = "bbox-crop"
    embedding_dim: int = 68
    patch_grid: int = 4
    relation_threshold: float = 0.3
    max_nodes: int = 12
    min_area_fraction: float = 0.002
    min_extent: int = 4
    min_fill_ratio: float = 0.25
    quant_levels: int = 4
    sam_checkpoint: Optional[str] = None
    clip_model: Optional[str] = None
    psg_head: str = "motifs"

    def __post_init__(self) -> None:
        if self.backend not in BACKENDS:
            raise ConfigError(f"backend must be one of {', '.join(BACKENDS)}, got {self.backend!r}")
        if self.device not in DEVICES:
            raise ConfigError(f"device must be one of {', '.join(DEVICES)}, got {self.device!r}")
        if self.crop_policy not in CROP_POLICIES:
            raise ConfigError(
                f"crop_policy must be one of {', '.join(CROP_POLICIES)}, got {self.crop_policy!r}"
            )
        if self.psg_head not in PSG_HEADS:
            raise ConfigError(
                f"psg_head must be one of {', '.join(PSG_HEADS)}, got {self.psg_head!r}"
            )
        grid_size(self.embedding_dim)
        if not (isinstance(self.patch_grid, int) and self.patch_grid >= 1):
            raise ConfigError(f"patch_grid must be a positive integer, got {self.patch_grid!r}")
        if not (0.0 <= self.relation_threshold <= 1.0):
            raise ConfigError(
                f"relation_threshold must lie in [0, 1], got {self.relation_threshold}"
            )
        if not (isinstance(self.max_nodes, int) and self.max_nodes >= 0):
            raise ConfigError(f"max_nodes must be a non-negative integer, got {self.max_nodes!r}")
        if not (0.0 <= self.min_area_fraction < 1.0):
            raise ConfigError(
                f"min_area_fraction must lie in [0, 1), got {self.min_area_fraction}"
            )
        if not (isinstance(self.min_extent, int) and self.min_extent >= 1):
            raise ConfigError(f"min_extent must be a positive integer, got {self.min_extent!r}")
        if not (0.0 <= self.min_fill_ratio <= 1.0):
            raise ConfigError(f"min_fill_ratio must lie in [0, 1], got {self.min_fill_ratio}")
        if not (isinstance(self.quant_levels, int) and 2 <= self.quant_levels <= 16):
            raise ConfigError(f"quant_levels must be an integer in [2, 16], got {self.quant_levels!r}")

    def provenance(self) -> dict:
        """Metadata block recorded into every exported graph."""
        entry: dict[str, Any] = {
            "generator": "model-adapter",
            "backend": self.backend,
            "backend_version": BACKEND_VERSION,
            "crop_policy": self.crop_policy,
            "embedding_dim": self.embedding_dim,
            "relation_threshold": self.relation_threshold,
        }
        if self.backend == "neural":
            entry["psg_head"] = self.psg_head
        return entry


_FIELD_TYPES = {f.name: f for f in fields(AdapterConfig)}

_INT_FIELDS = {"embedding_dim", "patch_grid", "max_nodes", "min_extent", "quant_levels"}
_FLOAT_FIELDS = {"relation_threshold", "min_area_fraction", "min_fill_ratio"}
_STR_FIELDS = {"backend", "device", "crop_policy", "psg_head"}
_OPT_STR_FIELDS = {"sam_checkpoint", "clip_model"}


def parse_config(payload: Any, where: str = "config") -> AdapterConfig:
    """Build a config from a parsed JSON object; unknown fields are errors."""
    if not isinstance(payload, dict):
        raise ConfigError(f"{where}: expected a JSON object at the top level")
    unknown = sorted(set(payload) - set(_FIELD_TYPES))
    if unknown:
        raise ConfigError(f"{where}: unknown field(s) {', '.join(unknown)}")
    kwargs: dict[str, Any] = {}
    for name, value in payload.items():
        at = f"{where}.{name}"
        if name in _INT_FIELDS:
            if isinstance(value, bool) or not isinstance(value, int):
                raise ConfigError(f"{at}: expected an integer, got {value!r}")
        elif name in _FLOAT_FIELDS:
            if isinstance(value, bool) or not isinstance(value, (int, float)):
                raise ConfigError(f"{at}: expected a number, got {value!r}")
            value = float(value)
        elif name in _STR_FIELDS:
            if not isinstance(value, str):
                raise ConfigError(f"{at}: expected a string, got {value!r}")
        elif name in _OPT_STR_FIELDS:
            if value is not None and not isinstance(value, str):
                raise ConfigError(f"{at}: expected a string or null, got {value!r}")
        kwargs[name] = value
    return AdapterConfig(**kwargs)


def load_config(path: Path | str) -> AdapterConfig:
    """Read a JSON config file; missing fields keep their defaults."""
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as e:
        raise ConfigError(f"{path}: cannot read: {e.strerror or e}") from e
    try:
        payload = json.loads(text)
    except json.JSONDecodeError as e:
        raise ConfigError(f"{path}: malformed JSON at byte offset {e.pos}: {e.msg}") from e
    return parse_config(payload, where=str(path))


def override(config: AdapterConfig, **changes: Any) -> AdapterConfig:
    """Replace fields, dropping entries whose value is None."""
    real = {k: v for k, v in changes.items() if v is not None}
    return replace(config, **real) if real else config
