"""Neural backend: SAM segmentation, PSG relation prediction, CLIP encoders.

This build ships the classical backend as the working path; the neural
backend is a guarded stub that fails fast with an actionable message at
whichever requirement is missing first: config fields, the torch
runtime, model packages, or checkpoint files. Nothing here is imported
unless the config selects backend "neural", so the classical path has no
torch dependency.
"""

from __future__ import annotations

from pathlib import Path

from .config import AdapterConfig
from .errors import ModelLoadError


def load_neural_backend(config: AdapterConfig) -> None:
    """Validate neural prerequisites; raises ModelLoadError on the first gap."""
    if config.sam_checkpoint is None:
        raise ModelLoadError(
            "neural backend needs sam_checkpoint in the config (path to SAM weights)"
        )
    if config.clip_model is None:
        raise ModelLoadError(
            "neural backend needs clip_model in the config (CLIP identifier or path)"
        )
    try:
        import torch  # noqa: F401
    except ImportError as e:
        raise ModelLoadError(
            "neural backend requires the torch package, which is not installed"
        ) from e
    if not Path(config.sam_checkpoint).is_file():
        raise ModelLoadError(f"SAM checkpoint not found: {config.sam_checkpoint}")
    missing = []
    for module in ("segment_anything", "open_clip"):
        try:
            __import__(module)
        except ImportError:
            missing.append(module)
    if missing:
        raise ModelLoadError(
            "neural backend requires missing package(s): " + ", ".join(missing)
        )
    raise ModelLoadError(
        "neural model integration is not bundled in this build; "
        "use backend 'classical' or install a build with model support"
    )
