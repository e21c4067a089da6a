"""Exception hierarchy for the exporter.

Everything raised deliberately derives from AdapterError so callers can
catch one type at the boundary. ModelLoadError covers missing model
dependencies, checkpoints, or devices; InferenceError covers failures
while processing an input image; ConfigError covers bad configuration
files or values.
"""

from __future__ import annotations


class AdapterError(Exception):
    """Base class for all errors raised by this package on purpose."""


class ConfigError(AdapterError):
    """Configuration file or value is malformed or out of range."""


class ModelLoadError(AdapterError):
    """A model backend could not be loaded (missing package, checkpoint, device)."""


class InferenceError(AdapterError):
    """An input image could not be read or processed."""
