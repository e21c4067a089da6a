"""Offline exporter of scene-graph, relation-table, and embedding files.

Images go in, interchange files come out: a graph JSON per image (object
nodes with masks, embeddings, and salience masses, plus directed relation
edges), optional patch-embedding sidecars, and pairwise relation
similarity tables over a label vocabulary. The classical backend is pure
deterministic array arithmetic; the neural backend is a guarded stub
that reports exactly which model prerequisite is missing.
"""

from .config import AdapterConfig, BACKEND_VERSION, load_config, override, parse_config
from .errors import AdapterError, ConfigError, InferenceError, ModelLoadError
from .export import (
    build_graph_payload,
    build_patch_matrix,
    build_table_payload,
    export_graph,
    export_patch_embeddings,
    export_relation_table,
    load_image,
)
from .vocab import PSG_RELATIONS

__version__ = "0.1.0"

__all__ = [
    "AdapterConfig",
    "AdapterError",
    "BACKEND_VERSION",
    "ConfigError",
    "InferenceError",
    "ModelLoadError",
    "PSG_RELATIONS",
    "build_graph_payload",
    "build_patch_matrix",
    "build_table_payload",
    "export_graph",
    "export_patch_embeddings",
    "export_relation_table",
    "load_config",
    "load_image",
    "override",
    "parse_config",
    "__version__",
]
