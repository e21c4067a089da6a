"""File formats: graph/table JSON, manifests, rasters, embeddings, DOT."""

from .dot import matching_to_dot
from .embeddings import load_embedding_matrix, load_patches, save_embedding_matrix
from .graphfile import (
    SCHEMA_VERSION,
    canonical_dumps,
    load_graph_file,
    load_relation_table,
    parse_graph,
    parse_relation_table,
    save_graph_file,
    save_relation_table,
)
from .manifest import ManifestRow, load_manifest
from .raster import Raster, decode_raster, encode_pgm, encode_ppm
from .rle import decode_mask, encode_mask

__all__ = [
    "ManifestRow",
    "Raster",
    "SCHEMA_VERSION",
    "canonical_dumps",
    "decode_mask",
    "decode_raster",
    "encode_mask",
    "encode_pgm",
    "encode_ppm",
    "load_embedding_matrix",
    "load_graph_file",
    "load_manifest",
    "load_patches",
    "load_relation_table",
    "matching_to_dot",
    "parse_graph",
    "parse_relation_table",
    "save_embedding_matrix",
    "save_graph_file",
    "save_relation_table",
]
