"""Batch manifests: one JSON object per line, one comparison per row.

Required per line: ref_graph, cand_graph, and a condition object with a
name and numeric value (e.g. a compression setting). Optional: raster and
patch-embedding paths for the pixel/patch metrics. Relative paths resolve
against the manifest's directory. A structurally broken line fails the
whole manifest; problems with the files a row points at surface later,
when the row is evaluated.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

from ..errors import CorruptFile

_ROW_FIELDS = {
    "ref_graph",
    "cand_graph",
    "condition",
    "ref_raster",
    "cand_raster",
    "ref_patches",
    "cand_patches",
}
_CONDITION_FIELDS = {"name", "value"}


@dataclass(frozen=True, slots=True)
class ManifestRow:
    ref_graph: Path
    cand_graph: Path
    condition_name: str
    condition_value: float
    ref_raster: Optional[Path] = None
    cand_raster: Optional[Path] = None
    ref_patches: Optional[Path] = None
    cand_patches: Optional[Path] = None


def _path_field(obj: dict, field: str, base: Path, where: str, required: bool) -> Optional[Path]:
    value = obj.get(field)
    if value is None:
        if required:
            raise CorruptFile(f"{where}: missing field '{field}'")
        return None
    if not isinstance(value, str) or not value:
        raise CorruptFile(f"{where}.{field}: expected a non-empty path string")
    path = Path(value)
    return path if path.is_absolute() else base / path


def load_manifest(path: Path | str, strict: bool = False) -> list[ManifestRow]:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as e:
        raise CorruptFile(f"{path}: cannot read: {e.strerror or e}") from e
    base = path.parent
    rows: list[ManifestRow] = []
    lines = text.split("\n")
    if lines and lines[-1] == "":
        lines.pop()  # trailing newline, not an empty row
    for lineno, line in enumerate(lines, start=1):
        where = f"{path}:{lineno}"
        if not line.strip():
            raise CorruptFile(f"{where}: empty line (one JSON object per line)")
        try:
            obj = json.loads(line)
        except json.JSONDecodeError as e:
            raise CorruptFile(f"{where}: malformed JSON at column {e.colno}: {e.msg}") from e
        if not isinstance(obj, dict):
            raise CorruptFile(f"{where}: expected a JSON object")
        if strict:
            unknown = sorted(set(obj) - _ROW_FIELDS)
            if unknown:
                raise CorruptFile(f"{where}: unknown field(s) {', '.join(unknown)}")
        condition = obj.get("condition")
        if not isinstance(condition, dict):
            raise CorruptFile(f"{where}: missing or malformed 'condition' object")
        if strict:
            unknown = sorted(set(condition) - _CONDITION_FIELDS)
            if unknown:
                raise CorruptFile(f"{where}.condition: unknown field(s) {', '.join(unknown)}")
        name = condition.get("name")
        value = condition.get("value")
        if not isinstance(name, str) or not name:
            raise CorruptFile(f"{where}.condition.name: expected a non-empty string")
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise CorruptFile(f"{where}.condition.value: expected a number")
        rows.append(
            ManifestRow(
                ref_graph=_path_field(obj, "ref_graph", base, where, required=True),
                cand_graph=_path_field(obj, "cand_graph", base, where, required=True),
                condition_name=name,
                condition_value=float(value),
                ref_raster=_path_field(obj, "ref_raster", base, where, required=False),
                cand_raster=_path_field(obj, "cand_raster", base, where, required=False),
                ref_patches=_path_field(obj, "ref_patches", base, where, required=False),
                cand_patches=_path_field(obj, "cand_patches", base, where, required=False),
            )
        )
    return rows
