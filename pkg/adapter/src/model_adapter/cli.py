"""Command line exporter.

Commands:
  adapter export  --images DIR_OR_FILE --out DIR  write one graph JSON per
                  image (and a patch .emb per image with --patches)
  adapter table   --labels FILE | --psg56 --out FILE  write a relation
                  similarity table over a label vocabulary

Exit codes: 0 success, 2 bad input or configuration, 3 model backend
unavailable. Flags override config-file values; the config file itself
is optional and defaults apply when it is omitted.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .config import AdapterConfig, load_config, override
from .errors import AdapterError, ModelLoadError
from .export import export_graph, export_patch_embeddings, export_relation_table
from .vocab import PSG_RELATIONS

_IMAGE_SUFFIXES = {".png", ".pgm", ".ppm", ".jpg", ".jpeg", ".bmp"}


def _info(msg: str) -> None:
    print(f"[INFO] {msg}", file=sys.stderr)


def _err(msg: str) -> None:
    print(f"[ERR] {msg}", file=sys.stderr)


def _build_config(args: argparse.Namespace) -> AdapterConfig:
    config = load_config(args.config) if args.config else AdapterConfig()
    return override(
        config,
        backend=getattr(args, "backend", None),
        crop_policy=getattr(args, "crop_policy", None),
        relation_threshold=getattr(args, "relation_threshold", None),
    )


def _collect_images(root: Path) -> list[Path]:
    if root.is_file():
        return [root]
    if not root.is_dir():
        raise AdapterError(f"{root}: not a file or directory")
    images = sorted(
        p for p in root.iterdir() if p.is_file() and p.suffix.lower() in _IMAGE_SUFFIXES
    )
    if not images:
        raise AdapterError(f"{root}: no image files found")
    return images


def _cmd_export(args: argparse.Namespace) -> int:
    config = _build_config(args)
    images = _collect_images(Path(args.images))
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    for image in images:
        graph_path = out_dir / (image.stem + ".json")
        payload = export_graph(image, config, graph_path)
        note = f"{image.name}: {len(payload['nodes'])} node(s), {len(payload['edges'])} edge(s) -> {graph_path}"
        if args.patches:
            emb_path = out_dir / (image.stem + ".emb")
            matrix = export_patch_embeddings(image, config, emb_path)
            note += f", {matrix.shape[0]} patch(es) -> {emb_path}"
        _info(note)
    _info(f"exported {len(images)} image(s) to {out_dir}")
    return 0


def _cmd_table(args: argparse.Namespace) -> int:
    config = _build_config(args)
    if args.psg56:
        labels = list(PSG_RELATIONS)
    else:
        path = Path(args.labels)
        try:
            lines = path.read_text(encoding="utf-8").splitlines()
        except OSError as e:
            raise AdapterError(f"{path}: cannot read: {e.strerror or e}") from e
        labels = [line.strip() for line in lines if line.strip()]
    payload = export_relation_table(labels, config, args.out)
    _info(f"wrote {len(payload['labels'])}x{len(payload['labels'])} relation table to {args.out}")
    return 0


def _parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="adapter",
        description="Export scene graphs, relation tables, and patch embeddings from images.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("export", help="export one graph file per input image")
    p.add_argument("--images", required=True, help="image file or directory of images")
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument("--config", help="adapter config JSON (defaults when omitted)")
    p.add_argument("--backend", choices=("classical", "neural"), help="override config backend")
    p.add_argument(
        "--crop-policy",
        choices=("bbox-crop", "mask-zeroed-frame"),
        help="override how node pixels are presented to the encoder",
    )
    p.add_argument(
        "--relation-threshold",
        type=float,
        help="override minimum confidence for emitting an edge",
    )
    p.add_argument(
        "--patches", action="store_true", help="also write patch embeddings (.emb) per image"
    )
    p.set_defaults(func=_cmd_export)

    p = sub.add_parser("table", help="export a relation similarity table")
    group = p.add_mutually_exclusive_group(required=True)
    group.add_argument("--labels", help="text file with one relation label per line")
    group.add_argument(
        "--psg56", action="store_true", help="use the built-in 56-relation vocabulary"
    )
    p.add_argument("--out", required=True, help="output table JSON path")
    p.add_argument("--config", help="adapter config JSON (defaults when omitted)")
    p.set_defaults(func=_cmd_table)

    return parser


def main(argv: list[str] | None = None) -> int:
    args = _parser().parse_args(argv)
    try:
        return args.func(args)
    except ModelLoadError as e:
        _err(str(e))
        return 3
    except AdapterError as e:
        _err(str(e))
        return 2
    except OSError as e:
        _err(str(e))
        return 2


if __name__ == "__main__":
    raise SystemExit(main())
