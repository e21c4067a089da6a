"""Command-line surface: score, batch, curve, tune, validate.

Exit codes: 0 success, 2 unreadable or invalid input, 3 dimension
mismatch between the two sides, 4 no data to aggregate. The relation
table defaults to the file named by SESS_RELATION_TABLE, if set.
"""

from __future__ import annotations

import argparse
import csv
import json
import os
import sys
from pathlib import Path
from typing import Optional

import numpy as np

from .errors import (
    CorruptFile,
    DimensionMismatch,
    SessError,
    ShapeMismatch,
)
from .io.dot import matching_to_dot
from .io.embeddings import load_patches
from .io.graphfile import load_graph_file, load_relation_table
from .io.manifest import ManifestRow, load_manifest
from .io.raster import decode_raster
from .matching import sess as compute_sess
from .metrics import mse, ms_ssim, psnr, ssim, vit_score
from .model import HyperParams, RelationSimilarityTable, SceneGraph
from .providers import SimilarityProvider, clip_score
from .tuning import SearchSpace, load_annotations, random_search

METRIC_NAMES = ("sess", "mse", "psnr", "ssim", "msssim", "clip", "vit")

_RASTER_METRICS = {"mse", "psnr", "ssim", "msssim"}

_PARAM_FIELDS = {"alpha", "beta", "gamma", "iterations", "k"}


def _info(msg: str) -> None:
    print(f"[INFO] {msg}", file=sys.stderr)


def _warn(msg: str) -> None:
    print(f"[WARN] {msg}", file=sys.stderr)


def _err(msg: str) -> None:
    print(f"[ERR] {msg}", file=sys.stderr)


def _load_params(path: Optional[str]) -> HyperParams:
    """Read a HyperParams JSON document; absent fields keep defaults."""
    if path is None:
        return HyperParams()
    try:
        obj = json.loads(Path(path).read_text(encoding="utf-8"))
    except OSError as e:
        raise CorruptFile(f"{path}: cannot read: {e.strerror or e}") from e
    except json.JSONDecodeError as e:
        raise CorruptFile(f"{path}: malformed JSON at byte {e.pos}: {e.msg}") from e
    if not isinstance(obj, dict):
        raise CorruptFile(f"{path}: expected a JSON object of parameter fields")
    unknown = sorted(set(obj) - _PARAM_FIELDS)
    if unknown:
        raise CorruptFile(f"{path}: unknown parameter field(s) {', '.join(unknown)}")
    try:
        return HyperParams(**obj)
    except (TypeError, ValueError) as e:
        raise CorruptFile(f"{path}: {e}") from e


def _load_table(path_arg: Optional[str]) -> RelationSimilarityTable:
    path = path_arg or os.environ.get("SESS_RELATION_TABLE")
    if not path:
        return RelationSimilarityTable.empty()
    return load_relation_table(path)


def _parse_metrics(spec: str) -> list[str]:
    names = [token.strip() for token in spec.split(",") if token.strip()]
    if not names:
        raise CorruptFile("--metrics must name at least one metric")
    for name in names:
        if name not in METRIC_NAMES:
            raise CorruptFile(
                f"unknown metric '{name}' (choose from {', '.join(METRIC_NAMES)})"
            )
    return names


def _params_payload(params: HyperParams) -> dict:
    return {
        "alpha": params.alpha,
        "beta": params.beta,
        "gamma": params.gamma,
        "iterations": params.iterations,
        "k": params.k,
    }


class _FileCache:
    """Per-run cache so repeated manifest references load once."""

    def __init__(self, strict: bool) -> None:
        self.strict = strict
        self._graphs: dict[Path, SceneGraph] = {}
        self._patches: dict[Path, np.ndarray] = {}

    def graph(self, path: Path) -> SceneGraph:
        g = self._graphs.get(path)
        if g is None:
            g = load_graph_file(path, strict=self.strict)
            self._graphs[path] = g
        return g

    def patches(self, path: Path) -> np.ndarray:
        p = self._patches.get(path)
        if p is None:
            p = load_patches(path)
            self._patches[path] = p
        return p


def _evaluate_row(
    row: ManifestRow,
    index: int,
    metrics: list[str],
    provider: SimilarityProvider,
    params: HyperParams,
    cache: _FileCache,
) -> tuple[dict[str, Optional[float]], list[str]]:
    """Compute the requested metrics for one manifest row.

    Returns (values, errors). A metric whose optional inputs are absent
    stays None with a stderr warning; a metric whose inputs fail to
    load or evaluate stays None with the failure recorded in errors.
    """
    values: dict[str, Optional[float]] = {name: None for name in metrics}
    errors: list[str] = []

    graphs: Optional[tuple[SceneGraph, SceneGraph]] = None
    if "sess" in metrics or "clip" in metrics:
        try:
            graphs = (cache.graph(row.ref_graph), cache.graph(row.cand_graph))
        except SessError as e:
            errors.append(str(e))

    if graphs is not None:
        if "sess" in metrics:
            try:
                values["sess"] = compute_sess(graphs[0], graphs[1], provider, params).sess
            except SessError as e:
                errors.append(f"sess: {e}")
        if "clip" in metrics:
            try:
                values["clip"] = clip_score(graphs[0].image_embedding, graphs[1].image_embedding)
            except SessError as e:
                errors.append(f"clip: {e}")

    wanted_rasters = [name for name in metrics if name in _RASTER_METRICS]
    if wanted_rasters:
        if row.ref_raster is None or row.cand_raster is None:
            _warn(
                f"row {index}: {', '.join(wanted_rasters)} requested but the row "
                "names no rasters; leaving blank"
            )
        else:
            try:
                a = decode_raster(row.ref_raster).samples
                b = decode_raster(row.cand_raster).samples
            except SessError as e:
                errors.append(str(e))
            else:
                for name in wanted_rasters:
                    fn = {"mse": mse, "psnr": psnr, "ssim": ssim, "msssim": ms_ssim}[name]
                    try:
                        values[name] = fn(a, b)
                    except SessError as e:
                        errors.append(f"{name}: {e}")

    if "vit" in metrics:
        if row.ref_patches is None or row.cand_patches is None:
            _warn(f"row {index}: vit requested but the row names no patch files; leaving blank")
        else:
            try:
                values["vit"] = vit_score(cache.patches(row.ref_patches), cache.patches(row.cand_patches))
            except SessError as e:
                errors.append(f"vit: {e}")

    return values, errors


def _format_cell(value: Optional[float]) -> str:
    if value is None:
        return ""
    return str(float(value))


def _cmd_score(args: argparse.Namespace) -> int:
    provider = SimilarityProvider(relation_table=_load_table(args.relations))
    params = _load_params(args.params)
    metrics = _parse_metrics(args.metrics)
    g1 = load_graph_file(args.ref, strict=args.strict)
    g2 = load_graph_file(args.cand, strict=args.strict)
    report = compute_sess(g1, g2, provider, params)

    payload: dict = {
        "sess": report.sess,
        "image_score": report.image_score,
        "graph_score": report.graph_score,
        "matching": [
            {"ref": p.node1, "cand": p.node2, "weight": p.weight, "similarity": p.similarity}
            for p in report.matching
        ],
    }

    extras = [name for name in metrics if name != "sess"]
    if extras:
        baselines: dict[str, Optional[float]] = {}
        if "clip" in extras:
            baselines["clip"] = clip_score(g1.image_embedding, g2.image_embedding)
        wanted_rasters = [name for name in extras if name in _RASTER_METRICS]
        if wanted_rasters:
            if args.ref_raster is None or args.cand_raster is None:
                _warn(f"{', '.join(wanted_rasters)} requested but rasters not given; reporting null")
                for name in wanted_rasters:
                    baselines[name] = None
            else:
                a = decode_raster(args.ref_raster).samples
                b = decode_raster(args.cand_raster).samples
                for name in wanted_rasters:
                    fn = {"mse": mse, "psnr": psnr, "ssim": ssim, "msssim": ms_ssim}[name]
                    baselines[name] = fn(a, b)
        if "vit" in extras:
            if args.ref_patches is None or args.cand_patches is None:
                _warn("vit requested but patch files not given; reporting null")
                baselines["vit"] = None
            else:
                baselines["vit"] = vit_score(load_patches(args.ref_patches), load_patches(args.cand_patches))
        payload["baselines"] = baselines

    if args.explain:
        Path(args.explain).write_text(matching_to_dot(g1, g2, report), encoding="utf-8")
        _info(f"wrote matching explanation to {args.explain}")

    print(json.dumps(payload))
    return 0


def _cmd_batch(args: argparse.Namespace) -> int:
    metrics = _parse_metrics(args.metrics)
    provider = SimilarityProvider(relation_table=_load_table(args.relations))
    params = _load_params(args.params)
    rows = load_manifest(args.manifest, strict=args.strict)
    cache = _FileCache(strict=args.strict)

    out_path = Path(args.out)
    with out_path.open("w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["condition_name", "condition_value", *metrics, "errors"])
        for index, row in enumerate(rows):
            values, errors = _evaluate_row(row, index, metrics, provider, params, cache)
            for message in errors:
                _warn(f"row {index}: {message}")
            writer.writerow(
                [
                    row.condition_name,
                    str(row.condition_value),
                    *(_format_cell(values[name]) for name in metrics),
                    "; ".join(errors),
                ]
            )
    _info(f"wrote {len(rows)} row(s) to {out_path}")
    return 0


def _cmd_curve(args: argparse.Namespace) -> int:
    metrics = [args.metric]
    provider = SimilarityProvider(relation_table=_load_table(args.relations))
    params = _load_params(args.params)
    rows = load_manifest(args.manifest, strict=args.strict)
    cache = _FileCache(strict=args.strict)

    by_condition: dict[float, list[float]] = {}
    for index, row in enumerate(rows):
        values, errors = _evaluate_row(row, index, metrics, provider, params, cache)
        for message in errors:
            _warn(f"row {index}: {message}")
        value = values[args.metric]
        if value is not None:
            by_condition.setdefault(row.condition_value, []).append(value)

    if not by_condition:
        _err(f"no data: metric '{args.metric}' produced no values")
        return 4

    out_path = Path(args.out)
    with out_path.open("w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["condition_value", "mean", "stddev", "n"])
        for condition in sorted(by_condition):
            samples = np.asarray(by_condition[condition])
            writer.writerow(
                [
                    str(condition),
                    str(float(samples.mean())),
                    str(float(samples.std())),
                    str(len(samples)),
                ]
            )
    _info(f"wrote {len(by_condition)} condition(s) to {out_path}")
    return 0


def _cmd_tune(args: argparse.Namespace) -> int:
    provider = SimilarityProvider(relation_table=_load_table(args.relations))
    dataset = load_annotations(args.dataset)
    trials = args.trials

    def progress(index, trial):
        _info(
            f"trial {index + 1}/{trials}: pearson={trial.pearson:.4f} "
            f"mae={trial.mae:.4f} iterations={trial.params.iterations}"
        )

    best, history = random_search(
        SearchSpace(), dataset, provider, trials=trials, seed=args.seed, progress=progress
    )
    payload = {
        "params": _params_payload(best.params),
        "pearson": best.pearson,
        "mae": best.mae,
        "n_pairs": best.n_pairs,
        "degenerate": best.degenerate,
        "trials": trials,
        "seed": args.seed,
    }
    Path(args.out).write_text(json.dumps(payload, indent=2) + "\n", encoding="utf-8")
    _info(f"best pearson={best.pearson:.4f} mae={best.mae:.4f}; wrote {args.out}")
    return 0


def _cmd_validate(args: argparse.Namespace) -> int:
    status = 0
    for path in args.paths:
        try:
            graph = load_graph_file(path, strict=args.strict)
        except SessError as e:
            _err(str(e))
            status = 2
        else:
            _info(f"{path}: OK ({len(graph.nodes)} node(s), {len(graph.edges)} edge(s))")
    return status


def _parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="sess",
        description="Semantic image similarity from scene graphs, with baseline metrics.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p: argparse.ArgumentParser) -> None:
        p.add_argument("--params", help="HyperParams JSON file (defaults when omitted)")
        p.add_argument("--relations", help="relation similarity table JSON (or SESS_RELATION_TABLE)")
        p.add_argument("--strict", action="store_true", help="reject unknown fields in input files")

    p = sub.add_parser("score", help="score one candidate graph against a reference")
    p.add_argument("--ref", required=True, help="reference graph JSON")
    p.add_argument("--cand", required=True, help="candidate graph JSON")
    common(p)
    p.add_argument("--metrics", default="sess", help=f"comma list from: {', '.join(METRIC_NAMES)}")
    p.add_argument("--ref-raster", help="reference image (PNG/PGM/PPM) for pixel metrics")
    p.add_argument("--cand-raster", help="candidate image for pixel metrics")
    p.add_argument("--ref-patches", help="reference patch embeddings (.emb) for vit")
    p.add_argument("--cand-patches", help="candidate patch embeddings (.emb) for vit")
    p.add_argument("--explain", help="write the final matching as a DOT graph to this path")
    p.set_defaults(func=_cmd_score)

    p = sub.add_parser("batch", help="score every manifest row into a CSV")
    p.add_argument("--manifest", required=True, help="JSON-lines manifest")
    p.add_argument("--out", required=True, help="output CSV path")
    common(p)
    p.add_argument("--metrics", default="sess", help=f"comma list from: {', '.join(METRIC_NAMES)}")
    p.set_defaults(func=_cmd_batch)

    p = sub.add_parser("curve", help="aggregate one metric over manifest conditions")
    p.add_argument("--manifest", required=True, help="JSON-lines manifest")
    p.add_argument("--metric", default="sess", choices=METRIC_NAMES, help="metric to aggregate")
    p.add_argument("--out", required=True, help="output CSV path")
    common(p)
    p.set_defaults(func=_cmd_curve)

    p = sub.add_parser("tune", help="random-search hyperparameters against annotations")
    p.add_argument("--dataset", required=True, help="annotation JSON-lines file")
    p.add_argument("--trials", type=int, default=200, help="number of random trials")
    p.add_argument("--seed", type=int, default=0, help="search seed")
    p.add_argument("--out", required=True, help="output JSON path for the best trial")
    p.add_argument("--relations", help="relation similarity table JSON (or SESS_RELATION_TABLE)")
    p.set_defaults(func=_cmd_tune)

    p = sub.add_parser("validate", help="check graph files and report problems")
    p.add_argument("paths", nargs="+", help="graph JSON files")
    p.add_argument("--strict", action="store_true", help="reject unknown fields")
    p.set_defaults(func=_cmd_validate)

    return parser


def main(argv: Optional[list[str]] = None) -> int:
    args = _parser().parse_args(argv)
    try:
        return args.func(args)
    except (DimensionMismatch, ShapeMismatch) as e:
        _err(str(e))
        return 3
    except SessError as e:
        _err(str(e))
        return 2
    except OSError as e:
        _err(str(e))
        return 2


if __name__ == "__main__":
    raise SystemExit(main())
