"""Hyperparameter search against human-annotated similarity data.

An annotation dataset is a list of records, each pairing one original
graph with one or more candidate graphs that humans scored in [0, 1].
`evaluate_params` measures how well the engine under a given parameter
set agrees with those scores (Pearson correlation, mean absolute
error); `random_search` draws parameter sets from a seeded generator
and keeps the best.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from .errors import CorruptFile, InsufficientPairs, MissingGraphFile
from .io.graphfile import load_graph_file
from .matching import sess
from .model import HyperParams, SceneGraph
from .providers import SimilarityProvider


@dataclass(frozen=True, slots=True)
class AnnotationCandidate:
    """One candidate graph plus the human similarity score against the original."""

    graph: Path
    human_score: float

    def __post_init__(self) -> None:
        if not (0.0 <= self.human_score <= 1.0):
            raise ValueError(f"human_score must lie in [0, 1], got {self.human_score}")


@dataclass(frozen=True, slots=True)
class AnnotationRecord:
    """An original graph and the human-scored candidates shown beside it."""

    original: Path
    candidates: tuple[AnnotationCandidate, ...]

    def __post_init__(self) -> None:
        if not self.candidates:
            raise ValueError("record needs at least one candidate")


@dataclass(frozen=True, slots=True)
class TrialResult:
    """Agreement of one parameter set with the human scores.

    `degenerate` marks a trial whose correlation was undefined (zero
    variance on either side); pearson is recorded as 0 in that case.
    """

    params: HyperParams
    pearson: float
    mae: float
    n_pairs: int
    degenerate: bool = False


@dataclass(frozen=True, slots=True)
class SearchSpace:
    """Sampling ranges for random search, inclusive at both ends."""

    alpha: tuple[float, float] = (0.0, 1.0)
    beta: tuple[float, float] = (0.0, 1.0)
    gamma: tuple[float, float] = (0.0, 1.0)
    iterations: tuple[int, int] = (0, 12)
    k: tuple[float, float] = (1.0, 4.0)

    def __post_init__(self) -> None:
        for name in ("alpha", "beta", "gamma"):
            lo, hi = getattr(self, name)
            if not (0.0 <= lo <= hi <= 1.0):
                raise ValueError(f"{name} range must satisfy 0 <= lo <= hi <= 1, got {(lo, hi)}")
        lo, hi = self.iterations
        if not (isinstance(lo, int) and isinstance(hi, int) and 0 <= lo <= hi):
            raise ValueError(f"iterations range must be non-negative integers, got {(lo, hi)}")
        lo, hi = self.k
        if not (1.0 <= lo <= hi):
            raise ValueError(f"k range must satisfy 1 <= lo <= hi, got {(lo, hi)}")


def load_annotations(path: Path | str) -> list[AnnotationRecord]:
    """Parse an annotation dataset: one JSON record per line.

    Each line is {"original": path, "candidates": [{"graph": path,
    "human_score": s}, ...]}. Relative paths resolve against the
    dataset file's directory.
    """
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as e:
        raise CorruptFile(f"{path}: cannot read: {e.strerror or e}") from e
    base = path.parent
    records: list[AnnotationRecord] = []
    lines = text.split("\n")
    if lines and lines[-1] == "":
        lines.pop()
    for lineno, line in enumerate(lines, start=1):
        where = f"{path}:{lineno}"
        if not line.strip():
            raise CorruptFile(f"{where}: empty line (one JSON record per line)")
        try:
            obj = json.loads(line)
        except json.JSONDecodeError as e:
            raise CorruptFile(f"{where}: malformed JSON at column {e.colno}: {e.msg}") from e
        if not isinstance(obj, dict) or not isinstance(obj.get("original"), str):
            raise CorruptFile(f"{where}: expected an object with an 'original' path")
        raw_cands = obj.get("candidates")
        if not isinstance(raw_cands, list) or not raw_cands:
            raise CorruptFile(f"{where}: 'candidates' must be a non-empty list")
        cands = []
        for i, rc in enumerate(raw_cands):
            if (
                not isinstance(rc, dict)
                or not isinstance(rc.get("graph"), str)
                or not isinstance(rc.get("human_score"), (int, float))
                or isinstance(rc.get("human_score"), bool)
            ):
                raise CorruptFile(f"{where}: candidates[{i}] needs 'graph' and numeric 'human_score'")
            score = float(rc["human_score"])
            if not (0.0 <= score <= 1.0):
                raise CorruptFile(f"{where}: candidates[{i}].human_score {score} outside [0, 1]")
            cands.append(AnnotationCandidate(graph=base / rc["graph"], human_score=score))
        records.append(AnnotationRecord(original=base / obj["original"], candidates=tuple(cands)))
    return records


class _GraphCache:
    """Loads each graph file at most once across trials."""

    def __init__(self) -> None:
        self._graphs: dict[Path, SceneGraph] = {}

    def get(self, path: Path) -> SceneGraph:
        graph = self._graphs.get(path)
        if graph is None:
            if not path.is_file():
                raise MissingGraphFile(f"{path}: no such graph file")
            graph = load_graph_file(path)
            self._graphs[path] = graph
        return graph


def _pearson(xs: np.ndarray, ys: np.ndarray) -> tuple[float, bool]:
    """Pearson correlation, or (0.0, True) when either side has no variance."""
    dx = xs - xs.mean()
    dy = ys - ys.mean()
    sx = math.sqrt(float(dx @ dx))
    sy = math.sqrt(float(dy @ dy))
    if sx == 0.0 or sy == 0.0:
        return 0.0, True
    r = float(dx @ dy) / (sx * sy)
    return max(-1.0, min(1.0, r)), False


def evaluate_params(
    params: HyperParams,
    dataset: Sequence[AnnotationRecord],
    provider: SimilarityProvider,
    cache: Optional[_GraphCache] = None,
) -> TrialResult:
    """Score every (original, candidate) pair and compare with the humans.

    Raises InsufficientPairs when the dataset yields fewer than two
    pairs (correlation needs variance) and MissingGraphFile when a
    referenced path does not exist.
    """
    if cache is None:
        cache = _GraphCache()
    engine_scores: list[float] = []
    human_scores: list[float] = []
    for record in dataset:
        original = cache.get(record.original)
        for cand in record.candidates:
            candidate = cache.get(cand.graph)
            report = sess(original, candidate, provider, params)
            engine_scores.append(report.sess)
            human_scores.append(cand.human_score)
    n = len(engine_scores)
    if n < 2:
        raise InsufficientPairs(f"need at least 2 scored pairs for correlation, got {n}")
    xs = np.asarray(engine_scores)
    ys = np.asarray(human_scores)
    pearson, degenerate = _pearson(xs, ys)
    mae = float(np.abs(xs - ys).mean())
    return TrialResult(params=params, pearson=pearson, mae=mae, n_pairs=n, degenerate=degenerate)


def _draw_params(rng: np.random.Generator, space: SearchSpace) -> HyperParams:
    # Draw order is part of the reproducibility contract; keep it fixed.
    alpha = float(rng.uniform(*space.alpha))
    beta = float(rng.uniform(*space.beta))
    gamma = float(rng.uniform(*space.gamma))
    iterations = int(rng.integers(space.iterations[0], space.iterations[1] + 1))
    k = float(rng.uniform(*space.k))
    return HyperParams(alpha=alpha, beta=beta, gamma=gamma, iterations=iterations, k=k)


def random_search(
    space: SearchSpace,
    dataset: Sequence[AnnotationRecord],
    provider: SimilarityProvider,
    trials: int,
    seed: int,
    progress=None,
) -> tuple[TrialResult, list[TrialResult]]:
    """Uniform random search; returns (best, full trial history).

    Best is the highest pearson, ties broken by lower mae, then by
    earlier trial. History order and content are fully determined by
    (seed, space, dataset). `progress`, when given, is called with
    (index, trial) after each evaluation.
    """
    if trials < 1:
        raise ValueError(f"trials must be >= 1, got {trials}")
    rng = np.random.default_rng(seed)
    cache = _GraphCache()
    history: list[TrialResult] = []
    best: Optional[TrialResult] = None
    for index in range(trials):
        params = _draw_params(rng, space)
        trial = evaluate_params(params, dataset, provider, cache=cache)
        history.append(trial)
        if best is None or (trial.pearson, -trial.mae) > (best.pearson, -best.mae):
            best = trial
        if progress is not None:
            progress(index, trial)
    assert best is not None
    return best, history
