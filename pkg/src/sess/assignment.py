"""Maximum-weight bipartite matching with a deterministic tie-break.

`km_max_matching` is the production solver; `brute_force_matching` is an
independent exhaustive oracle for small problems. Both accept rectangular
matrices (conceptually zero-padded to square, with padded pairs dropped
from the result) and both resolve ties the same way: among all optimal
matchings, the lexicographically smallest sorted pair list wins.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import permutations

import numpy as np
from scipy.optimize import linear_sum_assignment

from .errors import NegativeEntry, NonFiniteEntry, TooLarge

# Ties between distinct optimal matchings are exact in the inputs we care
# about; this only absorbs float summation noise. Scaled by the largest
# entry so matrices of tiny magnitude keep their real optima.
_TIE_EPS = 1e-9


def _tie_tolerance(w: np.ndarray) -> float:
    return _TIE_EPS * float(w.max()) if w.size else 0.0

_BRUTE_FORCE_CAP = 8


@dataclass(frozen=True, slots=True)
class Matching:
    """An injective row-to-column assignment and its total weight."""

    pairs: tuple[tuple[int, int], ...]
    value: float


def _checked(weights) -> np.ndarray:
    w = np.asarray(weights, dtype=np.float64)
    if w.ndim == 1 and w.size == 0:
        w = w.reshape(0, 0)
    if w.ndim != 2:
        raise ValueError(f"weight matrix must be 2-D, got shape {w.shape}")
    if w.size:
        if not np.all(np.isfinite(w)):
            raise NonFiniteEntry("weight matrix contains NaN or infinite entries")
        if w.min() < 0.0:
            raise NegativeEntry("weight matrix contains negative entries")
    return w


def _solve_value(w: np.ndarray) -> float:
    """Optimal assignment value of a non-empty validated matrix."""
    if min(w.shape) == 0:
        return 0.0
    rows, cols = linear_sum_assignment(w, maximize=True)
    return float(w[rows, cols].sum())


def matching_value(weights) -> float:
    """Value-only fast path: enumerates tiny problems, delegates the rest.

    Same contract as `km_max_matching(...).value`; used in inner loops
    where the pair list is not needed.
    """
    w = _checked(weights)
    n, m = w.shape
    k = min(n, m)
    if k == 0:
        return 0.0
    if k == 1:
        return float(w.max())
    count = math.perm(max(n, m), k)
    if count > 120:
        return _solve_value(w)
    rows = w.tolist()
    if n <= m:
        return max(sum(rows[i][c] for i, c in enumerate(p)) for p in permutations(range(m), n))
    return max(sum(rows[r][j] for j, r in enumerate(p)) for p in permutations(range(n), m))


def km_max_matching(weights) -> Matching:
    """Maximum-weight assignment over all injective row-to-column maps.

    Entries must be finite and non-negative (NonFiniteEntry /
    NegativeEntry otherwise). The result always holds min(n, m) pairs,
    sorted by row, and among equal-value optima it is the
    lexicographically smallest pair list. The value equals the sum of
    the selected entries.
    """
    w = _checked(weights)
    n, m = w.shape
    k = min(n, m)
    if k == 0:
        return Matching(pairs=(), value=0.0)

    target = _solve_value(w)
    tol = _tie_tolerance(w)

    # Fix pairs one at a time: the smallest (row, col) that still admits
    # an optimal completion is the next pair of the lexicographically
    # smallest optimal matching.
    rows = list(range(n))
    cols = list(range(m))
    pairs: list[tuple[int, int]] = []
    acc = 0.0
    for _ in range(k):
        chosen = None
        for r in rows:
            for c in cols:
                rest_r = [i for i in rows if i != r]
                rest_c = [j for j in cols if j != c]
                rest = _solve_value(w[np.ix_(rest_r, rest_c)])
                if acc + w[r, c] + rest >= target - tol:
                    chosen = (r, c)
                    break
            if chosen is not None:
                break
        assert chosen is not None, "optimal completion vanished during refinement"
        pairs.append(chosen)
        acc += w[chosen]
        rows.remove(chosen[0])
        cols.remove(chosen[1])

    value = math.fsum(w[r, c] for r, c in pairs)
    return Matching(pairs=tuple(pairs), value=value)


def brute_force_matching(weights) -> Matching:
    """Exhaustive oracle with the same contract as `km_max_matching`.

    Enumerates every injective assignment; refuses problems with
    min(n, m) > 8 (TooLarge).
    """
    w = _checked(weights)
    n, m = w.shape
    k = min(n, m)
    if k > _BRUTE_FORCE_CAP:
        raise TooLarge(f"brute force capped at min(n, m) <= {_BRUTE_FORCE_CAP}, got {k}")
    if k == 0:
        return Matching(pairs=(), value=0.0)

    tol = _tie_tolerance(w)
    rows = w.tolist()
    best_value = -1.0
    best_pairs: tuple[tuple[int, int], ...] = ()
    if n <= m:
        candidates = (tuple((i, c) for i, c in enumerate(p)) for p in permutations(range(m), n))
    else:
        candidates = (
            tuple(sorted((r, j) for j, r in enumerate(p))) for p in permutations(range(n), m)
        )
    for pairs in candidates:
        value = sum(rows[r][c] for r, c in pairs)
        if value > best_value + tol:
            best_value = value
            best_pairs = pairs
        elif value > best_value - tol and pairs < best_pairs:
            best_value = max(best_value, value)
            best_pairs = pairs

    value = math.fsum(rows[r][c] for r, c in best_pairs)
    return Matching(pairs=best_pairs, value=value)
