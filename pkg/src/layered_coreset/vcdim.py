"""Range spaces of metric balls at desk scale.

A range is ``R(S, r) = {p : min_{c in S} dist(p, c) >= r}`` for a center
set ``S`` of at most ``k_fold`` centers. Centers come from the point set,
optionally augmented (Euclidean only) with a grid of synthetic centers.
Traces on a subset ``Y`` are bitmasks: bit ``t`` stands for ``Y[t]``.
"""
import itertools
import math
from dataclasses import dataclass

import numpy as np

from . import _core

MAX_SUBSET = 20


class BallRangeSpace:
    """Ranges induced by (k-fold intersections of) metric balls over a point set."""

    def __init__(self, ps, k_fold=1, center_grid=0, grid_margin=1.0):
        if k_fold < 1:
            raise ValueError("k_fold must be at least 1")
        self.ps = ps
        self.k_fold = int(k_fold)
        backend = ps.backend
        rows = backend.rows(np.arange(ps.n)) if ps.n else np.empty((0, 0))
        if center_grid:
            if backend.kind != "euclidean":
                raise ValueError("synthetic center grids need a Euclidean backend")
            rows = np.vstack([rows, _grid_rows(backend.coords, int(center_grid), grid_margin)])
        # center_rows[c, p]: distance from candidate center c to point p
        self.center_rows = rows
        self._set_rows = None

    @property
    def n(self):
        return self.ps.n

    @property
    def n_centers(self):
        return self.center_rows.shape[0]

    def set_rows(self):
        """Distances from every center set of size <= k_fold to every point."""
        if self._set_rows is None:
            blocks = [self.center_rows]
            for size in range(2, self.k_fold + 1):
                combos = list(itertools.combinations(range(self.n_centers), size))
                if combos:
                    blocks.append(np.array([self.center_rows[list(c)].min(axis=0) for c in combos]))
            self._set_rows = np.vstack(blocks) if blocks else np.empty((0, self.n))
        return self._set_rows


def _grid_rows(coords, per_axis, margin):
    lo, hi = coords.min(axis=0), coords.max(axis=0)
    span = np.where(hi > lo, hi - lo, 1.0)
    axes = [np.linspace(a - margin * s, b + margin * s, per_axis) for a, b, s in zip(lo, hi, span)]
    grid = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, coords.shape[1])
    diff = grid[:, None, :] - coords[None, :, :]
    sq = diff[..., 0] * diff[..., 0]
    for t in range(1, coords.shape[1]):
        sq += diff[..., t] * diff[..., t]
    return np.sqrt(sq)


def _check_subset(rs, subset):
    subset = np.asarray(list(subset), dtype=np.int64)
    if subset.size > MAX_SUBSET:
        raise ValueError(f"subsets are limited to {MAX_SUBSET} points")
    if subset.size and (subset.min() < 0 or subset.max() >= rs.n):
        raise IndexError("subset index out of range")
    return subset


def enumerate_ranges(rs, subset):
    """Exact set of traces ``{R & Y}`` as a sorted array of bitmasks."""
    subset = _check_subset(rs, subset)
    if subset.size == 0:
        return np.zeros(1, dtype=np.uint64)
    return _core.range_traces(np.ascontiguousarray(rs.set_rows()[:, subset]))


def is_shattered(rs, subset):
    subset = _check_subset(rs, subset)
    return len(enumerate_ranges(rs, subset)) == 2 ** len(subset)


def count_full_traces(rs):
    """Number of distinct ranges restricted to the whole point set (n <= 20)."""
    return len(enumerate_ranges(rs, range(rs.n)))


def sauer_shelah_bound(n, d):
    return sum(math.comb(n, i) for i in range(d + 1))


@dataclass
class VCEstimate:
    d_hat: int
    exhaustive: bool
    witness_subset: list
    trace_counts_by_size: dict

    def to_dict(self):
        return {
            "d_hat": self.d_hat,
            "exhaustive": self.exhaustive,
            "witness_subset": self.witness_subset,
            "trace_counts_by_size": {str(k): v for k, v in self.trace_counts_by_size.items()},
        }


def estimate_vc(rs, max_d=None, budget=10**5, seed=0):
    """Largest ``d <= max_d`` for which a shattered ``d``-subset is found.

    Sizes are tried in increasing order. A size is searched exhaustively when
    ``C(n, d) <= budget`` (the lexicographically smallest witness is kept),
    otherwise over ``budget`` random subsets. The search stops at the first
    size with no shattered subset, since supersets of unshattered sets are
    never shattered. ``exhaustive`` is true when every size examined,
    including the failing one, was searched completely.
    """
    n = rs.n
    if max_d is None:
        max_d = min(n, MAX_SUBSET)
    max_d = min(max_d, n, MAX_SUBSET)
    if n == 0 or max_d == 0:
        return VCEstimate(0, True, [], {})
    rng = np.random.default_rng(seed)
    d_hat, witness, exhaustive, counts = 0, [], True, {}
    for d in range(1, max_d + 1):
        full = math.comb(n, d) <= budget
        if full:
            candidates = itertools.combinations(range(n), d)
        else:
            exhaustive = False
            candidates = (tuple(sorted(rng.choice(n, size=d, replace=False).tolist())) for _ in range(budget))
        found, best_count = None, 0
        for combo in candidates:
            traces = len(enumerate_ranges(rs, combo))
            best_count = max(best_count, traces)
            if traces == 2**d:
                found = list(combo)
                break
        counts[d] = best_count
        if found is None:
            break
        d_hat, witness = d, found
    return VCEstimate(d_hat, exhaustive, witness, counts)
