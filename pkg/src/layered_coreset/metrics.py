"""Metric backends and clustering-cost evaluation.

Every backend indexes its points ``0..n-1`` and answers distance queries
between them. Costs are ``w_p * min_c dist(p, c) ** z`` summed over points.
"""
import math
import threading

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components, dijkstra

from . import _core


class MetricBackend:
    """Base class. Subclasses implement ``_row`` (distances from one point)."""

    kind = "abstract"

    def __init__(self, n):
        self.n = int(n)

    def __len__(self):
        return self.n

    def _check(self, idx):
        idx = np.asarray(idx, dtype=np.int64)
        if idx.size and (idx.min() < 0 or idx.max() >= self.n):
            raise IndexError(f"point index out of range for {self.n} points")
        return idx

    def dist(self, p, q):
        self._check([p, q])
        return float(self._row(int(p))[int(q)])

    def rows(self, sources):
        """Distances from each source to every point, shape (len(sources), n)."""
        sources = self._check(np.atleast_1d(sources))
        if sources.size == 0:
            return np.empty((0, self.n))
        return np.vstack([self._row(int(s)) for s in sources])

    def _row(self, p):
        raise NotImplementedError


class _CachedRows(MetricBackend):
    # single-source rows are expensive; cache them, fill under a lock
    def __init__(self, n):
        super().__init__(n)
        self._cache = {}
        self._lock = threading.Lock()

    def _row(self, p):
        row = self._cache.get(p)
        if row is None:
            row = self._compute_row(p)
            row.setflags(write=False)
            with self._lock:
                row = self._cache.setdefault(p, row)
        return row

    def _compute_row(self, p):
        raise NotImplementedError

    def precompute(self, sources=None):
        for s in range(self.n) if sources is None else sources:
            self._row(int(s))


class Euclidean(MetricBackend):
    kind = "euclidean"

    def __init__(self, coords):
        coords = np.asarray(coords, dtype=np.float64)
        if coords.ndim == 1:
            coords = coords[:, None]
        if coords.ndim != 2 or coords.shape[0] == 0:
            raise ValueError("coordinates must be a nonempty (n, d) array")
        super().__init__(coords.shape[0])
        self.coords = coords
        self.dim = coords.shape[1]

    def _row(self, p):
        diff = self.coords - self.coords[p]
        sq = diff[:, 0] * diff[:, 0]
        for t in range(1, self.dim):
            sq += diff[:, t] * diff[:, t]
        return np.sqrt(sq)

    def rows(self, sources):
        sources = self._check(np.atleast_1d(sources))
        diff = self.coords[None, :, :] - self.coords[sources][:, None, :]
        sq = diff[..., 0] * diff[..., 0]
        for t in range(1, self.dim):
            sq += diff[..., t] * diff[..., t]
        return np.sqrt(sq)


class ExplicitMatrix(MetricBackend):
    kind = "matrix"

    def __init__(self, matrix, check=True):
        matrix = np.asarray(matrix, dtype=np.float64)
        if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1] or matrix.shape[0] == 0:
            raise ValueError("distance matrix must be square and nonempty")
        if check:
            if not np.all(np.isfinite(matrix)) or matrix.min() < 0:
                raise ValueError("distance matrix entries must be finite and nonnegative")
            if not np.array_equal(matrix, matrix.T):
                raise ValueError("distance matrix must be symmetric")
            if np.any(np.diag(matrix) != 0):
                raise ValueError("distance matrix must have a zero diagonal")
        super().__init__(matrix.shape[0])
        self.matrix = matrix

    def _row(self, p):
        return self.matrix[p]

    def rows(self, sources):
        return self.matrix[self._check(np.atleast_1d(sources))]


class GraphShortestPath(_CachedRows):
    """Shortest-path metric of a weighted undirected connected graph."""

    kind = "graph"

    def __init__(self, edges, n=None):
        edges = np.asarray(edges, dtype=np.float64).reshape(-1, 3)
        u = edges[:, 0].astype(np.int64)
        v = edges[:, 1].astype(np.int64)
        w = edges[:, 2]
        if np.any(u != edges[:, 0]) or np.any(v != edges[:, 1]) or (len(u) and min(u.min(), v.min()) < 0):
            raise ValueError("vertex ids must be nonnegative integers")
        if np.any(~np.isfinite(w)) or np.any(w <= 0):
            raise ValueError("edge weights must be positive and finite")
        if n is None:
            n = int(max(u.max(), v.max())) + 1 if len(u) else 1
        super().__init__(n)
        # parallel edges: keep the lightest
        a, b = np.minimum(u, v), np.maximum(u, v)
        keep = a != b
        a, b, w = a[keep], b[keep], w[keep]
        order = np.lexsort((w, b, a))
        a, b, w = a[order], b[order], w[order]
        first = np.ones(len(a), dtype=bool)
        first[1:] = (a[1:] != a[:-1]) | (b[1:] != b[:-1])
        a, b, w = a[first], b[first], w[first]
        self.edges = np.column_stack([a, b, w])
        self.graph = coo_matrix((w, (a, b)), shape=(n, n)).tocsr()
        ncomp, _ = connected_components(self.graph, directed=False)
        if ncomp != 1:
            raise ValueError(f"graph is disconnected ({ncomp} components)")

    def _compute_row(self, p):
        return dijkstra(self.graph, directed=False, indices=p)

    def rows(self, sources):
        sources = self._check(np.atleast_1d(sources))
        missing = [int(s) for s in dict.fromkeys(sources.tolist()) if int(s) not in self._cache]
        if missing:
            block = dijkstra(self.graph, directed=False, indices=missing)
            with self._lock:
                for s, row in zip(missing, block):
                    row = np.ascontiguousarray(row)
                    row.setflags(write=False)
                    self._cache.setdefault(s, row)
        return np.vstack([self._cache[int(s)] for s in sources])


class _VertexSequences(_CachedRows):
    # "points" are variable-length arrays of d-dimensional vertices
    def __init__(self, items):
        items = [np.atleast_2d(np.asarray(c, dtype=np.float64)) for c in items]
        if not items:
            raise ValueError("need at least one curve or set")
        dims = {c.shape[1] for c in items}
        if len(dims) != 1:
            raise ValueError("all vertices must share one dimension")
        if any(c.shape[0] == 0 for c in items):
            raise ValueError("empty curve or set")
        super().__init__(len(items))
        self.items = items
        self.dim = dims.pop()
        self.offsets = np.zeros(len(items) + 1, dtype=np.int64)
        self.offsets[1:] = np.cumsum([c.shape[0] for c in items])
        self.flat = np.ascontiguousarray(np.vstack(items))


class DiscreteFrechet(_VertexSequences):
    kind = "frechet"

    def _compute_row(self, p):
        return _core.frechet_row(self.flat, self.offsets, p)


class Hausdorff(_VertexSequences):
    kind = "hausdorff"

    def _compute_row(self, p):
        return _core.hausdorff_row(self.flat, self.offsets, p)


def _as_curve(c):
    c = np.atleast_2d(np.asarray(c, dtype=np.float64))
    if c.shape[0] == 0 or c.size == 0:
        raise ValueError("curve or set must be nonempty")
    return c


def discrete_frechet(c1, c2):
    """Discrete Frechet distance between two polygonal curves.

    Minimum over monotone warping paths of the largest vertex distance met
    along the path, by dynamic programming over the ``|c1| x |c2|`` grid.
    """
    a, b = _as_curve(c1), _as_curve(c2)
    if a.shape[1] != b.shape[1]:
        raise ValueError("curves have different vertex dimensions")
    return _core.frechet_pair(a, b)


def hausdorff(x, y):
    """Symmetric Hausdorff distance between two finite point sets."""
    a, b = _as_curve(x), _as_curve(y)
    if a.shape[1] != b.shape[1]:
        raise ValueError("sets have different dimensions")
    return _core.hausdorff_pair(a, b)


def directed_hausdorff(x, y):
    a, b = _as_curve(x), _as_curve(y)
    if a.shape[1] != b.shape[1]:
        raise ValueError("sets have different dimensions")
    return _core.directed_hausdorff_pair(a, b)


class PointSet:
    """Indexed points with nonnegative weights over a metric backend."""

    def __init__(self, backend, weights=None):
        self.backend = backend
        n = backend.n
        if weights is None:
            weights = np.ones(n)
        weights = np.asarray(weights, dtype=np.float64)
        if weights.shape != (n,):
            raise ValueError(f"expected {n} weights, got shape {weights.shape}")
        if not np.all(np.isfinite(weights)) or weights.min() < 0:
            raise ValueError("weights must be finite and nonnegative")
        if weights.sum() <= 0:
            raise ValueError("total weight must be positive")
        self.weights = weights
        self.weights.setflags(write=False)

    @property
    def n(self):
        return self.backend.n

    def __len__(self):
        return self.backend.n

    @property
    def total_weight(self):
        return float(math.fsum(self.weights))


def as_solution(centers, n=None):
    """Validate a candidate solution and return it as an int64 index array."""
    centers = np.asarray(centers, dtype=np.int64).ravel()
    if centers.size == 0:
        raise ValueError("a solution needs at least one center")
    if len(np.unique(centers)) != centers.size:
        raise ValueError("duplicate centers in solution")
    if n is not None and (centers.min() < 0 or centers.max() >= n):
        raise IndexError("center index out of range")
    return centers


def point_costs(ps, centers, z, subset=None):
    """Per-point cost ``min_c dist(p, c) ** z`` (unweighted), for all points or ``subset``."""
    centers = as_solution(centers, ps.n)
    d = ps.backend.rows(centers).min(axis=0)
    if subset is not None:
        d = d[np.asarray(subset, dtype=np.int64)]
    return d ** z


def point_cost(ps, p, centers, z):
    if not 0 <= int(p) < ps.n:
        raise IndexError("point index out of range")
    return float(point_costs(ps, centers, z, subset=[int(p)])[0])


def set_cost(ps, centers, z, subset=None):
    """Weighted cost of the point set (or an index subset) for a solution.

    Uses compensated summation so relative errors near 1e-2 are not blurred
    by accumulation error.
    """
    costs = point_costs(ps, centers, z)
    w = ps.weights
    if subset is not None:
        subset = np.asarray(subset)
        if subset.dtype == bool:
            subset = np.flatnonzero(subset)
        costs, w = costs[subset], w[subset]
    return math.fsum((w * costs).tolist())


def weighted_cost(weights, costs):
    return math.fsum((np.asarray(weights) * np.asarray(costs)).tolist())
