"""Shared instance generators and independent oracles.

The oracles here are deliberately naive: plain Python loops, no shared code
with the package beyond the public data types.
"""
import itertools
import math

import numpy as np
import pytest

from layered_coreset.metrics import (
    DiscreteFrechet,
    Euclidean,
    ExplicitMatrix,
    GraphShortestPath,
    Hausdorff,
    PointSet,
)


def vdist(u, v):
    """Vertex distance, squares summed in coordinate order (the library's convention)."""
    return math.sqrt(sum((x - y) * (x - y) for x, y in zip(u, v)))


def brute_frechet(a, b):
    """Minimum over every monotone warping path of the largest coupled distance."""
    a = [tuple(map(float, v)) for v in a]
    b = [tuple(map(float, v)) for v in b]
    n, m = len(a), len(b)
    d = lambda i, j: vdist(a[i], b[j])  # noqa: E731
    best = math.inf

    def walk(i, j, worst):
        nonlocal best
        worst = max(worst, d(i, j))
        if worst >= best:
            return
        if i == n - 1 and j == m - 1:
            best = worst
            return
        if i + 1 < n:
            walk(i + 1, j, worst)
        if j + 1 < m:
            walk(i, j + 1, worst)
        if i + 1 < n and j + 1 < m:
            walk(i + 1, j + 1, worst)

    walk(0, 0, 0.0)
    return best


def all_paths_frechet(a, b):
    """Enumerates every warping path explicitly (no pruning), for tiny inputs."""
    n, m = len(a), len(b)
    vals = []

    def walk(path):
        i, j = path[-1]
        if (i, j) == (n - 1, m - 1):
            vals.append(max(vdist(a[p], b[q]) for p, q in path))
            return
        for di, dj in ((1, 0), (0, 1), (1, 1)):
            if i + di < n and j + dj < m:
                walk(path + [(i + di, j + dj)])

    walk([(0, 0)])
    return min(vals)


def brute_hausdorff(x, y):
    dxy = max(min(vdist(p, q) for q in y) for p in x)
    dyx = max(min(vdist(q, p) for p in x) for q in y)
    return max(dxy, dyx)


def brute_cost(coords_or_dist, weights, centers, z):
    """Weighted (k,z) cost from a dense distance matrix, by explicit loops."""
    D = coords_or_dist
    total = 0.0
    for p in range(len(weights)):
        total += weights[p] * min(D[p][c] for c in centers) ** z
    return total


def dense(ps):
    return np.array([[ps.backend.dist(p, q) for q in range(ps.n)] for p in range(ps.n)])


def random_curve(rng, length, dim=2, scale=3.0):
    return rng.uniform(-scale, scale, size=(length, dim))


def gaussian_mixture(n, k, dim=2, seed=0, spread=8.0):
    rng = np.random.default_rng(seed)
    centers = rng.normal(0, spread * k, size=(k, dim))
    labels = rng.integers(0, k, size=n)
    return centers[labels] + rng.normal(0, 1.0, size=(n, dim))


def random_matrix_metric(n, rng):
    """Shortest-path closure of random integer weights: a genuine metric, exact in floats."""
    A = rng.integers(1, 20, size=(n, n)).astype(float)
    A = np.minimum(A, A.T)
    np.fill_diagonal(A, 0)
    for m in range(n):
        A = np.minimum(A, A[:, [m]] + A[[m], :])
    return A


def random_connected_graph(n, rng, extra=None):
    """Random spanning tree plus extra edges; weights are multiples of 1/1024."""
    edges = []
    for v in range(1, n):
        u = int(rng.integers(0, v))
        edges.append((u, v, round(float(rng.uniform(0.5, 5.0)) * 1024) / 1024))
    for _ in range(extra if extra is not None else n):
        u, v = rng.integers(0, n, size=2)
        if u != v:
            edges.append((int(u), int(v), round(float(rng.uniform(0.5, 5.0)) * 1024) / 1024))
    return edges


def make_backend(kind, n, rng):
    if kind == "euclidean":
        return Euclidean(rng.normal(0, 5, size=(n, 2)))
    if kind == "matrix":
        return ExplicitMatrix(random_matrix_metric(n, rng))
    if kind == "graph":
        return GraphShortestPath(random_connected_graph(n, rng))
    if kind == "frechet":
        return DiscreteFrechet([random_curve(rng, int(rng.integers(1, 5))) for _ in range(n)])
    if kind == "hausdorff":
        return Hausdorff([random_curve(rng, int(rng.integers(1, 5))) for _ in range(n)])
    raise ValueError(kind)


BACKEND_KINDS = ("euclidean", "matrix", "graph", "frechet", "hausdorff")


def points_1d(values, weights=None):
    return PointSet(Euclidean(np.asarray(values, dtype=float).reshape(-1, 1)), weights)


def all_subsets(n, k):
    return [list(c) for c in itertools.combinations(range(n), k)]


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def skewed_points(n, k, rng, dim=2):
    """Clusters of very different sizes and spreads plus a few far outliers."""
    sizes = rng.multinomial(n - max(1, n // 50), rng.dirichlet(np.full(k, 0.5)))
    blocks = []
    for s in sizes:
        c = rng.normal(0, 50 * k, size=dim)
        blocks.append(c + rng.lognormal(0, 1.5) * rng.standard_t(3, size=(s, dim)))
    blocks.append(rng.normal(0, 500 * k, size=(max(1, n // 50), dim)))
    return np.vstack(blocks)


def check_partition(ps, approx, part):
    """Every structural invariant of a partition; returns counts of checked pairs.

    Raises AssertionError naming the first violation.
    """
    from layered_coreset.partition import CHEAP_KINDS, KIND_CODES, MAIN, OUTER, INNER

    params = part.params
    n = ps.n
    seen = np.zeros(n, dtype=int)
    for key, info in part.groups.items():
        seen[info.members] += 1
        for p in info.members:
            assert part.key_of(int(p)) == key
    assert np.all(seen == 1), "partition not exhaustive and disjoint"
    assert sum(len(g.members) for g in part.groups.values()) == n

    cost = approx.point_cost_A
    delta = approx.delta[approx.assignment]
    phi = params.phi
    pairs = 0
    for key, info in part.groups.items():
        mem = info.members
        if key.kind == MAIN:
            assert 1 <= key.b <= params.b_max, f"band {key.b} outside [1, {params.b_max}]"
            for i in info.clusters:
                sel = mem[approx.assignment[mem] == i]
                c = cost[sel]
                d = approx.delta[i]
                assert np.all(np.ldexp(d, key.j) <= c) and np.all(c < np.ldexp(d, key.j + 1)), "ring bounds"
                assert c.max() <= 2 * c.min(), "ring factor"
            cc = [info.cluster_cost[i] for i in info.clusters]
            assert max(cc) <= 2 * min(cc), "group cost factor"
            c = cost[mem]
            r = c[:, None] / c[None, :]
            ok = ((r >= 0.25) & (r <= 4)) | (r >= phi / 2) | (r <= 2 / phi)
            assert ok.all(), "layering trichotomy"
            pairs += r.size
        elif key.kind == OUTER:
            assert 1 <= key.b <= params.b_max
            cc = [info.cluster_cost[i] for i in info.clusters]
            assert max(cc) <= 2 * min(cc), "outer group cost factor"
    inner = part.kind == KIND_CODES[INNER]
    live = inner & (delta > 0)
    assert np.all(cost[live] <= params.epsilon**params.z * delta[live] * params.gamma_inner * 2), "inner threshold"
    outer = np.isin(part.kind, [KIND_CODES["outer"], KIND_CODES["outer_min"]])
    bound = params.k**3 / params.epsilon ** (2 * params.z) * delta[outer] * params.gamma_outer / 2
    assert np.all(cost[outer] > bound), "outer threshold"
    assert set(_kind for _kind in part.kind.tolist()) <= set(KIND_CODES.values())
    assert all(k.kind in CHEAP_KINDS or k.kind in (MAIN, OUTER) for k in part.groups)
    return pairs
