"""Layered group sampling.

Cheap groups (inner rings and the ``*_min`` groups) are replaced by their
cluster centers weighted by the mass they stand for. Every main and outer
group receives ``m`` i.i.d. draws with replacement, each draw carrying
``w_p / (m * P[p])`` so the group's weighted cost is estimated without bias.
"""
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .approx import approximate
from .partition import KIND_CODES, MAIN, OUTER, PartitionParams, build_partition

CHEAP_TAG = "cheap"
WHOLE_GROUP_FACTOR = 4
DEFAULT_C0 = 0.05


@dataclass
class Coreset:
    """Weighted subset of point indices. ``tags`` record each entry's group."""

    indices: np.ndarray
    weights: np.ndarray
    tags: list
    meta: dict = field(default_factory=dict)

    def __len__(self):
        return len(self.indices)

    @property
    def total_weight(self):
        return math.fsum(self.weights.tolist())

    @classmethod
    def from_entries(cls, entries, meta=None):
        """Merge ``(index, weight, tag)`` triples: weights of equal indices add up."""
        merged = {}
        for idx, wt, tag in entries:
            idx = int(idx)
            if idx in merged:
                old_w, old_tag = merged[idx]
                merged[idx] = (old_w + [float(wt)], old_tag if tag in old_tag.split("|") else f"{old_tag}|{tag}")
            else:
                merged[idx] = ([float(wt)], tag)
        order = sorted(merged)
        weights = np.array([math.fsum(merged[i][0]) for i in order])
        if np.any(weights <= 0):
            raise ValueError("coreset weights must be positive")
        return cls(np.array(order, dtype=np.int64), weights, [merged[i][1] for i in order], dict(meta or {}))


def main_group_probabilities(info, weights):
    """Per-member sampling probabilities of a main group.

    A member ``p`` of cluster ``i`` is drawn with probability
    ``cost(C_i & G) / cost(G) * w_p / |C_i & G|`` (cardinalities are weights).
    """
    total = info.cost
    assert total > 0, "main groups always carry positive cost"
    share = {i: info.cluster_cost[i] / total / info.cluster_weight[i] for i in info.cluster_cost}
    per_member = np.array([share[int(i)] for i in info.member_clusters])
    return per_member * weights[info.members]


def outer_group_probabilities(info, weights, point_cost_A):
    members = info.members
    mass = weights[members] * point_cost_A[members]
    total = info.cost
    assert total > 0, "outer groups always carry positive cost"
    return mass / total


def main_group_probability(info, p, weights):
    idx = np.flatnonzero(info.members == p)
    if idx.size == 0:
        raise ValueError(f"point {p} is not in group {info.key.tag}")
    return float(main_group_probabilities(info, weights)[idx[0]])


def outer_group_probability(info, p, weights, point_cost_A):
    idx = np.flatnonzero(info.members == p)
    if idx.size == 0:
        raise ValueError(f"point {p} is not in group {info.key.tag}")
    return float(outer_group_probabilities(info, weights, point_cost_A)[idx[0]])


def group_probabilities(info, weights, point_cost_A):
    if info.key.kind == MAIN:
        return main_group_probabilities(info, weights)
    if info.key.kind == OUTER:
        return outer_group_probabilities(info, weights, point_cost_A)
    raise ValueError(f"group {info.key.tag} is not sampled")


def sample_group(members, probs, weights, m, rng, whole_group_factor=WHOLE_GROUP_FACTOR):
    """Draw ``m`` members i.i.d. with replacement; return merged ``(indices, weights)``.

    Each draw of ``p`` contributes ``w_p / (m * P[p])``. When ``m`` is at
    least ``whole_group_factor`` times the group size the group is returned
    verbatim with its true weights instead.
    """
    members = np.asarray(members, dtype=np.int64)
    if m < 1:
        raise ValueError("m must be at least 1")
    if whole_group_factor and m >= whole_group_factor * len(members):
        keep = weights[members] > 0
        return members[keep], weights[members][keep].astype(np.float64)
    draws = rng.choice(len(members), size=m, p=probs)
    contrib = weights[members[draws]] / (m * probs[draws])
    summed = np.bincount(draws, weights=contrib, minlength=len(members))
    hit = np.flatnonzero(np.bincount(draws, minlength=len(members)))
    return members[hit], summed[hit]


def inner_and_cheap_weights(partition, approx, weights):
    """``(center_index, weight)`` per cluster: the total weight of its cheap points."""
    cheap = partition.cheap_mask()
    out = []
    for i, c in enumerate(approx.centers):
        mass = math.fsum(weights[cheap & (partition.cluster == i)].tolist())
        if mass > 0:
            out.append((int(c), mass))
    return out


def recommended_sample_size(k, epsilon, z, d_vc, c0=DEFAULT_C0):
    """Per-group sample count ``c0 * k * d_vc * eps^-2 * min(eps^(1-z), k) * log2(k / eps)``."""
    if k < 1 or d_vc < 1:
        raise ValueError("k and d_vc must be at least 1")
    if not 0 < epsilon < 0.5:
        raise ValueError("epsilon must lie in (0, 1/2)")
    if z not in (1, 2):
        raise ValueError("z must be 1 or 2")
    if c0 <= 0:
        raise ValueError("c0 must be positive")
    factor = min(epsilon ** (1 - z), k)
    return max(1, math.ceil(c0 * k * d_vc * epsilon**-2 * factor * math.log2(k / epsilon)))


def vc_dimension_hint(kind, **params):
    """Known upper bounds on the VC dimension of metric balls, per backend kind.

    Euclidean ``d + 1``; finite metrics ``3 * log2 n`` (at most ``n^3``
    ranges); ``K_h``-minor-free graphs ``h - 1`` (``h=5`` covers planar);
    Frechet and Hausdorff ``d * ell * log2(ell * m)`` for centers of
    complexity ``ell`` and inputs of complexity ``m``.
    """
    if kind == "euclidean":
        return int(params.get("dim", 2)) + 1
    if kind == "matrix":
        return max(1, math.ceil(3 * math.log2(max(int(params.get("n", 2)), 2))))
    if kind == "graph":
        return int(params.get("h", 5)) - 1
    if kind in ("frechet", "hausdorff"):
        d = int(params.get("dim", 2))
        ell = int(params.get("ell", 2))
        m = int(params.get("m", 2))
        return max(1, math.ceil(d * ell * math.log2(max(ell * m, 2))))
    raise ValueError(f"unknown metric kind {kind!r}")


def group_rng(seed, key):
    """Independent generator for one group, derived from ``(seed, key)`` only."""
    zig = lambda v: 0 if v is None else (2 * v + 1 if v >= 0 else -2 * v)  # noqa: E731
    spawn = (KIND_CODES[key.kind], zig(key.j), zig(key.b), zig(key.ell))
    return np.random.default_rng(np.random.SeedSequence(entropy=int(seed), spawn_key=spawn))


def default_threads():
    try:
        return max(1, int(os.environ.get("LAYERED_CORESET_THREADS", "1")))
    except ValueError:
        return 1


def sample_partition(ps, approx, partition, m, seed, threads=None, whole_group_factor=WHOLE_GROUP_FACTOR, meta=None):
    """Layered group sampling over an existing partition."""
    weights = ps.weights
    entries = [(c, wt, CHEAP_TAG) for c, wt in inner_and_cheap_weights(partition, approx, weights)]
    keys = partition.sampled_keys()

    def run(key):
        info = partition.groups[key]
        probs = group_probabilities(info, weights, approx.point_cost_A)
        idx, wts = sample_group(info.members, probs, weights, m, group_rng(seed, key), whole_group_factor)
        return [(i, wt, key.tag) for i, wt in zip(idx.tolist(), wts.tolist())]

    threads = default_threads() if threads is None else threads
    if threads > 1 and len(keys) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(run, keys))
    else:
        results = [run(key) for key in keys]
    for chunk in results:  # reduction in sorted key order
        entries.extend(chunk)
    info = {"m": int(m), "groups": len(keys), "n": ps.n}
    info.update(meta or {})
    cs = Coreset.from_entries(entries, info)
    cs.meta["coreset_size"] = len(cs)
    return cs


def build_coreset(ps, k, z, epsilon, d_vc, seed=0, c0=DEFAULT_C0, m=None, approx=None,
                  params=None, max_swaps=None, threads=None, whole_group_factor=WHOLE_GROUP_FACTOR):
    """Full pipeline: approximation, partition, cheap-center weights, group sampling.

    ``m`` overrides the recommended per-group sample count; ``approx`` and
    ``params`` let callers reuse a precomputed approximation.
    """
    k = min(k, ps.n)
    if params is None:
        params = PartitionParams(k=k, z=z, epsilon=epsilon)
    if approx is None:
        approx = approximate(ps, k, z, seed=seed, max_swaps=max_swaps)
    partition = build_partition(ps, approx, params)
    if m is None:
        m = recommended_sample_size(params.k, epsilon, z, d_vc, c0)
    meta = {"k": int(k), "z": int(z), "epsilon": float(epsilon), "d_vc": int(d_vc), "seed": int(seed), "c0": float(c0)}
    return sample_partition(ps, approx, partition, m, seed, threads, whole_group_factor, meta)
