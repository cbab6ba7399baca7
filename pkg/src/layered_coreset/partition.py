"""Rings, layers and groups of an approximate clustering.

Points are split by their cost relative to their cluster's average cost
into inner, main and outer rings. Main rings sharing a ring index, a
comparable total cost and a layer form a main group; outer rings are
grouped per layer by their total cost. Rings too cheap to matter become
the cheap groups (``main_min`` / ``outer_min``), which are never sampled.
All logarithms are base 2.
"""
import math
from dataclasses import dataclass, field
from typing import NamedTuple, Optional

import numpy as np

INNER, MAIN_MIN, MAIN, OUTER_MIN, OUTER = "inner", "main_min", "main", "outer_min", "outer"
KIND_CODES = {INNER: 0, MAIN_MIN: 1, MAIN: 2, OUTER_MIN: 3, OUTER: 4}
CHEAP_KINDS = frozenset({INNER, MAIN_MIN, OUTER_MIN})
SAMPLED_KINDS = frozenset({MAIN, OUTER})


@dataclass(frozen=True)
class PartitionParams:
    """Thresholds of the ring/layer/group decomposition.

    ``gamma_b=None`` means ``(4z)^z``, the smallest value for which every
    realizable band index fits under ``b_max``.
    """

    k: int
    z: int
    epsilon: float
    gamma_inner: float = 1.0
    gamma_outer: float = 1.0
    gamma_b: Optional[float] = None
    gamma_phi: float = 1.0

    def __post_init__(self):
        if self.k < 1 or self.z < 1:
            raise ValueError("k and z must be positive integers")
        if not 0 < self.epsilon < 0.5:
            raise ValueError("epsilon must lie in (0, 1/2)")
        if min(self.gamma_inner, self.gamma_outer, self.gamma_phi) <= 0:
            raise ValueError("gamma constants must be positive")
        if self.gamma_b is None:
            object.__setattr__(self, "gamma_b", float((4 * self.z) ** self.z))
        elif self.gamma_b <= 0:
            raise ValueError("gamma constants must be positive")

    @property
    def phi_exponent(self):
        e = math.ceil(10 * self.z * math.log2(self.k / self.epsilon) + math.log2(self.gamma_phi))
        return max(e, 1)

    @property
    def phi(self):
        return math.ldexp(1.0, self.phi_exponent)

    @property
    def j_inner(self):
        return math.floor(self.z * math.log2(self.epsilon) + math.log2(self.gamma_inner))

    @property
    def j_outer(self):
        return math.ceil(math.log2(self.gamma_outer * self.k**3 / self.epsilon ** (2 * self.z)))

    @property
    def b_max(self):
        return math.ceil(math.log2(self.gamma_b * self.k / self.epsilon**self.z))

    @property
    def band_factor(self):
        """``(eps / 4z)^z``, the relative unit of ring cost used to pick ``b``."""
        return (self.epsilon / (4 * self.z)) ** self.z


class GroupKey(NamedTuple):
    kind: str
    j: Optional[int] = None
    b: Optional[int] = None
    ell: Optional[int] = None

    @property
    def tag(self):
        parts = [self.kind]
        for name, val in (("j", self.j), ("b", self.b), ("l", self.ell)):
            if val is not None:
                parts.append(f"{name}={val}")
        return ":".join(parts)

    @property
    def order(self):
        return (KIND_CODES[self.kind],) + tuple(0 if v is None else v for v in (self.j, self.b, self.ell))

    @property
    def is_cheap(self):
        return self.kind in CHEAP_KINDS

    @classmethod
    def from_tag(cls, tag):
        kind, *rest = tag.split(":")
        if kind not in KIND_CODES:
            raise ValueError(f"unknown group tag {tag!r}")
        vals = dict(part.split("=") for part in rest)
        get = lambda name: int(vals[name]) if name in vals else None  # noqa: E731
        return cls(kind, get("j"), get("b"), get("l"))


@dataclass
class GroupInfo:
    key: GroupKey
    members: np.ndarray
    member_clusters: np.ndarray
    cluster_cost: dict = field(default_factory=dict)
    cluster_weight: dict = field(default_factory=dict)

    @property
    def cost(self):
        return math.fsum(self.cluster_cost.values())

    @property
    def weight(self):
        return math.fsum(self.cluster_weight.values())

    @property
    def clusters(self):
        return sorted(self.cluster_cost)


@dataclass
class GroupPartition:
    params: PartitionParams
    cluster: np.ndarray
    kind: np.ndarray  # per point, KIND_CODES value
    ring: np.ndarray  # ring index j; meaningless for inner points
    band: np.ndarray  # b, or 0 when not applicable
    layer: np.ndarray  # ell, or -1 when not applicable
    groups: dict  # GroupKey -> GroupInfo, in sorted key order

    @property
    def n(self):
        return len(self.cluster)

    def key_of(self, p):
        code = int(self.kind[p])
        kind = _KIND_NAMES[code]
        j = int(self.ring[p]) if kind in (MAIN, MAIN_MIN) else None
        b = int(self.band[p]) if kind in (MAIN, OUTER) else None
        ell = int(self.layer[p]) if kind in (MAIN, OUTER, OUTER_MIN) else None
        return GroupKey(kind, j, b, ell)

    def keys(self):
        return list(self.groups)

    def sampled_keys(self):
        return [key for key in self.groups if key.kind in SAMPLED_KINDS]

    @property
    def num_groups(self):
        """Distinct main and outer groups, the ones that get sampled."""
        return len(self.sampled_keys())

    def cheap_mask(self):
        return np.isin(self.kind, [KIND_CODES[k] for k in CHEAP_KINDS])

    def rows(self):
        """Dump rows ``(point_index, cluster, group_tag, j, b, ell)``; absent fields are ''."""
        out = []
        for p in range(self.n):
            key = self.key_of(p)
            out.append((p, int(self.cluster[p]), key.kind, _blank(key.j), _blank(key.b), _blank(key.ell)))
        return out


_KIND_NAMES = {v: k for k, v in KIND_CODES.items()}


def _blank(v):
    return "" if v is None else v


def floor_log2_ratio(num, den):
    """Integer ``j`` with ``den * 2**j <= num < den * 2**(j+1)``, for positive inputs.

    The float estimate is checked against the defining inequality with exact
    power-of-two scaling and shifted by one where rounding crossed a boundary.
    """
    num = np.asarray(num, dtype=np.float64)
    den = np.asarray(den, dtype=np.float64)
    _, e = np.frexp(num / den)
    j = e.astype(np.int64) - 1
    j = np.where(num < np.ldexp(den, j), j - 1, j)
    j = np.where(num >= np.ldexp(den, j + 1), j + 1, j)
    return j


def ring_index(p, approx, params):
    """Ring of point ``p``: an integer ``j``, or ``"inner"`` / ``"outer"``.

    Rings are half-open, ``2^j * delta <= cost < 2^(j+1) * delta``.
    """
    i = int(approx.assignment[p])
    return _ring_from(float(approx.point_cost_A[p]), float(approx.delta[i]), params)


def _ring_from(cost, delta, params):
    if delta == 0 or cost == 0:
        return INNER
    j = int(floor_log2_ratio(cost, delta))
    if j <= params.j_inner:
        return INNER
    if j > params.j_outer:
        return OUTER
    return j


def layer_of(j, delta, phi, return_scale=False):
    """Layer ``ell`` in ``[0, log2 phi)`` of the ring at scale ``2^j * delta``.

    The scale satisfies ``2^ell * phi^a <= 2^j * delta < 2^(ell+1) * phi^a``;
    with ``return_scale`` the pair ``(a, ell)`` is returned.
    """
    if delta <= 0:
        raise ValueError("delta must be positive")
    mant, log_phi = math.frexp(phi)
    if mant != 0.5:
        raise ValueError("phi must be a power of two")
    log_phi -= 1
    a, ell = _layer_scale(np.int64(j), np.float64(delta), log_phi)
    a, ell = int(a), int(ell)
    v = math.ldexp(delta, int(j))
    assert math.ldexp(1.0, ell + a * log_phi) <= v < math.ldexp(1.0, ell + 1 + a * log_phi)
    return (a, ell) if return_scale else ell


def _layer_scale(j, delta, log_phi):
    # floor(log2(2^j * delta)) is exact through frexp: no rounding involved
    _, e = np.frexp(np.ldexp(delta, j))
    t = np.asarray(e, dtype=np.int64) - 1
    a = np.floor_divide(t, log_phi)
    return a, t - a * log_phi


def build_partition(ps, approx, params):
    """Assign every point of ``ps`` to exactly one group."""
    n = ps.n
    w = ps.weights
    cluster = np.asarray(approx.assignment, dtype=np.int64)
    cost = np.asarray(approx.point_cost_A, dtype=np.float64)
    delta = np.asarray(approx.delta, dtype=np.float64)[cluster]
    k = params.k
    log_phi = params.phi_exponent

    kind = np.full(n, KIND_CODES[INNER], dtype=np.int8)
    ring = np.zeros(n, dtype=np.int64)
    band = np.zeros(n, dtype=np.int64)
    layer = np.full(n, -1, dtype=np.int64)

    live = (delta > 0) & (cost > 0)
    idx = np.flatnonzero(live)
    if idx.size:
        ring[idx] = floor_log2_ratio(cost[idx], delta[idx])
        _, layer[idx] = _layer_scale(ring[idx], delta[idx], log_phi)
    main = live & (ring > params.j_inner) & (ring <= params.j_outer)
    outer = live & (ring > params.j_outer)
    layer[~(main | outer)] = -1

    wc = w * cost
    # main rings: compare each ring's cost with the average j-th ring cost
    for j in np.unique(ring[main]):
        in_j = main & (ring == j)
        clusters = np.unique(cluster[in_j])
        ring_cost = {int(i): math.fsum(wc[in_j & (cluster == i)].tolist()) for i in clusters}
        unit = params.band_factor * math.fsum(ring_cost.values()) / k
        for i, c in ring_cost.items():
            sel = in_j & (cluster == i)
            b = int(floor_log2_ratio(c, unit)) if c > 0 and unit > 0 else 0
            if b < 1:
                kind[sel] = KIND_CODES[MAIN_MIN]
            else:
                kind[sel] = KIND_CODES[MAIN]
                band[sel] = b

    # outer rings: per layer, compare each cluster's outer cost with the average
    for ell in np.unique(layer[outer]):
        in_l = outer & (layer == ell)
        clusters = np.unique(cluster[in_l])
        part_cost = {int(i): math.fsum(wc[in_l & (cluster == i)].tolist()) for i in clusters}
        unit = params.band_factor * math.fsum(part_cost.values()) / k
        for i, c in part_cost.items():
            sel = in_l & (cluster == i)
            b = int(floor_log2_ratio(c, unit)) if c > 0 and unit > 0 else 0
            if b < 1:
                kind[sel] = KIND_CODES[OUTER_MIN]
            else:
                kind[sel] = KIND_CODES[OUTER]
                band[sel] = b

    part = GroupPartition(params, cluster, kind, ring, band, layer, {})
    buckets = {}
    for p in range(n):
        buckets.setdefault(part.key_of(p), []).append(p)
    for key in sorted(buckets, key=lambda g: g.order):
        members = np.array(buckets[key], dtype=np.int64)
        info = GroupInfo(key, members, cluster[members])
        for i in np.unique(cluster[members]):
            sel = members[cluster[members] == i]
            info.cluster_cost[int(i)] = math.fsum(wc[sel].tolist())
            info.cluster_weight[int(i)] = math.fsum(w[sel].tolist())
        part.groups[key] = info
    for arr in (part.cluster, part.kind, part.ring, part.band, part.layer):
        arr.setflags(write=False)
    return part
