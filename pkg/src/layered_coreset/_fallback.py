"""Pure numpy implementations of the hot kernels.

Every function here has a twin with the same signature in ``_kernels.pyx``.
Distance kernels agree bit for bit; ``swap_costs`` agrees up to summation
order.
"""
import numpy as np


def frechet_pair(a, b):
    """Discrete Frechet distance between two curves given as (m, d) arrays."""
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    diff = a[:, None, :] - b[None, :, :]
    sq = _sum_last(diff * diff)
    n1, n2 = sq.shape
    ca = np.empty((n1, n2))
    ca[0, 0] = sq[0, 0]
    for j in range(1, n2):
        ca[0, j] = max(ca[0, j - 1], sq[0, j])
    for i in range(1, n1):
        ca[i, 0] = max(ca[i - 1, 0], sq[i, 0])
        for j in range(1, n2):
            best = min(ca[i - 1, j], ca[i - 1, j - 1], ca[i, j - 1])
            ca[i, j] = max(best, sq[i, j])
    return float(np.sqrt(ca[n1 - 1, n2 - 1]))


def hausdorff_pair(a, b):
    """Symmetric Hausdorff distance between two finite point sets."""
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    diff = a[:, None, :] - b[None, :, :]
    sq = _sum_last(diff * diff)
    return float(np.sqrt(max(sq.min(axis=1).max(), sq.min(axis=0).max())))


def directed_hausdorff_pair(a, b):
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    diff = a[:, None, :] - b[None, :, :]
    sq = _sum_last(diff * diff)
    return float(np.sqrt(sq.min(axis=1).max()))


def _sum_last(x):
    # left-to-right over coordinates, matching the compiled loop order
    out = x[..., 0].copy()
    for t in range(1, x.shape[-1]):
        out += x[..., t]
    return out


def frechet_row(flat, offsets, q):
    n = len(offsets) - 1
    cq = flat[offsets[q]:offsets[q + 1]]
    out = np.empty(n)
    for i in range(n):
        out[i] = frechet_pair(cq, flat[offsets[i]:offsets[i + 1]])
    return out


def hausdorff_row(flat, offsets, q):
    n = len(offsets) - 1
    cq = flat[offsets[q]:offsets[q + 1]]
    out = np.empty(n)
    for i in range(n):
        out[i] = hausdorff_pair(cq, flat[offsets[i]:offsets[i + 1]])
    return out


def swap_costs(cand_cost, weights, first, second, nearest, k):
    """Cost of every (candidate-in, center-out) swap.

    ``cand_cost[c, p]`` is the z-th power distance from candidate ``c`` to
    point ``p``; ``first``/``second`` are each point's cost to its nearest
    and second-nearest current center, ``nearest`` the nearest center slot.
    Returns a (n_candidates, k) array.
    """
    m1 = np.minimum(cand_cost, first)
    m2 = np.minimum(cand_cost, second)
    base = m1 @ weights
    onehot = np.zeros((len(weights), k))
    onehot[np.arange(len(weights)), nearest] = 1.0
    corr = ((m2 - m1) * weights) @ onehot
    return base[:, None] + corr


def range_traces(dist_rows):
    """Distinct traces {y : d_y >= r} over rows of a (n_rows, d) matrix.

    Each row holds the distance of every element of Y to one center set.
    Thresholds sweep the realized values, plus r = inf for the empty trace.
    Traces are bitmasks with bit ``t`` set for element ``t`` of Y.
    """
    d = dist_rows.shape[1]
    if d == 0:
        return np.zeros(1, dtype=np.uint64)
    bits = np.left_shift(np.uint64(1), np.arange(d, dtype=np.uint64))
    ge = dist_rows[:, None, :] >= dist_rows[:, :, None]
    masks = np.bitwise_or.reduce(np.where(ge, bits, np.uint64(0)), axis=2)
    return np.unique(np.concatenate([masks.ravel(), np.zeros(1, dtype=np.uint64)]))
