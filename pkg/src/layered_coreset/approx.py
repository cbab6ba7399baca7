"""Constant-factor approximate solutions: D^z seeding plus single-swap local search."""
import itertools
import math
from dataclasses import dataclass, replace

import numpy as np

from . import _core
from .metrics import as_solution

EXACT_LIMIT = 10**6


@dataclass(frozen=True)
class ApproxSolution:
    """A k-center solution with its induced clustering.

    ``delta[i]`` is the average (weighted) cost of cluster ``i``; it is 0 for
    empty or zero-cost clusters, which ``zero_cost`` flags.
    """

    centers: np.ndarray
    assignment: np.ndarray
    point_cost_A: np.ndarray
    cluster_cost: np.ndarray
    cluster_size: np.ndarray
    delta: np.ndarray
    z: int
    swaps: int = 0

    @property
    def k(self):
        return len(self.centers)

    @property
    def cost(self):
        return math.fsum(self.cluster_cost.tolist())

    @property
    def zero_cost(self):
        return self.delta == 0


def assign(ps, centers, z):
    """Assign every point to its nearest center; ties go to the lowest cluster index."""
    centers = as_solution(centers, ps.n).copy()
    dz = ps.backend.rows(centers) ** z
    assignment = np.argmin(dz, axis=0)
    pc = dz[assignment, np.arange(ps.n)]
    k = len(centers)
    w = ps.weights
    cluster_cost = np.array([math.fsum((w[assignment == i] * pc[assignment == i]).tolist()) for i in range(k)])
    cluster_size = np.array([math.fsum(w[assignment == i].tolist()) for i in range(k)])
    delta = np.zeros(k)
    ok = (cluster_size > 0) & (cluster_cost > 0)
    delta[ok] = cluster_cost[ok] / cluster_size[ok]
    for arr in (centers, assignment, pc, cluster_cost, cluster_size, delta):
        arr.setflags(write=False)
    return ApproxSolution(centers, assignment, pc, cluster_cost, cluster_size, delta, int(z))


def dz_seed(ps, k, z, seed=None):
    """D^z seeding: first center drawn proportional to weight, then to ``w_p * cost(p)``.

    Always returns ``k`` distinct indices; once every remaining point costs
    zero the rest are drawn proportional to weight among unchosen points.
    """
    n = ps.n
    if not 1 <= k <= n:
        raise ValueError(f"need 1 <= k <= n, got k={k}, n={n}")
    w = ps.weights
    if w.sum() <= 0:
        raise ValueError("all weights are zero")
    rng = np.random.default_rng(seed)
    chosen = np.zeros(n, dtype=bool)
    first = int(rng.choice(n, p=w / w.sum()))
    centers = [first]
    chosen[first] = True
    best = ps.backend.rows([first])[0] ** z
    for _ in range(1, k):
        score = np.where(chosen, 0.0, w * best)
        if score.sum() <= 0:
            score = np.where(chosen, 0.0, w)
            if score.sum() <= 0:
                score = (~chosen).astype(float)
        nxt = int(rng.choice(n, p=score / score.sum()))
        centers.append(nxt)
        chosen[nxt] = True
        best = np.minimum(best, ps.backend.rows([nxt])[0] ** z)
    return np.array(centers, dtype=np.int64)


def _first_second(dz):
    # dz: (k, n) costs to current centers
    k = dz.shape[0]
    nearest = np.argmin(dz, axis=0)
    cols = np.arange(dz.shape[1])
    first = dz[nearest, cols]
    if k == 1:
        second = np.full(dz.shape[1], np.inf)
    else:
        masked = dz.copy()
        masked[nearest, cols] = np.inf
        second = masked.min(axis=0)
    return first, second, nearest


def local_search_refine(ps, centers, z, max_swaps=None, threshold=1e-3, chunk=256):
    """Apply best single swaps while each improves the cost by at least ``threshold``.

    Parameters
    ----------
    ps : PointSet
    centers : array-like of int
        Starting centers.
    z : int
    max_swaps : int, optional
        Defaults to ``50 * k``. ``0`` just assigns points to ``centers``.
    threshold : float
        Minimum relative improvement for a swap to be taken.

    Returns
    -------
    ApproxSolution
    """
    centers = as_solution(centers, ps.n).copy()
    k = len(centers)
    if max_swaps is None:
        max_swaps = 50 * k
    w = ps.weights
    n = ps.n
    swaps = 0
    while swaps < max_swaps and k < n:
        dz = ps.backend.rows(centers) ** z
        first, second, nearest = _first_second(dz)
        current = float(w @ first)
        if current <= 0:
            break
        is_center = np.zeros(n, dtype=bool)
        is_center[centers] = True
        best_cost, best_pair = np.inf, None
        for start in range(0, n, chunk):
            cand = np.arange(start, min(start + chunk, n))
            cand = cand[~is_center[cand]]
            if cand.size == 0:
                continue
            costs = _core.swap_costs(ps.backend.rows(cand) ** z, w, first, second, nearest, k)
            flat = int(np.argmin(costs))
            if costs.flat[flat] < best_cost:
                best_cost = float(costs.flat[flat])
                best_pair = (int(cand[flat // k]), flat % k)
        if best_pair is None or best_cost > current * (1.0 - threshold):
            break
        centers[best_pair[1]] = best_pair[0]
        swaps += 1
    return replace(assign(ps, centers, z), swaps=swaps)


def approximate(ps, k, z, seed=None, max_swaps=None):
    """D^z seeding followed by local search: the approximation the partition is built on."""
    return local_search_refine(ps, dz_seed(ps, k, z, seed), z, max_swaps=max_swaps)


def exact_kmedian(ps, k, z):
    """Optimal discrete (k, z)-clustering by exhaustive search over k-subsets of the points."""
    n = ps.n
    if not 1 <= k <= n:
        raise ValueError(f"need 1 <= k <= n, got k={k}, n={n}")
    if math.comb(n, k) > EXACT_LIMIT:
        raise ValueError(f"C({n},{k}) exceeds {EXACT_LIMIT} subsets")
    dz = ps.backend.rows(np.arange(n)) ** z
    w = ps.weights
    best_cost, best = np.inf, None
    for combo in itertools.combinations(range(n), k):
        c = float(w @ dz[list(combo)].min(axis=0))
        if c < best_cost:
            best_cost, best = c, combo
    return assign(ps, np.array(best, dtype=np.int64), z)
