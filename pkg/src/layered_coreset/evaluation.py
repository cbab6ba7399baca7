"""Empirical checks of the coreset guarantee and baseline samplers."""
import csv
import io
import itertools
import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from .approx import EXACT_LIMIT, approximate
from .metrics import as_solution, point_costs
from .partition import PartitionParams, build_partition
from .sampler import Coreset, recommended_sample_size, sample_partition


@dataclass
class DistortionReport:
    errors: np.ndarray
    solution_ids: list
    family: str = ""
    coreset_meta: dict = field(default_factory=dict)
    skipped: list = field(default_factory=list)

    @property
    def max(self):
        return float(self.errors.max()) if self.errors.size else 0.0

    @property
    def p99(self):
        return float(np.percentile(self.errors, 99)) if self.errors.size else 0.0

    @property
    def mean(self):
        return float(self.errors.mean()) if self.errors.size else 0.0

    def summary(self):
        return {"max": self.max, "p99": self.p99, "mean": self.mean, "solutions": int(self.errors.size)}

    def to_dict(self):
        return {
            "family": self.family,
            "summary": self.summary(),
            "skipped": self.skipped,
            "coreset": self.coreset_meta,
            "errors": [{"solution_id": s, "error": float(e)} for s, e in zip(self.solution_ids, self.errors)],
        }

    def to_csv(self):
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["solution_id", "error"])
        for s, e in zip(self.solution_ids, self.errors):
            writer.writerow([s, repr(float(e))])
        return buf.getvalue()


def coreset_cost(ps, coreset, centers, z):
    costs = point_costs(ps, centers, z, subset=coreset.indices)
    return math.fsum((coreset.weights * costs).tolist())


def distortion(ps, coreset, solutions, z, family=""):
    """Relative error ``|cost(coreset, S) - cost(P, S)| / cost(P, S)`` for each solution.

    Solutions with zero cost on the full set are skipped with a warning.
    """
    if len(coreset) and (coreset.indices.min() < 0 or coreset.indices.max() >= ps.n):
        raise IndexError("coreset index out of range")
    errors, ids, skipped = [], [], []
    w = ps.weights
    for sid, centers in enumerate(solutions):
        costs = point_costs(ps, centers, z)
        full = math.fsum((w * costs).tolist())
        if full <= 0:
            warnings.warn(f"solution {sid} has zero cost on the input; skipped", stacklevel=2)
            skipped.append(sid)
            continue
        approx = math.fsum((coreset.weights * costs[coreset.indices]).tolist())
        errors.append(abs(approx - full) / full)
        ids.append(sid)
    return DistortionReport(np.array(errors), ids, family, dict(coreset.meta), skipped)


def solution_family(ps, k, mode="random", count=100, seed=0, approx=None):
    """Candidate center sets to evaluate a coreset against.

    ``exhaustive`` lists every k-subset in lexicographic order; ``random``
    draws ``count`` k-subsets, each from its own seeded stream; ``perturbed``
    starts from the approximation's centers and swaps 1 or 2 of them for
    random non-centers, with the unperturbed solution first.
    """
    n = ps.n
    k = min(k, n)
    if mode == "exhaustive":
        if math.comb(n, k) > EXACT_LIMIT:
            raise ValueError(f"C({n},{k}) exceeds {EXACT_LIMIT} solutions")
        return [np.array(c, dtype=np.int64) for c in itertools.combinations(range(n), k)]
    if mode == "random":
        seqs = np.random.SeedSequence(seed).spawn(count)
        return [np.sort(np.random.default_rng(s).choice(n, size=k, replace=False)) for s in seqs]
    if mode == "perturbed":
        if approx is None:
            raise ValueError("perturbed family needs an approximate solution")
        base = np.asarray(approx.centers, dtype=np.int64)
        out = [base.copy()]
        rng = np.random.default_rng(seed)
        others = np.setdiff1d(np.arange(n), base)
        for _ in range(count - 1):
            if others.size == 0:
                break
            swaps = min(int(rng.integers(1, 3)), len(base), others.size)
            sol = base.copy()
            sol[rng.choice(len(base), size=swaps, replace=False)] = rng.choice(others, size=swaps, replace=False)
            out.append(sol)
        return out
    raise ValueError(f"unknown solution family {mode!r}")


def _draw(ps, probs, m, seed, tag):
    rng = np.random.default_rng(seed)
    draws = rng.choice(ps.n, size=m, p=probs)
    contrib = ps.weights[draws] / (m * probs[draws])
    summed = np.bincount(draws, weights=contrib, minlength=ps.n)
    hit = np.flatnonzero(np.bincount(draws, minlength=ps.n))
    return Coreset.from_entries([(i, summed[i], tag) for i in hit], {"m": int(m), "n": ps.n, "method": tag})


def uniform_probabilities(ps):
    return ps.weights / ps.weights.sum()


def baseline_uniform(ps, m, seed=0):
    """``m`` draws proportional to weight, each carrying ``total_weight / m``."""
    if m < 1:
        raise ValueError("m must be at least 1")
    return _draw(ps, uniform_probabilities(ps), m, seed, "uniform")


def sensitivity_probabilities(ps, approx):
    w = ps.weights
    pc = approx.point_cost_A
    total = float(w @ pc)
    size = approx.cluster_size[approx.assignment]
    k = approx.k
    share = pc / total if total > 0 else np.zeros(ps.n)
    inv = np.divide(1.0, k * size, out=np.zeros(ps.n), where=size > 0)
    raw = w * (share + inv)
    return raw / raw.sum(), raw.sum()


def baseline_sensitivity(ps, approx, m, seed=0, z=None):
    """Sensitivity sampling: ``P[p]`` proportional to ``w_p (cost(p)/cost(P) + 1/(k |C_p|))``."""
    if m < 1:
        raise ValueError("m must be at least 1")
    probs, _ = sensitivity_probabilities(ps, approx)
    return _draw(ps, probs, m, seed, "sensitivity")


def check_power_triangle(backend, a, b, c, z, beta, rtol=1e-12):
    """Both power-triangle inequalities for the triple ``(a, b, c)`` with ``S = {c}``.

    ``dist^z(a,b) <= (1+beta)^(z-1) dist^z(a,c) + (1+1/beta)^(z-1) dist^z(b,c)``
    and ``|dist^z(a,c) - dist^z(b,c)| <= beta dist^z(a,c) + (1+2z/beta)^(z-1) dist^z(a,b)``.
    ``rtol`` absorbs float rounding on exactly tight triples.
    """
    if beta <= 0:
        raise ValueError("beta must be positive")
    ab = backend.dist(a, b) ** z
    ac = backend.dist(a, c) ** z
    bc = backend.dist(b, c) ** z
    rhs1 = (1 + beta) ** (z - 1) * ac + (1 + 1 / beta) ** (z - 1) * bc
    rhs2 = beta * ac + (1 + 2 * z / beta) ** (z - 1) * ab
    ok1 = ab <= rhs1 * (1 + rtol)
    ok2 = abs(ac - bc) <= rhs2 * (1 + rtol) + rtol * max(ac, bc)
    return bool(ok1 and ok2)


def loglog_slope(sizes, errors):
    """Least-squares slope of ``log(error)`` against ``log(size)``."""
    x = np.log(np.asarray(sizes, dtype=float))
    y = np.log(np.asarray(errors, dtype=float))
    return float(np.polyfit(x, y, 1)[0])


def m_for_size(partition, size):
    """Per-group count so that sampled draws plus cheap centers total about ``size``."""
    cheap = len(np.unique(partition.cluster[partition.cheap_mask()]))
    groups = max(partition.num_groups, 1)
    return max(1, int(round((size - cheap) / groups)))


SCALING_FIELDS = ["method", "epsilon", "target_size", "seed", "m", "coreset_size", "max", "p99", "mean"]


def scaling_experiment(ps, k, z, epsilon_list, seeds, families, d_vc=None, c0=0.05, sizes=None,
                       methods=("lgs",), approx=None, approx_seed=0, whole_group_factor=4):
    """Build coresets over a grid and record their distortion.

    One row per ``(method, epsilon, size, seed)``. Without ``sizes`` the
    per-group count is the recommended one for each epsilon; with ``sizes``
    every method gets a matched budget (``m`` per group for layered
    sampling, ``size`` draws for the baselines). ``families`` is a list of
    solution lists evaluated jointly. Returns a list of dict rows with
    ``SCALING_FIELDS`` keys.
    """
    if approx is None:
        approx = approximate(ps, k, z, seed=approx_seed)
    solutions = [s for fam in families for s in fam]
    full_costs = []
    for s in solutions:
        full_costs.append(point_costs(ps, s, z))
    w = ps.weights
    totals = np.array([math.fsum((w * c).tolist()) for c in full_costs])
    keep = totals > 0
    cost_table = np.array(full_costs)[keep]
    totals = totals[keep]

    def max_err(cs):
        est = cost_table[:, cs.indices] @ cs.weights
        errs = np.abs(est - totals) / totals
        return float(errs.max()), float(np.percentile(errs, 99)), float(errs.mean())

    rows = []
    for eps in epsilon_list:
        params = PartitionParams(k=approx.k, z=z, epsilon=eps)
        part = build_partition(ps, approx, params)
        for target in sizes if sizes is not None else [None]:
            if target is None:
                m_lgs = recommended_sample_size(approx.k, eps, z, d_vc or 1, c0)
            else:
                m_lgs = m_for_size(part, target)
            for seed in seeds:
                lgs = None
                for method in methods:
                    if method == "lgs" or target is None:
                        if lgs is None:
                            lgs = sample_partition(ps, approx, part, m_lgs, seed, whole_group_factor=whole_group_factor)
                    budget = target if target is not None else len(lgs)
                    if method == "lgs":
                        cs, m = lgs, m_lgs
                    elif method == "uniform":
                        cs, m = baseline_uniform(ps, budget, seed), budget
                    elif method == "sensitivity":
                        cs, m = baseline_sensitivity(ps, approx, budget, seed), budget
                    else:
                        raise ValueError(f"unknown method {method!r}")
                    mx, p99, mean = max_err(cs)
                    rows.append({
                        "method": method, "epsilon": eps, "target_size": "" if target is None else target,
                        "seed": seed, "m": m, "coreset_size": len(cs), "max": mx, "p99": p99, "mean": mean,
                    })
    return rows


def rows_to_csv(rows, fields=SCALING_FIELDS):
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=fields, lineterminator="\n")
    writer.writeheader()
    for row in rows:
        writer.writerow({k: (repr(v) if isinstance(v, float) else v) for k, v in row.items()})
    return buf.getvalue()


def solution_ids(solutions):
    return [",".join(str(int(c)) for c in as_solution(s)) for s in solutions]
