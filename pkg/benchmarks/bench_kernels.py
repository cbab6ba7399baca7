"""Time the compiled kernels against the numpy fallback.

    python3 benchmarks/bench_kernels.py [--repeat 5] [--n 300] [--json out.json]

Each kernel runs on the same inputs under every importable implementation.
Outputs are compared before timing, so a speedup is never reported for a
kernel that disagrees with its twin.
"""
import argparse
import json
import sys
import timeit

import numpy as np

from layered_coreset import _core


def curves(rng, n, max_len=8, dim=2):
    lens = rng.integers(1, max_len + 1, size=n)
    offsets = np.concatenate([[0], np.cumsum(lens)]).astype(np.int64)
    flat = rng.normal(size=(offsets[-1], dim))
    return flat, offsets


def cases(n, rng):
    flat, offsets = curves(rng, n)
    k, n_cand = 10, 64
    cand_cost = rng.exponential(size=(n_cand, n))
    first = rng.exponential(size=n)
    second = first + rng.exponential(size=n)
    weights = rng.uniform(0.5, 2.0, size=n)
    nearest = rng.integers(0, k, size=n).astype(np.int64)
    rows = np.ascontiguousarray(rng.exponential(size=(4 * n, 16)))
    a, b = rng.normal(size=(40, 2)), rng.normal(size=(40, 2))
    return {
        "frechet_pair(40x40)": ("frechet_pair", (a, b)),
        "hausdorff_pair(40x40)": ("hausdorff_pair", (a, b)),
        f"frechet_row(n={n})": ("frechet_row", (flat, offsets, 0)),
        f"hausdorff_row(n={n})": ("hausdorff_row", (flat, offsets, 0)),
        f"swap_costs({n_cand}x{n}, k={k})": ("swap_costs", (cand_cost, weights, first, second, nearest, k)),
        f"range_traces({4 * n}x16)": ("range_traces", (rows,)),
    }


def agree(x, y):
    if isinstance(x, float):
        return x == y
    x, y = np.asarray(x), np.asarray(y)
    if x.dtype.kind == "f":
        return x.shape == y.shape and np.allclose(x, y, rtol=1e-12, atol=0)
    return np.array_equal(x, y)


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--n", type=int, default=300)
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--json", help="also write results here")
    args = ap.parse_args(argv)

    impls = _core.implementations()
    print(f"active backend: {_core.BACKEND}; available: {', '.join(impls)}")
    if "cython" not in impls:
        print("compiled extension not importable; timing the fallback only")
    results = []
    for label, (name, inputs) in cases(args.n, np.random.default_rng(args.seed)).items():
        outs = {impl: getattr(mod, name)(*inputs) for impl, mod in impls.items()}
        ref = outs["python"]
        ok = all(agree(ref, o) for o in outs.values())
        row = {"kernel": label, "agree": ok}
        for impl, mod in impls.items():
            fn = getattr(mod, name)
            timer = timeit.Timer(lambda: fn(*inputs))
            loops, _ = timer.autorange()
            row[impl] = min(timer.repeat(args.repeat, loops)) / loops
        if "cython" in row:
            row["speedup"] = row["python"] / row["cython"]
        results.append(row)

    width = max(len(r["kernel"]) for r in results)
    print(f"{'kernel':<{width}}  {'python':>11}  {'cython':>11}  {'speedup':>8}  agree")
    for r in results:
        cy = f"{r['cython'] * 1e3:9.3f}ms" if "cython" in r else f"{'-':>11}"
        sp = f"{r['speedup']:7.1f}x" if "speedup" in r else f"{'-':>8}"
        print(f"{r['kernel']:<{width}}  {r['python'] * 1e3:9.3f}ms  {cy}  {sp}  {r['agree']}")
    if args.json:
        with open(args.json, "w") as fh:
            json.dump({"backend": _core.BACKEND, "results": results}, fh, indent=2)
    return 0 if all(r["agree"] for r in results) else 1


if __name__ == "__main__":
    sys.exit(main())
