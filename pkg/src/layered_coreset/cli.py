"""Command-line front end.

Exit codes: 0 success, 2 usage or input error, 3 internal assertion.
"""
import argparse
import json
import os
import sys

import numpy as np

from . import evaluation, io, sampler
from .approx import approximate
from .partition import PartitionParams, build_partition
from .vcdim import BallRangeSpace, estimate_vc

VC_MAX_N = 64


class UsageError(Exception):
    pass


def _add_input(p):
    grp = p.add_argument_group("input")
    for fmt in io.FORMATS:
        grp.add_argument(f"--{fmt}", metavar="PATH", help=f"input file in {fmt} format")
    grp.add_argument("--input", metavar="PATH", help="input file; needs --format")
    grp.add_argument("--format", choices=io.FORMATS)


def _resolve_input(args):
    given = [(fmt, getattr(args, fmt)) for fmt in io.FORMATS if getattr(args, fmt)]
    if args.input:
        if not args.format:
            raise UsageError("--input needs --format")
        given.append((args.format, args.input))
    if len(given) != 1:
        raise UsageError("give exactly one input file (--points, --matrix, --graph, --curves, --sets or --input)")
    fmt, path = given[0]
    return fmt, path


def _add_problem(p, defaults=True):
    p.add_argument("--k", type=int, default=None if not defaults else 5)
    p.add_argument("--z", type=int, default=None if not defaults else 1)
    p.add_argument("--epsilon", type=float, default=0.1)
    p.add_argument("--d-vc", type=int, default=None, help="VC dimension of metric balls; default from the metric kind")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--c0", type=float, default=sampler.DEFAULT_C0)
    p.add_argument("--max-swaps", type=int, default=None, help="local search swaps; default 50*k")
    p.add_argument("--threads", type=int, default=None,
                   help="sampling threads; default $LAYERED_CORESET_THREADS or 1")


def _validate(k, z, eps):
    if k is None or k < 1:
        raise UsageError("--k must be at least 1")
    if z not in (1, 2):
        raise UsageError("--z must be 1 or 2")
    if not 0 < eps < 0.5:
        raise UsageError("--epsilon must lie in (0, 0.5)")


def _d_vc(args, ps):
    if args.d_vc is not None:
        if args.d_vc < 1:
            raise UsageError("--d-vc must be at least 1")
        return args.d_vc
    b = ps.backend
    if b.kind in ("frechet", "hausdorff"):
        m = int(np.diff(b.offsets).max())
        return sampler.vc_dimension_hint(b.kind, dim=b.dim, ell=m, m=m)
    return sampler.vc_dimension_hint(b.kind, dim=getattr(b, "dim", 1), n=b.n)


def _config(args):
    return {k: v for k, v in sorted(vars(args).items()) if k != "func"}


def cmd_build(args):
    fmt, path = _resolve_input(args)
    _validate(args.k, args.z, args.epsilon)
    ps = io.read_input(path, fmt)
    k = min(args.k, ps.n)
    d_vc = _d_vc(args, ps)
    approx = approximate(ps, k, args.z, seed=args.seed, max_swaps=args.max_swaps)
    params = PartitionParams(k=k, z=args.z, epsilon=args.epsilon)
    part = build_partition(ps, approx, params)
    m = args.m if args.m is not None else sampler.recommended_sample_size(k, args.epsilon, args.z, d_vc, args.c0)
    meta = {"k": k, "z": args.z, "epsilon": args.epsilon, "d_vc": d_vc, "seed": args.seed, "c0": args.c0}
    cs = sampler.sample_partition(ps, approx, part, m, args.seed, threads=args.threads, meta=meta)
    os.makedirs(args.out_dir, exist_ok=True)
    io.write_coreset(cs, os.path.join(args.out_dir, "coreset.csv"))
    meta = dict(cs.meta)
    meta.update({
        "format": fmt,
        "input": path,
        "centers": [int(c) for c in approx.centers],
        "approx_cost": approx.cost,
        "total_weight": cs.total_weight,
        "config": _config(args),
    })
    io.write_json(meta, os.path.join(args.out_dir, "meta.json"))
    if args.dump_partition:
        io.write_partition(part, os.path.join(args.out_dir, "partition.csv"))
    print(f"coreset of {len(cs)} points from {ps.n} ({cs.meta['groups']} groups, m={m})")
    return 0


def cmd_evaluate(args):
    fmt, path = _resolve_input(args)
    ps = io.read_input(path, fmt)
    cs = io.read_coreset(args.coreset)
    meta_path = args.meta or os.path.join(os.path.dirname(os.path.abspath(args.coreset)), "meta.json")
    meta = io.read_json(meta_path) if (args.meta or os.path.exists(meta_path)) else {}
    if meta:
        if meta.get("coreset_size") != len(cs):
            raise UsageError(f"metadata lists {meta.get('coreset_size')} entries but the coreset has {len(cs)}")
        if meta.get("n") != ps.n:
            raise UsageError(f"metadata is for n={meta.get('n')} but the input has {ps.n} points")
    if len(cs) and cs.indices.max() >= ps.n:
        raise UsageError(f"coreset index {int(cs.indices.max())} out of range for {ps.n} points")
    cs.meta = dict(meta)
    k = args.k if args.k is not None else meta.get("k")
    z = args.z if args.z is not None else meta.get("z", 1)
    _validate(k, z, 0.25)
    k = min(k, ps.n)
    approx = None
    if args.family == "perturbed":
        approx = approximate(ps, k, z, seed=args.seed, max_swaps=args.max_swaps)
    mode = {"exhaustive": "exhaustive", "random": "random", "perturbed": "perturbed"}[args.family]
    sols = evaluation.solution_family(ps, k, mode, count=args.count, seed=args.seed, approx=approx)
    report = evaluation.distortion(ps, cs, sols, z, family=args.family)
    ids = evaluation.solution_ids(sols)
    report.solution_ids = [ids[i] for i in report.solution_ids]
    out = report.to_dict()
    out["config"] = _config(args)
    if args.out:
        io.write_json(out, args.out)
    else:
        json.dump(out, sys.stdout, indent=2, sort_keys=True)
        sys.stdout.write("\n")
    if args.errors_csv:
        with open(args.errors_csv, "w", encoding="utf-8", newline="") as fh:
            fh.write(report.to_csv())
    return 0


def _int_list(text, name):
    try:
        if ":" in text:
            lo, hi = text.split(":")
            return list(range(int(lo), int(hi)))
        return [int(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise UsageError(f"--{name} expects comma-separated integers or lo:hi") from None


def cmd_bench(args):
    fmt, path = _resolve_input(args)
    _validate(args.k, args.z, args.epsilon)
    ps = io.read_input(path, fmt)
    methods = [m.strip() for m in args.methods.split(",") if m.strip()]
    bad = set(methods) - {"lgs", "uniform", "sensitivity"}
    if bad or not methods:
        raise UsageError(f"unknown methods: {', '.join(sorted(bad)) or '(none)'}")
    sizes = _int_list(args.sizes, "sizes")
    seeds = _int_list(args.seeds, "seeds")
    if not sizes or min(sizes) < 1 or not seeds:
        raise UsageError("--sizes and --seeds must be nonempty, sizes positive")
    k = min(args.k, ps.n)
    approx = approximate(ps, k, args.z, seed=args.seed, max_swaps=args.max_swaps)
    families = []
    for fam in args.families.split(","):
        fam = fam.strip()
        if fam not in ("random", "perturbed", "exhaustive"):
            raise UsageError(f"unknown family {fam!r}")
        families.append(evaluation.solution_family(ps, k, fam, count=args.count, seed=args.seed, approx=approx))
    rows = evaluation.scaling_experiment(
        ps, k, args.z, [args.epsilon], seeds, families, d_vc=_d_vc(args, ps), c0=args.c0,
        sizes=sizes, methods=methods, approx=approx,
    )
    text = evaluation.rows_to_csv(rows)
    if args.out:
        with open(args.out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return 0


def cmd_vc_estimate(args):
    fmt, path = _resolve_input(args)
    ps = io.read_input(path, fmt)
    if ps.n > VC_MAX_N:
        raise UsageError(f"vc-estimate handles at most {VC_MAX_N} points, got {ps.n}")
    grid = args.center_grid
    if grid is None:
        grid = 16 if ps.backend.kind == "euclidean" and ps.backend.dim <= 3 else 0
    rs = BallRangeSpace(ps, k_fold=args.k_fold, center_grid=grid)
    est = estimate_vc(rs, max_d=args.max_d, budget=args.budget, seed=args.seed)
    out = est.to_dict()
    out["config"] = _config(args)
    if args.out:
        io.write_json(out, args.out)
    else:
        json.dump(out, sys.stdout, indent=2, sort_keys=True)
        sys.stdout.write("\n")
    return 0


def build_parser():
    parser = argparse.ArgumentParser(prog="layered-coreset", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("build", help="construct a coreset by layered group sampling")
    _add_input(p)
    _add_problem(p)
    p.add_argument("--m", type=int, default=None, help="per-group sample count (overrides the recommended size)")
    p.add_argument("--out-dir", default=".", help="directory for coreset.csv and meta.json")
    p.add_argument("--dump-partition", action="store_true", help="also write partition.csv")
    p.set_defaults(func=cmd_build)

    p = sub.add_parser("evaluate", help="measure a coreset's distortion over candidate solutions")
    _add_input(p)
    p.add_argument("--coreset", required=True)
    p.add_argument("--meta", default=None, help="metadata JSON; default meta.json beside the coreset")
    p.add_argument("--k", type=int, default=None)
    p.add_argument("--z", type=int, default=None)
    p.add_argument("--family", choices=("exhaustive", "random", "perturbed"), default="random")
    p.add_argument("--count", type=int, default=200)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--max-swaps", type=int, default=None)
    p.add_argument("--out", default=None, help="report JSON path; stdout when omitted")
    p.add_argument("--errors-csv", default=None, help="long-form solution_id,error CSV")
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("bench", help="compare samplers across coreset sizes and seeds")
    _add_input(p)
    _add_problem(p)
    p.add_argument("--methods", default="lgs,uniform,sensitivity")
    p.add_argument("--sizes", default="100,200,400,800")
    p.add_argument("--seeds", default="0:5")
    p.add_argument("--families", default="random,perturbed")
    p.add_argument("--count", type=int, default=50)
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("vc-estimate", help="estimate the VC dimension of metric balls")
    _add_input(p)
    p.add_argument("--k-fold", type=int, default=1)
    p.add_argument("--max-d", type=int, default=None)
    p.add_argument("--budget", type=int, default=10**5)
    p.add_argument("--center-grid", type=int, default=None,
                   help="synthetic centers per axis (Euclidean only); default 16 for d <= 3")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_vc_estimate)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (UsageError, io.InputError, ValueError, IndexError) as exc:
        msg = str(exc).splitlines()[0] if str(exc) else type(exc).__name__
        print(f"error: {msg}", file=sys.stderr)
        return 2
    except AssertionError as exc:
        print(f"internal error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
