"""Readers and writers for the command-line file formats.

points   one row per point, comma-separated floats, optional trailing ``weight=<w>``
matrix   n rows of n comma-separated floats
graph    ``u v w`` per line, 0-based vertex ids, positive weights
curves   one curve per line, vertices ``x,y;x,y;...``
sets     one point set per line, same syntax as curves
coreset  CSV ``point_index,weight,group_tag`` with a header row
"""
import csv
import io
import json
import math

import numpy as np

from .metrics import DiscreteFrechet, Euclidean, ExplicitMatrix, GraphShortestPath, Hausdorff, PointSet
from .sampler import Coreset

FORMATS = ("points", "matrix", "graph", "curves", "sets")


class InputError(ValueError):
    """Malformed input file; the message names the offending line."""


def _lines(path):
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.strip()
            if line and not line.startswith("#"):
                yield lineno, line


def _float(tok, path, lineno):
    try:
        val = float(tok)
    except ValueError:
        raise InputError(f"{path}:{lineno}: cannot parse {tok.strip()!r} as a number") from None
    if not math.isfinite(val):
        raise InputError(f"{path}:{lineno}: non-finite value {tok.strip()!r}")
    return val


def read_points(path):
    coords, weights, dim = [], [], None
    for lineno, line in _lines(path):
        toks = [t.strip() for t in line.split(",")]
        w = 1.0
        if toks and toks[-1].startswith("weight="):
            w = _float(toks.pop()[len("weight="):], path, lineno)
            if w < 0:
                raise InputError(f"{path}:{lineno}: negative weight")
        row = [_float(t, path, lineno) for t in toks]
        if not row:
            raise InputError(f"{path}:{lineno}: no coordinates")
        if dim is None:
            dim = len(row)
        elif len(row) != dim:
            raise InputError(f"{path}:{lineno}: expected {dim} coordinates, got {len(row)}")
        coords.append(row)
        weights.append(w)
    if not coords:
        raise InputError(f"{path}: no points")
    return PointSet(Euclidean(np.array(coords)), np.array(weights))


def read_matrix(path):
    rows = []
    for lineno, line in _lines(path):
        rows.append([_float(t, path, lineno) for t in line.split(",")])
        if len(rows[-1]) != len(rows[0]):
            raise InputError(f"{path}:{lineno}: expected {len(rows[0])} columns, got {len(rows[-1])}")
    if not rows:
        raise InputError(f"{path}: empty matrix")
    try:
        return PointSet(ExplicitMatrix(np.array(rows)))
    except ValueError as exc:
        raise InputError(f"{path}: {exc}") from None


def read_graph(path):
    edges = []
    for lineno, line in _lines(path):
        toks = line.split()
        if len(toks) != 3:
            raise InputError(f"{path}:{lineno}: expected 'u v w'")
        try:
            u, v = int(toks[0]), int(toks[1])
        except ValueError:
            raise InputError(f"{path}:{lineno}: vertex ids must be integers") from None
        w = _float(toks[2], path, lineno)
        if u < 0 or v < 0 or w <= 0:
            raise InputError(f"{path}:{lineno}: need nonnegative ids and a positive weight")
        edges.append((u, v, w))
    if not edges:
        raise InputError(f"{path}: no edges")
    try:
        return PointSet(GraphShortestPath(edges))
    except ValueError as exc:
        raise InputError(f"{path}: {exc}") from None


def _read_sequences(path):
    items, dim = [], None
    for lineno, line in _lines(path):
        verts = []
        for vert in line.split(";"):
            vert = vert.strip()
            if not vert:
                continue
            verts.append([_float(t, path, lineno) for t in vert.split(",")])
        if not verts:
            raise InputError(f"{path}:{lineno}: empty curve")
        lens = {len(v) for v in verts}
        if len(lens) != 1 or (dim is not None and lens != {dim}):
            raise InputError(f"{path}:{lineno}: inconsistent vertex dimension")
        dim = lens.pop()
        items.append(np.array(verts))
    if not items:
        raise InputError(f"{path}: no curves")
    return items


def read_curves(path):
    return PointSet(DiscreteFrechet(_read_sequences(path)))


def read_sets(path):
    return PointSet(Hausdorff(_read_sequences(path)))


READERS = {"points": read_points, "matrix": read_matrix, "graph": read_graph, "curves": read_curves, "sets": read_sets}


def read_input(path, fmt):
    if fmt not in READERS:
        raise InputError(f"unknown format {fmt!r}")
    try:
        return READERS[fmt](path)
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from None


def coreset_csv(coreset):
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["point_index", "weight", "group_tag"])
    for idx, wt, tag in zip(coreset.indices.tolist(), coreset.weights.tolist(), coreset.tags):
        writer.writerow([idx, repr(float(wt)), tag])
    return buf.getvalue()


def write_coreset(coreset, path):
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(coreset_csv(coreset))


def read_coreset(path):
    try:
        fh = open(path, encoding="utf-8", newline="")
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from None
    entries = []
    with fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header != ["point_index", "weight", "group_tag"]:
            raise InputError(f"{path}:1: expected header point_index,weight,group_tag")
        for lineno, row in enumerate(reader, start=2):
            if len(row) != 3:
                raise InputError(f"{path}:{lineno}: expected 3 fields")
            try:
                idx = int(row[0])
            except ValueError:
                raise InputError(f"{path}:{lineno}: bad point index {row[0]!r}") from None
            wt = _float(row[1], path, lineno)
            if wt <= 0:
                raise InputError(f"{path}:{lineno}: weights must be positive")
            entries.append((idx, wt, row[2]))
    if len({e[0] for e in entries}) != len(entries):
        raise InputError(f"{path}: duplicate point indices")
    return Coreset.from_entries(entries)


def write_json(obj, path):
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(obj, fh, indent=2, sort_keys=True)
        fh.write("\n")


def read_json(path):
    try:
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from None
    except json.JSONDecodeError as exc:
        raise InputError(f"{path}:{exc.lineno}: invalid JSON") from None


def write_partition(partition, path):
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["point_index", "cluster", "group_tag", "j", "b", "ell"])
        writer.writerows(partition.rows())
