"""Kernel selection.

The compiled extension is used when it imports; otherwise the numpy
fallback. Setting ``LAYERED_CORESET_PURE=1`` forces the fallback.
"""
import os

from . import _fallback

KERNEL_FUNCTIONS = (
    "frechet_pair",
    "hausdorff_pair",
    "directed_hausdorff_pair",
    "frechet_row",
    "hausdorff_row",
    "swap_costs",
    "range_traces",
)

_impl = _fallback
BACKEND = "python"
if os.environ.get("LAYERED_CORESET_PURE", "") not in ("1", "true", "yes"):
    try:
        from . import _kernels as _impl  # noqa: F811

        BACKEND = "cython"
    except ImportError:
        _impl = _fallback

frechet_pair = _impl.frechet_pair
hausdorff_pair = _impl.hausdorff_pair
directed_hausdorff_pair = _impl.directed_hausdorff_pair
frechet_row = _impl.frechet_row
hausdorff_row = _impl.hausdorff_row
swap_costs = _impl.swap_costs
range_traces = _impl.range_traces


def implementations():
    """Return ``{name: module}`` for every importable kernel implementation."""
    out = {"python": _fallback}
    try:
        from . import _kernels

        out["cython"] = _kernels
    except ImportError:
        pass
    return out
