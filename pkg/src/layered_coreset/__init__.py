"""Layered group sampling coresets for (k, z)-clustering over general metrics."""
from ._core import BACKEND as KERNEL_BACKEND
from .approx import ApproxSolution, approximate, assign, dz_seed, exact_kmedian, local_search_refine
from .metrics import (
    DiscreteFrechet,
    Euclidean,
    ExplicitMatrix,
    GraphShortestPath,
    Hausdorff,
    PointSet,
    discrete_frechet,
    hausdorff,
    point_cost,
    set_cost,
)
from .partition import GroupKey, GroupPartition, PartitionParams, build_partition, layer_of, ring_index
from .sampler import Coreset, build_coreset, recommended_sample_size

__version__ = "0.1.0"
