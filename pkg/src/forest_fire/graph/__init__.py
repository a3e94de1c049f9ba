from .affinity import (
    AffinityGraph,
    KernelSpec,
    adaptive_affinity,
    build_graph,
    cross_affinity,
    gaussian_affinity,
    pairwise_distances,
    thresholds,
)

__all__ = [
    'AffinityGraph',
    'KernelSpec',
    'adaptive_affinity',
    'build_graph',
    'cross_affinity',
    'gaussian_affinity',
    'pairwise_distances',
    'thresholds',
]
