import logging
import math
import time
from typing import Iterable, List, NamedTuple, Optional

import numpy as np

from ..clustering.firecluster import FireParams, cluster
from ..errors import MetricUndefinedError
from ..graph.affinity import AffinityGraph, KernelSpec, as_data_matrix, build_graph
from .metrics import adjusted_rand_index, purity, silhouette

logger = logging.getLogger(__name__)


class SweepRow(NamedTuple):
    c: float
    num_clusters: int
    silhouette: float
    ari: float
    purity: float
    seconds: float


def fire_temperature_sweep(W, kernel: KernelSpec, c_grid: Iterable[float], seed: int = 0,
                           truth=None) -> List[SweepRow]:
    """Cluster once per fire temperature on a shared graph.

    Silhouette is nan when a setting yields a single cluster; ARI and purity
    are nan without reference labels.
    """
    values = as_data_matrix(W)
    graph = build_graph(values, kernel)
    rows = []
    for c in sorted(float(c) for c in c_grid):
        started = time.perf_counter()
        result = cluster(graph, FireParams(c=c, rng_seed=seed), kernel=kernel)
        seconds = time.perf_counter() - started
        try:
            score = silhouette(values, result.labels)
        except MetricUndefinedError:
            score = math.nan
        ari = adjusted_rand_index(result.labels, truth) if truth is not None else math.nan
        pur = purity(result.labels, truth) if truth is not None else math.nan
        rows.append(SweepRow(c, result.num_clusters, score, ari, pur, seconds))
        logger.info(f"c={c:g}: {result.num_clusters} clusters, silhouette {score:.4f}")
    return rows


def calibrate_fire_temperature(graph: AffinityGraph, target_clusters: int, c_grid: Iterable[float],
                               seed: int = 0) -> Optional[float]:
    """Smallest c in the grid that yields exactly target_clusters, or None."""
    for c in sorted(float(c) for c in c_grid):
        if cluster(graph, FireParams(c=c, rng_seed=seed)).num_clusters == target_clusters:
            return c
    logger.warning(f"No fire temperature in the grid produced {target_clusters} clusters")
    return None


def log_grid(low: float, high: float, points: int) -> np.ndarray:
    return np.geomspace(low, high, points)
