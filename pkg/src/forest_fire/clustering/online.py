import logging
import math
from dataclasses import dataclass

import numpy as np
from scipy.spatial.distance import cdist

from ..errors import ParameterError, ValidationError
from ..graph.affinity import (
    AffinityGraph,
    KernelSpec,
    as_data_matrix,
    cross_affinity,
    degree_thresholds,
    knn_bandwidths,
    pairwise_distances,
)
from .firecluster import UNLABELED, HeatTrace, TraceEntry, propagate

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class OnlineResult:
    """Labels of the streamed points, in input order"""

    labels: np.ndarray
    new_clusters: tuple
    trace: HeatTrace

    @property
    def is_new(self) -> np.ndarray:
        return np.isin(self.labels, self.new_clusters)


def _stream_graph(W_train: np.ndarray, W_new: np.ndarray, kernel: KernelSpec) -> AffinityGraph:
    """Affinities over training + streamed points with stream-visible thresholds.

    A streamed point's degree (and adaptive bandwidth) only counts the points
    that precede it: the training set and earlier streamed points.
    """
    n_train = len(W_train)
    points = np.vstack([W_train, W_new])
    eps = None
    if kernel.is_adaptive:
        if kernel.k >= n_train:
            raise ParameterError(f"Adaptive kernel needs k < training size, got k={kernel.k} with {n_train} points")
        train_others = pairwise_distances(W_train)
        np.fill_diagonal(train_others, np.inf)
        eps, _ = knn_bandwidths(train_others, kernel.k)
        ahead = cdist(W_new, points, metric='euclidean')
        streamed = [knn_bandwidths(ahead[r, :n_train + r], kernel.k)[0][0] for r in range(len(W_new))]
        eps = np.concatenate([eps, np.asarray(streamed, dtype=np.float64)])
    affinities = cross_affinity(points, points, kernel, eps, eps)
    np.fill_diagonal(affinities, 0.0)

    degrees = affinities[:n_train, :n_train].sum(axis=1)
    visible = np.array([affinities[v, :v].sum() for v in range(n_train, len(points))], dtype=np.float64)
    degrees = np.concatenate([degrees, visible])
    return AffinityGraph(affinities=affinities, degrees=degrees, thresholds=degree_thresholds(degrees))


def online_assign(W_train, labels_train, W_new, kernel: KernelSpec, c: float) -> OnlineResult:
    """Extend a finished clustering to new points, one point at a time.

    Each point joins the existing cluster with the largest average heat among
    those reaching its threshold (ties go to the lowest id). When none does it
    opens a fresh cluster, which immediately propagates over the points that
    have not been streamed yet. Training labels are never revised.
    """
    if not (c > 0 and math.isfinite(c)):
        raise ParameterError(f"Fire temperature c must be a positive finite number, got {c}")
    W_train = as_data_matrix(W_train)
    W_new = as_data_matrix(W_new, min_rows=1)
    if W_train.shape[1] != W_new.shape[1]:
        raise ValidationError(
            f"Feature count mismatch: training data has {W_train.shape[1]} columns, new data has {W_new.shape[1]}")
    labels_train = np.asarray(labels_train, dtype=np.int64)
    if labels_train.shape != (len(W_train),):
        raise ValidationError(f"Expected {len(W_train)} training labels, got {labels_train.size}")
    if np.any(labels_train <= UNLABELED):
        raise ValidationError("Training labels must all be positive cluster ids")

    n_train = len(W_train)
    graph = _stream_graph(W_train, W_new, kernel)
    labels = np.concatenate([labels_train, np.zeros(len(W_new), dtype=np.int64)])
    trace = HeatTrace()
    next_id = int(labels_train.max()) + 1
    fresh = []

    for v in range(n_train, graph.n):
        if labels[v] != UNLABELED:
            continue
        members = np.flatnonzero(labels != UNLABELED)
        member_labels = labels[members]
        sums = np.bincount(member_labels, weights=graph.affinities[v, members], minlength=next_id)
        counts = np.bincount(member_labels, minlength=next_id)
        heat = np.full(next_id, -np.inf)
        np.divide(c * sums, counts, out=heat, where=counts > 0)
        best = int(np.argmax(heat))
        if heat[best] >= graph.thresholds[v]:
            labels[v] = best
            trace.record(v, best, heat[best])
            continue
        propagate(graph, labels, v, next_id, c, trace)
        fresh.append(next_id)
        logger.debug(f"Streamed point {v - n_train} opened cluster {next_id}")
        next_id += 1

    new_labels = labels[n_train:].copy()
    new_labels.setflags(write=False)
    local = HeatTrace(TraceEntry(e.step, e.vertex - n_train, e.cluster, e.heat) for e in trace)
    logger.info(f"Extended labels to {len(W_new)} points; opened {len(fresh)} new cluster(s)")
    return OnlineResult(labels=new_labels, new_clusters=tuple(fresh), trace=local)
