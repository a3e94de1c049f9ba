from dataclasses import dataclass

import numpy as np
from sklearn.metrics import adjusted_rand_score, silhouette_samples
from sklearn.metrics.cluster import contingency_matrix

from ..errors import MetricUndefinedError, ValidationError
from ..graph.affinity import pairwise_distances


@dataclass(frozen=True, eq=False)
class ContingencyTable:
    """Joint counts: rows are predicted clusters, columns reference clusters"""

    counts: np.ndarray
    pred_ids: np.ndarray
    truth_ids: np.ndarray

    @property
    def row_totals(self) -> np.ndarray:
        return self.counts.sum(axis=1)

    @property
    def col_totals(self) -> np.ndarray:
        return self.counts.sum(axis=0)

    @property
    def total(self) -> int:
        return int(self.counts.sum())


def _paired(pred, truth) -> tuple[np.ndarray, np.ndarray]:
    pred = np.asarray(pred).ravel()
    truth = np.asarray(truth).ravel()
    if pred.shape != truth.shape:
        raise ValidationError(f"Label vectors differ in length: {pred.size} predicted vs {truth.size} reference")
    if not pred.size:
        raise ValidationError("Label vectors are empty")
    return pred, truth


def contingency(pred, truth) -> ContingencyTable:
    pred, truth = _paired(pred, truth)
    return ContingencyTable(
        counts=contingency_matrix(pred, truth),
        pred_ids=np.unique(pred),
        truth_ids=np.unique(truth),
    )


def purity(pred, truth) -> float:
    """Share of points that fall in their predicted cluster's dominant reference class."""
    table = contingency(pred, truth)
    return float(table.counts.max(axis=1).sum() / table.total)


def purity_by_truth(pred, truth) -> float:
    """Reverse direction: dominant predicted cluster per reference class."""
    table = contingency(pred, truth)
    return float(table.counts.max(axis=0).sum() / table.total)


def adjusted_rand_index(pred, truth) -> float:
    pred, truth = _paired(pred, truth)
    if pred.size < 2:
        raise ValidationError("Adjusted Rand index needs at least two points")
    return float(adjusted_rand_score(truth, pred))


def silhouette(W, labels) -> float:
    """Mean silhouette over L2 distances; points in singleton clusters score 0."""
    D = pairwise_distances(W)
    labels = np.asarray(labels).ravel()
    if labels.size != len(D):
        raise ValidationError(f"Expected {len(D)} labels, got {labels.size}")
    n_clusters = len(np.unique(labels))
    if n_clusters < 2:
        raise MetricUndefinedError("Silhouette needs at least two clusters")
    if n_clusters == len(labels):
        return 0.0
    return float(np.mean(silhouette_samples(D, labels, metric='precomputed')))
