import logging
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from scipy.spatial.distance import cdist, pdist, squareform

from ..errors import ParameterError, ValidationError

logger = logging.getLogger(__name__)


def as_data_matrix(W, min_rows: int = 2) -> np.ndarray:
    """Validate a feature matrix (rows = points) and return it as float64.

    Raises ValidationError naming the first non-finite entry.
    """
    values = np.asarray(W, dtype=np.float64)
    if values.ndim == 1:
        values = values.reshape(-1, 1)
    if values.ndim != 2:
        raise ValidationError(f"Data matrix must be 2-D, got {values.ndim} dimensions")
    n, m = values.shape
    if n < min_rows or m < 1:
        raise ValidationError(f"Data matrix needs at least {min_rows} rows and 1 column, got {n}x{m}")
    bad = np.argwhere(~np.isfinite(values))
    if len(bad):
        row, col = bad[0]
        raise ValidationError(f"Non-finite value at row {row}, column {col}")
    return values


@dataclass(frozen=True)
class KernelSpec:
    """Kernel used to turn distances into affinities"""

    variant: str
    sigma: Optional[float] = None
    k: Optional[int] = None
    alpha: Optional[float] = None

    @classmethod
    def gaussian(cls, sigma: float) -> 'KernelSpec':
        if not sigma > 0:
            raise ParameterError(f"Gaussian bandwidth sigma must be positive, got {sigma}")
        return cls('gaussian', sigma=float(sigma))

    @classmethod
    def adaptive(cls, k: int, alpha: float) -> 'KernelSpec':
        if int(k) != k or k < 1:
            raise ParameterError(f"Adaptive kernel k must be a positive integer, got {k}")
        if not alpha > 0:
            raise ParameterError(f"Adaptive kernel alpha must be positive, got {alpha}")
        return cls('adaptive', k=int(k), alpha=float(alpha))

    @property
    def is_adaptive(self) -> bool:
        return self.variant == 'adaptive'

    def describe(self) -> str:
        if self.is_adaptive:
            return f"adaptive(k={self.k}, alpha={self.alpha:g})"
        return f"gaussian(sigma={self.sigma:g})"


@dataclass(frozen=True, eq=False)
class AffinityGraph:
    """Complete weighted data graph.

    affinities is symmetric with a zero diagonal; degrees are its row sums and
    thresholds their reciprocals, with +inf for isolated vertices.
    """

    affinities: np.ndarray
    degrees: np.ndarray
    thresholds: np.ndarray
    duplicates: np.ndarray = field(default=None, repr=False)

    @classmethod
    def from_affinities(cls, affinities: np.ndarray, duplicates: Optional[np.ndarray] = None) -> 'AffinityGraph':
        np.fill_diagonal(affinities, 0.0)
        degrees = affinities.sum(axis=1)
        graph = cls(
            affinities=affinities,
            degrees=degrees,
            thresholds=degree_thresholds(degrees),
            duplicates=np.zeros(len(degrees), dtype=bool) if duplicates is None else duplicates,
        )
        for array in (graph.affinities, graph.degrees, graph.thresholds):
            array.setflags(write=False)
        isolated = int(graph.isolated.sum())
        if isolated:
            logger.warning(f"{isolated} isolated vertex(es) with zero degree; they can only form singleton clusters")
        return graph

    @property
    def n(self) -> int:
        return len(self.degrees)

    @property
    def isolated(self) -> np.ndarray:
        return self.degrees == 0


def pairwise_distances(W) -> np.ndarray:
    """Euclidean distance between every pair of rows.

    The result is exactly symmetric with a zero diagonal.
    """
    values = as_data_matrix(W)
    return squareform(pdist(values, metric='euclidean'))


def degree_thresholds(degrees: np.ndarray) -> np.ndarray:
    """Label-acceptance thresholds 1/D, +inf where the degree is zero."""
    degrees = np.asarray(degrees, dtype=np.float64)
    out = np.full(degrees.shape, np.inf)
    np.divide(1.0, degrees, out=out, where=degrees > 0)
    return out


def thresholds(graph: AffinityGraph) -> np.ndarray:
    return degree_thresholds(graph.degrees)


def gaussian_affinity(M: np.ndarray, sigma: float) -> AffinityGraph:
    """Gaussian kernel exp(-d^2 / (2 sigma^2)) on a distance matrix."""
    spec = KernelSpec.gaussian(sigma)
    return AffinityGraph.from_affinities(gaussian_kernel(np.asarray(M, dtype=np.float64), spec.sigma))


def gaussian_kernel(M: np.ndarray, sigma: float) -> np.ndarray:
    return np.exp(-np.square(M) / (2.0 * sigma * sigma))


def knn_bandwidths(distances: np.ndarray, k: int) -> tuple[np.ndarray, np.ndarray]:
    """Distance from each row's point to its k-th nearest neighbour.

    ``distances`` holds, per row, the distances to every *other* candidate
    point (self excluded or set to +inf). A zero bandwidth (k-fold duplicate)
    is replaced by the smallest positive distance in the row; rows with no
    positive distance at all keep 0 and are flagged in the returned mask.
    """
    distances = np.atleast_2d(np.asarray(distances, dtype=np.float64))
    usable = np.isfinite(distances).sum(axis=1)
    kth = np.minimum(k, np.maximum(usable, 1)) - 1
    ordered = np.sort(distances, axis=1)
    eps = ordered[np.arange(len(ordered)), kth]
    eps = np.where(np.isfinite(eps), eps, 0.0)
    zero = eps == 0
    if zero.any():
        positive = np.where(distances > 0, distances, np.inf).min(axis=1)
        eps = np.where(zero & np.isfinite(positive), positive, eps)
        substituted = int((zero & np.isfinite(positive)).sum())
        if substituted:
            logger.warning(f"{substituted} point(s) have duplicate neighbours; using their smallest positive distance as bandwidth")
    return eps, eps == 0


def adaptive_kernel(M: np.ndarray, eps_rows: np.ndarray, eps_cols: np.ndarray, alpha: float) -> np.ndarray:
    """Symmetrised alpha-decay kernel between row points and column points.

    0.5 * exp(-(d/eps_row)^alpha) + 0.5 * exp(-(d/eps_col)^alpha); a zero
    bandwidth maps distance 0 to affinity 1 and any positive distance to 0.
    """
    M = np.asarray(M, dtype=np.float64)
    return 0.5 * _decay(M, eps_rows[:, None], alpha) + 0.5 * _decay(M, eps_cols[None, :], alpha)


def _decay(M: np.ndarray, eps: np.ndarray, alpha: float) -> np.ndarray:
    eps = np.broadcast_to(eps, M.shape)
    ratio = np.full(M.shape, np.inf)
    np.divide(M, eps, out=ratio, where=eps > 0)
    ratio[M == 0] = 0.0
    return np.exp(-np.power(ratio, alpha))


def adaptive_affinity(W, k: int, alpha: float, M: Optional[np.ndarray] = None) -> AffinityGraph:
    """Adaptive k-nearest-neighbour kernel graph."""
    spec = KernelSpec.adaptive(k, alpha)
    values = as_data_matrix(W)
    n = len(values)
    if spec.k >= n:
        raise ParameterError(f"Adaptive kernel needs k < n, got k={spec.k} with n={n}")
    if M is None:
        M = pairwise_distances(values)
    others = np.array(M, dtype=np.float64)
    np.fill_diagonal(others, np.inf)
    eps, duplicates = knn_bandwidths(others, spec.k)
    if duplicates.any():
        logger.warning(f"{int(duplicates.sum())} point(s) coincide with every other point")
    # M is exactly symmetric, so A[i, j] and A[j, i] add the same two terms.
    affinities = adaptive_kernel(M, eps, eps, spec.alpha)
    return AffinityGraph.from_affinities(affinities, duplicates=duplicates)


def cross_affinity(W_a, W_b, kernel: KernelSpec, eps_a: Optional[np.ndarray] = None,
                   eps_b: Optional[np.ndarray] = None) -> np.ndarray:
    """Kernel affinities between the rows of W_a and the rows of W_b.

    The adaptive kernel needs the bandwidth of every point on both sides.
    """
    a = as_data_matrix(W_a, min_rows=1)
    b = as_data_matrix(W_b, min_rows=1)
    if a.shape[1] != b.shape[1]:
        raise ValidationError(f"Feature count mismatch: {a.shape[1]} vs {b.shape[1]} columns")
    M = cdist(a, b, metric='euclidean')
    if not kernel.is_adaptive:
        return gaussian_kernel(M, kernel.sigma)
    if eps_a is None or eps_b is None:
        raise ParameterError("Adaptive cross affinities need bandwidths for both point sets")
    return adaptive_kernel(M, np.asarray(eps_a, dtype=np.float64), np.asarray(eps_b, dtype=np.float64),
                           kernel.alpha)


def build_graph(W, kernel: KernelSpec) -> AffinityGraph:
    """Distances plus the selected kernel."""
    values = as_data_matrix(W)
    M = pairwise_distances(values)
    if kernel.is_adaptive:
        graph = adaptive_affinity(values, kernel.k, kernel.alpha, M=M)
    else:
        graph = gaussian_affinity(M, kernel.sigma)
    logger.info(f"Built {kernel.describe()} graph over {graph.n} points")
    return graph
