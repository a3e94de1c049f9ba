import logging
import math
from dataclasses import dataclass
from typing import NamedTuple, Sequence

import numpy as np

from ..errors import ParameterError, ValidationError
from ..graph.affinity import as_data_matrix
from ..utils.parallel import make_rng

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class MixtureSpec:
    """Isotropic 2-D Gaussians evenly spaced on a circle"""

    n: int
    k: int
    sigma: float
    radius: float = 1.0
    seed: int = 0

    def __post_init__(self):
        if self.k < 1:
            raise ParameterError(f"Mixture needs at least one component, got k={self.k}")
        if self.n < self.k:
            raise ParameterError(f"Mixture needs at least one point per component, got n={self.n}, k={self.k}")
        if not self.sigma > 0:
            raise ParameterError(f"Component sigma must be positive, got {self.sigma}")
        if not self.radius > 0:
            raise ParameterError(f"Circle radius must be positive, got {self.radius}")

    def angles(self) -> np.ndarray:
        return 2.0 * np.pi * np.arange(self.k) / self.k


class Dataset(NamedTuple):
    points: np.ndarray
    labels: np.ndarray


class DoubletSample(NamedTuple):
    points: np.ndarray
    is_doublet: np.ndarray
    origin: np.ndarray


def circle_centers(angles: Sequence[float], radius: float = 1.0) -> np.ndarray:
    angles = np.asarray(angles, dtype=np.float64)
    return radius * np.column_stack([np.cos(angles), np.sin(angles)])


def equal_allocation(n: int, k: int) -> np.ndarray:
    """Component sizes differing by at most one."""
    sizes = np.full(k, n // k)
    sizes[: n % k] += 1
    return sizes


def _sample(centers: np.ndarray, n: int, sigma: float, seed: int) -> Dataset:
    rng = make_rng(seed)
    labels = np.repeat(np.arange(1, len(centers) + 1), equal_allocation(n, len(centers)))
    points = centers[labels - 1] + rng.normal(0.0, sigma, size=(n, 2))
    order = rng.permutation(n)
    return Dataset(points[order], labels[order])


def gaussian_circle(spec: MixtureSpec) -> Dataset:
    """Sample the mixture; labels are 1-based component indices in angle order."""
    return _sample(circle_centers(spec.angles(), spec.radius), spec.n, spec.sigma, spec.seed)


def holdout_split(spec_train: MixtureSpec, spec_test: MixtureSpec) -> tuple[Dataset, Dataset]:
    """Training mixture plus a test mixture that adds unseen components.

    The first spec_train.k test components sit on the training centers; the
    remaining ones take the test circle's even angles not used in training.
    """
    if spec_test.k < spec_train.k:
        raise ParameterError(f"Test mixture needs at least {spec_train.k} components, got {spec_test.k}")
    if not math.isclose(spec_train.radius, spec_test.radius):
        raise ParameterError("Training and test mixtures must share the circle radius")
    seen = spec_train.angles()
    novel = [a for a in spec_test.angles()
             if not np.any(np.isclose(np.mod(a - seen + np.pi, 2 * np.pi) - np.pi, 0.0, atol=1e-12))]
    angles = np.concatenate([seen, novel[: spec_test.k - spec_train.k]])
    train = gaussian_circle(spec_train)
    test = _sample(circle_centers(angles, spec_test.radius), spec_test.n, spec_test.sigma, spec_test.seed)
    return train, test


def gaussian_line(n: int, mu: float = 0.0, sigma: float = 1.0, seed: int = 0) -> np.ndarray:
    """n draws from N(mu, sigma^2) as an n x 1 matrix."""
    if not sigma > 0:
        raise ParameterError(f"sigma must be positive, got {sigma}")
    return make_rng(seed).normal(mu, sigma, size=(n, 1))


def make_doublets(W, labels, count: int, seed: int = 0) -> DoubletSample:
    """Replace 2*count rows by count synthetic heterotypic doublets.

    Each doublet sums two rows from different clusters, drawn without
    replacement; the parent rows are dropped. Surviving rows keep their order
    and the doublets follow. origin holds the source row(s) of every output
    row, with -1 in the second column for singlets.
    """
    values = as_data_matrix(W)
    labels = np.asarray(labels).ravel()
    if labels.size != len(values):
        raise ValidationError(f"Expected {len(values)} labels, got {labels.size}")
    if count < 0:
        raise ParameterError(f"Doublet count must be non-negative, got {count}")
    if count == 0:
        origin = np.column_stack([np.arange(len(values)), np.full(len(values), -1)])
        return DoubletSample(values.copy(), np.zeros(len(values), dtype=bool), origin)

    ids, sizes = np.unique(labels, return_counts=True)
    if len(ids) < 2:
        raise ParameterError("Doublets need at least two clusters")
    if 2 * count > len(values) or count > len(values) - sizes.max():
        raise ParameterError(f"Cannot draw {count} cross-cluster pairs from {len(values)} rows")

    rng = make_rng(seed)
    remaining = np.ones(len(values), dtype=bool)
    pairs = []
    for done in range(count):
        needed = count - done
        pool = np.flatnonzero(remaining)
        pool_labels = labels[pool]
        ids, sizes = np.unique(pool_labels, return_counts=True)
        largest = ids[np.argmax(sizes)]
        # Once the largest cluster is the binding constraint, it must supply a parent.
        if needed >= len(pool) - sizes.max():
            first = rng.choice(pool[pool_labels == largest])
        else:
            first = rng.choice(pool)
        second = rng.choice(pool[pool_labels != labels[first]])
        remaining[[first, second]] = False
        pairs.append((int(first), int(second)))

    pairs = np.asarray(pairs)
    kept = np.flatnonzero(remaining)
    points = np.vstack([values[kept], values[pairs[:, 0]] + values[pairs[:, 1]]])
    is_doublet = np.concatenate([np.zeros(len(kept), dtype=bool), np.ones(count, dtype=bool)])
    origin = np.vstack([np.column_stack([kept, np.full(len(kept), -1)]), pairs])
    logger.info(f"Synthesised {count} doublets; {len(points)} rows remain")
    return DoubletSample(points, is_doublet, origin)
