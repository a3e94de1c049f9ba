import logging
import math
import time
from dataclasses import dataclass
from typing import Dict, Sequence

import numpy as np
from joblib import Parallel, delayed
from scipy.stats import entropy as shannon_entropy

from ..errors import ParameterError, ValidationError
from ..graph.affinity import AffinityGraph
from ..utils.parallel import make_rng, resolve_workers
from .firecluster import UNLABELED, ClusterResult, propagate

logger = logging.getLogger(__name__)

DEFAULT_TRIALS = 300
DEFAULT_ALPHA = 0.05


@dataclass(frozen=True, eq=False)
class ValidationReport:
    """Posterior label counts from Monte Carlo re-propagation.

    posterior_counts[i, l] counts the trials in which vertex i ended with
    label l; column 0 counts the trials that never reached it.
    """

    labels: np.ndarray
    posterior_counts: np.ndarray
    trials: int
    num_clusters: int
    alpha: float = DEFAULT_ALPHA

    @property
    def coverage(self) -> np.ndarray:
        return self.posterior_counts[:, 1:].sum(axis=1)

    @property
    def zero_coverage(self) -> np.ndarray:
        return self.coverage == 0

    @property
    def matches(self) -> np.ndarray:
        return self.posterior_counts[np.arange(len(self.labels)), self.labels]

    @property
    def p_values(self) -> np.ndarray:
        # Unreached trials count as mismatches.
        return (self.trials - self.matches) / self.trials

    @property
    def conditional_p_values(self) -> np.ndarray:
        """Mismatch rate among the trials that reached each vertex (1 when none did)."""
        coverage = self.coverage
        out = np.ones(len(self.labels))
        np.divide(coverage - self.matches, coverage, out=out, where=coverage > 0)
        return out

    @property
    def entropies(self) -> np.ndarray:
        """Shannon entropy (nats) of each vertex's reached-label distribution."""
        counts = self.posterior_counts[:, 1:]
        out = np.full(len(self.labels), math.log(max(self.num_clusters, 1)))
        reached = ~self.zero_coverage
        if reached.any():
            out[reached] = shannon_entropy(counts[reached], axis=1)
        return out

    def posterior(self, i: int) -> Dict[int, int]:
        row = self.posterior_counts[i]
        return {int(label): int(row[label]) for label in np.flatnonzero(row) if label != UNLABELED}

    def significant(self, alpha: float = None, conditional: bool = False) -> np.ndarray:
        return significant_mask(self, self.alpha if alpha is None else alpha, conditional=conditional)


def _run_trials(graph: AffinityGraph, original: np.ndarray, c: float, rng_seed: int,
                trial_ids: Sequence[int], width: int) -> np.ndarray:
    counts = np.zeros((graph.n, width), dtype=np.int64)
    rows = np.arange(graph.n)
    for t in trial_ids:
        rng = make_rng(rng_seed, t)
        seed = int(rng.integers(graph.n))
        labels = np.zeros(graph.n, dtype=np.int64)
        propagate(graph, labels, seed, int(original[seed]), c)
        counts[rows, labels] += 1
    return counts


def validate(graph: AffinityGraph, original: ClusterResult, trials: int = DEFAULT_TRIALS,
             rng_seed: int = 0, n_jobs: int = 1, alpha: float = DEFAULT_ALPHA) -> ValidationReport:
    """Re-propagate original labels from random seeds and tabulate the outcomes.

    Trial t draws its seed from a generator keyed by (rng_seed, t), so the
    report does not depend on how trials are spread over workers.
    """
    if int(trials) != trials or trials < 1:
        raise ParameterError(f"trials must be a positive integer, got {trials}")
    labels = np.asarray(original.labels, dtype=np.int64)
    if labels.shape != (graph.n,):
        raise ValidationError(f"Expected {graph.n} labels, got {labels.size}")
    if np.any(labels <= UNLABELED):
        raise ValidationError("Original clustering must label every vertex")

    started = time.perf_counter()
    width = int(labels.max()) + 1
    workers = min(resolve_workers(n_jobs), int(trials))
    chunks = [chunk for chunk in np.array_split(np.arange(int(trials)), workers) if len(chunk)]
    c = original.params.c
    if workers == 1:
        counts = _run_trials(graph, labels, c, rng_seed, chunks[0], width)
    else:
        parts = Parallel(n_jobs=workers)(
            delayed(_run_trials)(graph, labels, c, rng_seed, chunk, width) for chunk in chunks
        )
        counts = np.sum(parts, axis=0)
    counts.setflags(write=False)

    report = ValidationReport(labels=labels, posterior_counts=counts, trials=int(trials),
                              num_clusters=original.num_clusters, alpha=alpha)
    unreached = int(report.zero_coverage.sum())
    if unreached:
        logger.warning(f"{unreached} vertex(es) were never reached in {trials} trials")
    logger.info(f"Ran {trials} Monte Carlo trials on {workers} worker(s) in {time.perf_counter() - started:.3f}s")
    return report


def significant_mask(report: ValidationReport, alpha: float = DEFAULT_ALPHA, conditional: bool = False) -> np.ndarray:
    """True where the p-value is at most alpha (inclusive)."""
    if not 0 < alpha < 1:
        raise ParameterError(f"alpha must lie strictly between 0 and 1, got {alpha}")
    values = report.conditional_p_values if conditional else report.p_values
    return values <= alpha


def posterior_matrix(report: ValidationReport) -> np.ndarray:
    return np.array(report.posterior_counts)
