import logging
import math
import time
from dataclasses import dataclass, field
from typing import Iterable, Iterator, List, NamedTuple, Optional

import numpy as np

from ..errors import ContractViolation, ParameterError
from ..graph.affinity import AffinityGraph, KernelSpec
from ..utils.parallel import make_rng

logger = logging.getLogger(__name__)

UNLABELED = 0


@dataclass(frozen=True)
class FireParams:
    """Fire temperature c and the seed of the ignition generator"""

    c: float
    rng_seed: int = 0

    def __post_init__(self):
        if not (self.c > 0 and math.isfinite(self.c)):
            raise ParameterError(f"Fire temperature c must be a positive finite number, got {self.c}")
        if self.rng_seed < 0:
            raise ParameterError(f"rng_seed must be non-negative, got {self.rng_seed}")


class TraceEntry(NamedTuple):
    step: int
    vertex: int
    cluster: int
    heat: float


class HeatTrace:
    """Heat-over-time log: one entry per labeling, seeds carry +inf."""

    def __init__(self, entries: Iterable[TraceEntry] = ()):
        self._entries: List[TraceEntry] = list(entries)

    def record(self, vertex: int, cluster: int, heat: float) -> TraceEntry:
        entry = TraceEntry(len(self._entries), int(vertex), int(cluster), float(heat))
        self._entries.append(entry)
        return entry

    @property
    def entries(self) -> tuple:
        return tuple(self._entries)

    def __len__(self) -> int:
        return len(self._entries)

    def __iter__(self) -> Iterator[TraceEntry]:
        return iter(self._entries)

    def heats(self) -> np.ndarray:
        return np.array([entry.heat for entry in self._entries], dtype=np.float64)


@dataclass(frozen=True, eq=False)
class ClusterResult:
    labels: np.ndarray
    trace: HeatTrace
    num_clusters: int
    params: FireParams
    kernel: Optional[KernelSpec] = None
    seconds: float = field(default=0.0, compare=False)


class AuditReport(NamedTuple):
    stopping_violations: List[tuple]
    acceptance_violations: List[TraceEntry]

    @property
    def ok(self) -> bool:
        return not self.stopping_violations and not self.acceptance_violations


class ClusterHeat(NamedTuple):
    cluster: int
    size: int
    peak_heat: float
    final_heat: float


def average_heat(graph: AffinityGraph, labels: np.ndarray, j: int, i: int, c: float) -> float:
    """c times the mean affinity from unlabeled vertex i to the members of cluster j."""
    if labels[i] != UNLABELED:
        raise ContractViolation(f"Vertex {i} already carries label {labels[i]}")
    members = np.flatnonzero(labels == j)
    if not len(members):
        raise ContractViolation(f"Cluster {j} has no members")
    return c * graph.affinities[i, members].sum() / len(members)


def propagate(graph: AffinityGraph, labels: np.ndarray, seed_vertex: int, j: int, c: float,
              trace: Optional[HeatTrace] = None):
    """Ignite label j at seed_vertex and spread it until no unlabeled vertex accepts.

    Equivalent to rescanning the unlabeled vertices from the lowest index after
    every acceptance: each step accepts the lowest-index vertex whose average
    heat reaches its threshold. Mutates and returns (labels, trace).
    """
    if trace is None:
        trace = HeatTrace()
    if labels[seed_vertex] != UNLABELED:
        raise ContractViolation(f"Seed vertex {seed_vertex} already carries label {labels[seed_vertex]}")
    if j == UNLABELED or np.any(labels == j):
        raise ContractViolation(f"Cluster id {j} is reserved or already in use")

    affinities = graph.affinities
    limits = graph.thresholds
    labels[seed_vertex] = j
    trace.record(seed_vertex, j, math.inf)

    # Running sum of affinities to the cluster members, one entry per vertex.
    sums = affinities[seed_vertex].copy()
    size = 1
    open_ = labels == UNLABELED
    while True:
        heat = c * sums / size
        accepted = np.flatnonzero(open_ & (heat >= limits))
        if not len(accepted):
            break
        vertex = accepted[0]
        labels[vertex] = j
        open_[vertex] = False
        trace.record(vertex, j, heat[vertex])
        sums += affinities[vertex]
        size += 1
    return labels, trace


def draw_seed(rng: np.random.Generator, labels: np.ndarray) -> int:
    """Uniform choice among the unlabeled vertices."""
    candidates = np.flatnonzero(labels == UNLABELED)
    return int(candidates[rng.integers(len(candidates))])


def cluster(graph: AffinityGraph, params: FireParams, kernel: Optional[KernelSpec] = None,
            seed_order: Optional[Iterable[int]] = None) -> ClusterResult:
    """Iterative label propagation until every vertex carries a label.

    With seed_order, each round ignites the first listed vertex that is still
    unlabeled; the generator takes over once the list is exhausted.
    """
    started = time.perf_counter()
    rng = make_rng(params.rng_seed)
    labels = np.zeros(graph.n, dtype=np.int64)
    trace = HeatTrace()
    pending = [] if seed_order is None else [int(v) for v in seed_order]
    j = 0
    while np.any(labels == UNLABELED):
        j += 1
        seed = None
        while pending and seed is None:
            candidate = int(pending.pop(0))
            if labels[candidate] == UNLABELED:
                seed = candidate
        if seed is None:
            seed = draw_seed(rng, labels)
        before = len(trace)
        propagate(graph, labels, seed, j, params.c, trace)
        logger.debug(f"Round {j}: seed {seed} labeled {len(trace) - before} vertices")

    labels.setflags(write=False)
    seconds = time.perf_counter() - started
    logger.info(f"Found {j} clusters over {graph.n} points with c={params.c:g} in {seconds:.3f}s")
    return ClusterResult(labels=labels, trace=trace, num_clusters=j, params=params,
                         kernel=kernel, seconds=seconds)


def audit(graph: AffinityGraph, result: ClusterResult) -> AuditReport:
    """Re-check the stopping and acceptance conditions of a finished clustering.

    A vertex with a label above j was unlabeled when round j stopped, so its
    average heat from cluster j must stay below its threshold.
    """
    labels = np.asarray(result.labels)
    c = result.params.c
    stopping = []
    for j in range(1, result.num_clusters + 1):
        members = labels == j
        heat = c * graph.affinities[:, members].sum(axis=1) / members.sum()
        later = np.flatnonzero((labels > j) & (heat >= graph.thresholds))
        stopping.extend((j, int(u), float(heat[u])) for u in later)
    accepted = [entry for entry in result.trace
                if math.isfinite(entry.heat) and entry.heat < graph.thresholds[entry.vertex]]
    return AuditReport(stopping_violations=stopping, acceptance_violations=accepted)


def heat_profile(trace: HeatTrace) -> List[ClusterHeat]:
    """Per-cluster summary of the heat-over-time trace.

    peak_heat is the hottest acceptance of the round, final_heat the last one;
    both are nan for singleton clusters.
    """
    rounds = {}
    for entry in trace:
        rounds.setdefault(entry.cluster, []).append(entry.heat)
    profile = []
    for cluster_id, heats in rounds.items():
        accepted = [h for h in heats if math.isfinite(h)]
        profile.append(ClusterHeat(
            cluster=cluster_id,
            size=len(heats),
            peak_heat=max(accepted) if accepted else math.nan,
            final_heat=accepted[-1] if accepted else math.nan,
        ))
    return profile
