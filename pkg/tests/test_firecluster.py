import math

import numpy as np
import pytest

from conftest import TIGHT_KERNEL, graph_from
from forest_fire.clustering.firecluster import (
    UNLABELED,
    FireParams,
    HeatTrace,
    audit,
    average_heat,
    cluster,
    heat_profile,
    propagate,
)
from forest_fire.errors import ContractViolation, ParameterError
from forest_fire.evaluation.metrics import adjusted_rand_index
from forest_fire.graph.affinity import KernelSpec, build_graph, gaussian_affinity, pairwise_distances


def rescan_cluster(A: np.ndarray, T: np.ndarray, c: float, seed_order) -> np.ndarray:
    """Direct transcription of the propagation rule: rescan from vertex 0 after every acceptance."""
    n = A.shape[0]
    labels = np.zeros(n, dtype=np.int64)
    order = [int(v) for v in seed_order]
    j = 0
    while (labels == 0).any():
        j += 1
        seed = next(v for v in order if labels[v] == 0)
        labels[seed] = j
        members = [seed]
        while True:
            heat = c * A[:, members].sum(axis=1) / len(members)
            ready = np.flatnonzero((labels == 0) & (heat >= T))
            if not len(ready):
                break
            labels[ready[0]] = j
            members.append(int(ready[0]))
    return labels


class TestFireParams:

    @pytest.mark.parametrize('c', [0.0, -1.0, math.inf, math.nan])
    def test_rejects_bad_temperature(self, c):
        with pytest.raises(ParameterError):
            FireParams(c=c)

    def test_rejects_negative_seed(self):
        with pytest.raises(ParameterError):
            FireParams(c=1.0, rng_seed=-1)


class TestAverageHeat:

    def test_singleton_cluster(self):
        graph = graph_from([[0, 0.4], [0.4, 0]])
        labels = np.array([1, 0])
        assert average_heat(graph, labels, 1, 1, 2.0) == pytest.approx(0.8)

    def test_two_member_mean(self):
        graph = graph_from([[0, 1.0, 0.0], [1.0, 0, 0.5], [0.0, 0.5, 0]])
        labels = np.array([0, 1, 1])
        assert average_heat(graph, labels, 1, 0, 1.0) == pytest.approx(0.5)

    def test_three_member_mean(self):
        A = np.zeros((4, 4))
        A[0, 1:] = A[1:, 0] = [0.2, 0.3, 0.7]
        labels = np.array([0, 1, 1, 1])
        assert average_heat(graph_from(A), labels, 1, 0, 3.0) == pytest.approx(1.2)

    def test_empty_cluster(self):
        graph = graph_from([[0, 0.4], [0.4, 0]])
        with pytest.raises(ContractViolation):
            average_heat(graph, np.array([1, 0]), 2, 1, 1.0)

    def test_labeled_vertex(self):
        graph = graph_from([[0, 0.4], [0.4, 0]])
        with pytest.raises(ContractViolation):
            average_heat(graph, np.array([1, 1]), 1, 1, 1.0)


class TestPropagate:

    @pytest.mark.parametrize('c, joined', [(4.0, True), (3.9, False)])
    def test_two_vertex_acceptance(self, c, joined):
        graph = graph_from([[0, 0.5], [0.5, 0]])
        labels, trace = propagate(graph, np.zeros(2, dtype=np.int64), 0, 1, c)
        assert bool(labels[1] == 1) == joined
        assert trace.entries[0].heat == math.inf

    def test_isolated_seed_stays_alone(self):
        graph = graph_from([[0, 1, 0], [1, 0, 0], [0, 0, 0]])
        labels, trace = propagate(graph, np.zeros(3, dtype=np.int64), 2, 1, 100.0)
        assert labels.tolist() == [0, 0, 1]
        assert len(trace) == 1

    def test_collinear_points(self):
        graph = gaussian_affinity(pairwise_distances([[0.0], [1.0], [10.0]]), 1.0)
        labels, _ = propagate(graph, np.zeros(3, dtype=np.int64), 0, 1, 3.0)
        assert labels.tolist() == [1, 1, 0]

    def test_rejects_labeled_seed(self):
        graph = graph_from([[0, 0.5], [0.5, 0]])
        with pytest.raises(ContractViolation):
            propagate(graph, np.array([1, 0]), 0, 2, 1.0)

    def test_rejects_used_cluster_id(self):
        graph = graph_from([[0, 0.5], [0.5, 0]])
        with pytest.raises(ContractViolation):
            propagate(graph, np.array([1, 0]), 1, 1, 1.0)

    def test_trace_heats_reach_thresholds(self, tight_graph):
        labels, trace = propagate(tight_graph, np.zeros(tight_graph.n, dtype=np.int64), 0, 1, 10.0)
        for entry in trace.entries[1:]:
            assert entry.heat >= tight_graph.thresholds[entry.vertex]
        assert len(trace) == int((labels == 1).sum())


class TestCluster:

    def test_identical_points_form_one_cluster(self):
        graph = build_graph(np.zeros((5, 2)), KernelSpec.gaussian(1.0))
        assert cluster(graph, FireParams(c=0.25)).num_clusters == 1
        assert cluster(graph, FireParams(c=0.2)).num_clusters == 5

    def test_far_pairs(self, far_pairs):
        graph = build_graph(far_pairs, KernelSpec.gaussian(1.0))
        result = cluster(graph, FireParams(c=2.0, rng_seed=5))
        assert result.num_clusters == 2
        assert result.labels[0] == result.labels[1]
        assert result.labels[2] == result.labels[3]
        assert result.labels[0] != result.labels[2]

    def test_labels_are_complete_and_contiguous(self, tight_graph):
        result = cluster(tight_graph, FireParams(c=1.0, rng_seed=3))
        assert (result.labels != UNLABELED).all()
        assert set(np.unique(result.labels)) == set(range(1, result.num_clusters + 1))
        assert len(result.trace) == tight_graph.n
        assert sum(1 for e in result.trace if e.heat == math.inf) == result.num_clusters

    def test_labels_are_read_only(self, tight_graph):
        result = cluster(tight_graph, FireParams(c=10.0))
        with pytest.raises(ValueError):
            result.labels[0] = 99

    @pytest.mark.parametrize('c', [5.0, 10.0, 50.0])
    def test_recovers_tight_mixture(self, tight_blobs, tight_graph, c):
        result = cluster(tight_graph, FireParams(c=c, rng_seed=42), kernel=TIGHT_KERNEL)
        assert result.num_clusters == 8
        assert adjusted_rand_index(result.labels, tight_blobs.labels) == pytest.approx(1.0)

    def test_cold_fire_leaves_singletons(self, tight_graph):
        assert cluster(tight_graph, FireParams(c=0.001)).num_clusters == tight_graph.n

    def test_deterministic(self, tight_graph):
        first = cluster(tight_graph, FireParams(c=1.0, rng_seed=9))
        second = cluster(tight_graph, FireParams(c=1.0, rng_seed=9))
        np.testing.assert_array_equal(first.labels, second.labels)
        assert first.trace.entries == second.trace.entries

    def test_seed_order_is_followed(self, far_pairs):
        graph = build_graph(far_pairs, KernelSpec.gaussian(1.0))
        result = cluster(graph, FireParams(c=2.0), seed_order=[3, 2, 0])
        assert result.labels.tolist() == [2, 2, 1, 1]
        assert result.trace.entries[0].vertex == 3

    def test_permutation_equivariance(self, tight_blobs):
        perm = np.random.default_rng(4).permutation(len(tight_blobs.points))
        inverse = np.argsort(perm)
        order = np.random.default_rng(5).permutation(len(perm))
        base = cluster(build_graph(tight_blobs.points, TIGHT_KERNEL), FireParams(c=10.0), seed_order=order)
        permuted = cluster(build_graph(tight_blobs.points[perm], TIGHT_KERNEL), FireParams(c=10.0),
                           seed_order=inverse[order])
        np.testing.assert_array_equal(permuted.labels, base.labels[perm])

    def test_matches_rescan_transcription(self):
        rng = np.random.default_rng(2024)
        for trial in range(100):
            n = int(rng.integers(3, 201))
            W = rng.normal(size=(n, 2)) * rng.uniform(0.5, 3.0)
            if trial % 2:
                kernel = KernelSpec.adaptive(int(rng.integers(1, min(10, n - 1) + 1)), float(rng.uniform(1.0, 10.0)))
            else:
                kernel = KernelSpec.gaussian(float(rng.uniform(0.2, 1.5)))
            graph = build_graph(W, kernel)
            c = float(np.exp(rng.uniform(np.log(0.1), np.log(20.0))))
            order = rng.permutation(n)
            result = cluster(graph, FireParams(c=c), seed_order=order)
            expected = rescan_cluster(np.asarray(graph.affinities), np.asarray(graph.thresholds), c, order)
            np.testing.assert_array_equal(result.labels, expected, err_msg=f"instance {trial}, n={n}, c={c:g}")


class TestAuditAndProfile:

    @pytest.mark.parametrize('c', [0.5, 2.0, 10.0])
    def test_finished_clustering_passes_audit(self, tight_graph, c):
        result = cluster(tight_graph, FireParams(c=c, rng_seed=1))
        report = audit(tight_graph, result)
        assert report.ok, report

    def test_audit_flags_tampered_labels(self, far_pairs):
        graph = build_graph(far_pairs, KernelSpec.gaussian(1.0))
        result = cluster(graph, FireParams(c=2.0), seed_order=[0, 2])
        forged = type(result)(labels=np.array([1, 2, 3, 3]), trace=HeatTrace(), num_clusters=3,
                              params=result.params)
        assert not audit(graph, forged).ok

    def test_profile_sizes_cover_every_vertex(self, tight_graph):
        result = cluster(tight_graph, FireParams(c=10.0, rng_seed=2))
        profile = heat_profile(result.trace)
        assert len(profile) == result.num_clusters
        assert sum(row.size for row in profile) == tight_graph.n
        for row in profile:
            if row.size > 1:
                assert row.peak_heat >= row.final_heat
            else:
                assert math.isnan(row.peak_heat)
