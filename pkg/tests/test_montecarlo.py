import math

import numpy as np
import pytest

from forest_fire.clustering.firecluster import FireParams, cluster
from forest_fire.clustering.montecarlo import ValidationReport, posterior_matrix, significant_mask, validate
from forest_fire.data.datagen import MixtureSpec, gaussian_circle, make_doublets
from forest_fire.errors import ParameterError, ValidationError
from forest_fire.graph.affinity import KernelSpec, build_graph


def report_from(counts, labels, trials, num_clusters=2):
    return ValidationReport(labels=np.asarray(labels), posterior_counts=np.asarray(counts),
                            trials=trials, num_clusters=num_clusters)


@pytest.fixture(scope='module')
def two_blobs():
    W = np.array([[0.0], [0.1], [0.2], [100.0], [100.1], [100.2]])
    graph = build_graph(W, KernelSpec.gaussian(1.0))
    return graph, cluster(graph, FireParams(c=10.0, rng_seed=0))


class TestValidationReport:

    def test_hand_evaluated_vertex(self):
        report = report_from([[2, 6, 2]], [1], trials=10)
        assert report.p_values[0] == pytest.approx(0.4)
        assert report.entropies[0] == pytest.approx(-(0.75 * math.log(0.75) + 0.25 * math.log(0.25)))
        assert report.entropies[0] == pytest.approx(0.5623, abs=1e-4)
        assert report.coverage[0] == 8
        assert report.conditional_p_values[0] == pytest.approx(0.25)
        assert report.posterior(0) == {1: 6, 2: 2}

    def test_unreached_vertex_gets_maximum_entropy(self):
        report = report_from([[10, 0, 0, 0]], [2], trials=10, num_clusters=3)
        assert report.p_values[0] == 1.0
        assert report.conditional_p_values[0] == 1.0
        assert report.entropies[0] == pytest.approx(math.log(3))
        assert report.zero_coverage.tolist() == [True]

    @pytest.mark.parametrize('matches, expected', [(99, True), (95, True), (94, False)])
    def test_significance_cutoff_is_inclusive(self, matches, expected):
        report = report_from([[100 - matches, matches, 0]], [1], trials=100)
        assert bool(significant_mask(report, 0.05)[0]) is expected

    @pytest.mark.parametrize('alpha', [0.0, 1.0, -0.1, 2.0])
    def test_rejects_alpha_outside_unit_interval(self, alpha):
        report = report_from([[0, 1, 0]], [1], trials=1)
        with pytest.raises(ParameterError):
            significant_mask(report, alpha)


class TestValidate:

    def test_disconnected_blobs(self, two_blobs):
        graph, original = two_blobs
        report = validate(graph, original, trials=200, rng_seed=3)
        np.testing.assert_allclose(report.entropies, 0.0, atol=1e-12)
        np.testing.assert_array_equal(report.matches, report.coverage)
        assert ((report.p_values > 0) & (report.p_values < 1)).all()
        np.testing.assert_allclose(report.p_values[:3], report.p_values[0])
        assert significant_mask(report, 0.05, conditional=True).all()

    def test_posterior_matrix_shape(self, two_blobs):
        graph, original = two_blobs
        report = validate(graph, original, trials=20)
        counts = posterior_matrix(report)
        assert counts.shape == (graph.n, original.num_clusters + 1)
        np.testing.assert_array_equal(counts.sum(axis=1), 20)
        counts[0, 0] += 1
        assert report.posterior_counts[0, 0] != counts[0, 0]

    @pytest.mark.parametrize('trials', [0, -5])
    def test_rejects_non_positive_trials(self, two_blobs, trials):
        graph, original = two_blobs
        with pytest.raises(ParameterError):
            validate(graph, original, trials=trials)

    def test_rejects_label_count_mismatch(self, two_blobs):
        graph, original = two_blobs
        short = type(original)(labels=original.labels[:4], trace=original.trace, num_clusters=2,
                               params=original.params)
        with pytest.raises(ValidationError):
            validate(graph, short, trials=5)

    def test_same_report_for_any_worker_count(self, tight_graph):
        original = cluster(tight_graph, FireParams(c=10.0, rng_seed=4))
        serial = validate(tight_graph, original, trials=40, rng_seed=8, n_jobs=1)
        parallel = validate(tight_graph, original, trials=40, rng_seed=8, n_jobs=2)
        np.testing.assert_array_equal(serial.posterior_counts, parallel.posterior_counts)

    def test_rng_seed_changes_trials(self, tight_graph):
        original = cluster(tight_graph, FireParams(c=10.0, rng_seed=4))
        first = validate(tight_graph, original, trials=40, rng_seed=1)
        second = validate(tight_graph, original, trials=40, rng_seed=2)
        assert not np.array_equal(first.posterior_counts, second.posterior_counts)

    def test_bounds(self, tight_graph):
        original = cluster(tight_graph, FireParams(c=0.5, rng_seed=4))
        report = validate(tight_graph, original, trials=50)
        assert ((report.p_values >= 0) & (report.p_values <= 1)).all()
        assert (report.entropies >= 0).all()
        assert (report.entropies <= math.log(original.num_clusters) + 1e-12).all()


@pytest.mark.slow
def test_boundary_points_are_more_ambiguous():
    data = gaussian_circle(MixtureSpec(n=400, k=8, sigma=0.15, seed=31))
    graph = build_graph(data.points, KernelSpec.gaussian(0.1))
    original = cluster(graph, FireParams(c=10.0, rng_seed=2))
    report = validate(graph, original, trials=300, rng_seed=5)

    angles = 2 * np.pi * (data.labels - 1) / 8
    centers = np.column_stack([np.cos(angles), np.sin(angles)])
    spread = np.linalg.norm(data.points - centers, axis=1)
    order = np.argsort(spread)
    tenth = len(order) // 10
    assert report.entropies[order[-tenth:]].mean() > report.entropies[order[:tenth]].mean()


@pytest.mark.slow
def test_doublets_are_less_significant():
    data = gaussian_circle(MixtureSpec(n=200, k=2, sigma=0.05, seed=17))
    sample = make_doublets(data.points, data.labels, 10, seed=17)
    graph = build_graph(sample.points, KernelSpec.gaussian(0.1))
    original = cluster(graph, FireParams(c=2.0, rng_seed=6))
    report = validate(graph, original, trials=300, rng_seed=6)
    assert report.p_values[sample.is_doublet].mean() > report.p_values[~sample.is_doublet].mean()


@pytest.mark.slow
def test_conditional_filter_keeps_every_literally_significant_point():
    data = gaussian_circle(MixtureSpec(n=500, k=8, sigma=0.20, seed=0))
    graph = build_graph(data.points, KernelSpec.gaussian(0.1))
    original = cluster(graph, FireParams(c=5.0, rng_seed=0))
    report = validate(graph, original, trials=300, rng_seed=0)

    assert (report.conditional_p_values <= report.p_values + 1e-12).all()
    literal = significant_mask(report, 0.05)
    conditional = significant_mask(report, 0.05, conditional=True)
    assert not (literal & ~conditional).any()
