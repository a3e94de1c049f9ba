import logging
import math
import sys
import time
from typing import TextIO

import numpy as np

from ..clustering.firecluster import ClusterResult, FireParams, HeatTrace, cluster
from ..clustering.montecarlo import validate
from ..clustering.online import online_assign
from ..data.datagen import MixtureSpec, gaussian_circle, make_doublets
from ..errors import ParameterError, ValidationError
from ..evaluation.metrics import adjusted_rand_index, purity, silhouette
from ..evaluation.sweep import fire_temperature_sweep
from ..graph.affinity import build_graph
from ..storage import files
from ..utils.config import RunConfig

logger = logging.getLogger(__name__)

SWEEP_COLUMNS = ['c', 'num_clusters', 'silhouette', 'ari', 'purity', 'seconds']


class RunCommands:
    """Handlers for the cluster, validate, extend, gen, score and sweep commands"""

    def __init__(self, out: TextIO = None):
        self.out = out or sys.stdout

    def say(self, message: str):
        print(message, file=self.out)

    def dispatch(self, config: RunConfig):
        handler = getattr(self, f"cmd_{config.command}", None)
        if handler is None:
            raise ParameterError(f"Unknown command '{config.command}'")
        logger.debug(f"Dispatching {config.command}")
        return handler(config)

    @staticmethod
    def _require(config: RunConfig, *names: str):
        for name in names:
            if getattr(config, name) is None:
                raise ParameterError(f"--{name.replace('_', '-')} is required for {config.command}")

    def cmd_cluster(self, config: RunConfig) -> ClusterResult:
        """Cluster a data matrix and write its labels and heat trace"""
        self._require(config, 'input', 'labels_out', 'trace_out')
        kernel = config.kernel_spec()
        params = FireParams(c=config.fire_temperature(), rng_seed=config.seed)
        started = time.perf_counter()
        W = files.read_matrix(config.input)
        graph = build_graph(W, kernel)
        result = cluster(graph, params, kernel=kernel)
        elapsed = time.perf_counter() - started

        files.write_labels(config.labels_out, result.labels)
        files.write_trace(config.trace_out, result.trace)
        self.say(f"clusters: {result.num_clusters}")
        self.say(f"runtime: {elapsed:.3f}s")
        return result

    def cmd_validate(self, config: RunConfig):
        """Monte Carlo validation of an existing labeling"""
        self._require(config, 'input', 'labels_in', 'report_out')
        kernel = config.kernel_spec()
        params = FireParams(c=config.fire_temperature(), rng_seed=config.seed)
        if config.trials < 1:
            raise ParameterError(f"--trials must be at least 1, got {config.trials}")
        if not 0 < config.alpha_cutoff < 1:
            raise ParameterError(f"--alpha-cutoff must lie strictly between 0 and 1, got {config.alpha_cutoff}")
        W = files.read_matrix(config.input)
        labels = files.read_labels(config.labels_in)
        if len(labels) != len(W):
            raise ValidationError(f"Labels file has {len(labels)} rows but the input has {len(W)}")
        if np.any(labels < 1):
            raise ValidationError("Labels must be positive cluster ids")

        graph = build_graph(W, kernel)
        original = ClusterResult(labels=labels, trace=HeatTrace(), num_clusters=int(labels.max()),
                                 params=params, kernel=kernel)
        report = validate(graph, original, trials=config.trials, rng_seed=config.seed,
                          n_jobs=config.threads, alpha=config.alpha_cutoff)
        files.write_report(config.report_out, report, config.alpha_cutoff, conditional=config.conditional)
        significant = int(report.significant(config.alpha_cutoff, conditional=config.conditional).sum())
        self.say(f"trials: {config.trials}")
        self.say(f"significant: {significant}/{len(labels)} at alpha={config.alpha_cutoff:g}")
        self.say(f"mean entropy: {float(np.mean(report.entropies)):.4f}")
        return report

    def cmd_extend(self, config: RunConfig):
        """Stream new points into an existing clustering"""
        self._require(config, 'train', 'train_labels', 'new', 'labels_out')
        kernel = config.kernel_spec()
        W_train = files.read_matrix(config.train)
        labels_train = files.read_labels(config.train_labels)
        if len(labels_train) != len(W_train):
            raise ValidationError(f"Training labels have {len(labels_train)} rows but training data has {len(W_train)}")
        W_new = files.read_matrix(config.new, min_rows=1)

        result = online_assign(W_train, labels_train, W_new, kernel, config.fire_temperature())
        files.write_labels(config.labels_out, result.labels,
                           extra={'new_cluster': result.is_new.astype(np.int64)})
        if config.trace_out is not None:
            files.write_trace(config.trace_out, result.trace)
        self.say(f"points: {len(result.labels)}")
        self.say(f"new clusters: {len(result.new_clusters)}")
        return result

    def cmd_gen(self, config: RunConfig):
        """Generate a circle mixture (optionally with doublets) and its reference labels"""
        self._require(config, 'output', 'labels_out')
        spec = MixtureSpec(n=config.n, k=config.components, sigma=config.spread,
                           radius=config.radius, seed=config.seed)
        points, labels = gaussian_circle(spec)
        extra = None
        if config.doublets:
            sample = make_doublets(points, labels, config.doublets, seed=config.seed)
            kept = sample.origin[:, 0]
            # Doublet rows have no single reference component.
            labels = np.where(sample.is_doublet, 0, labels[kept])
            points = sample.points
            extra = {'doublet': sample.is_doublet.astype(np.int64)}
        files.write_matrix(config.output, points)
        files.write_labels(config.labels_out, labels, extra=extra)
        self.say(f"points: {len(points)}")
        self.say(f"components: {spec.k}")
        return points, labels

    def cmd_score(self, config: RunConfig) -> dict:
        """Compare predicted labels against reference labels"""
        self._require(config, 'pred', 'truth')
        pred = files.read_labels(config.pred)
        truth = files.read_labels(config.truth)
        if len(pred) != len(truth):
            raise ValidationError(f"Predicted labels have {len(pred)} rows but reference labels have {len(truth)}")
        keep = np.ones(len(pred), dtype=bool)
        if config.report_in is not None:
            keep = files.read_labels(config.report_in, column='significant').astype(bool)
            if len(keep) != len(pred):
                raise ValidationError(f"Report has {len(keep)} rows but labels have {len(pred)}")
            self.say(f"scored points: {int(keep.sum())}/{len(pred)}")

        scores = {
            'purity': purity(pred[keep], truth[keep]),
            'ari': adjusted_rand_index(pred[keep], truth[keep]),
        }
        if config.input is not None:
            W = files.read_matrix(config.input)
            scores['silhouette'] = silhouette(W[keep], pred[keep])
        for name, value in scores.items():
            self.say(f"{name}: {value:.6f}")
        return scores

    def cmd_sweep(self, config: RunConfig):
        """Cluster across a grid of fire temperatures"""
        self._require(config, 'input', 'output')
        if not config.c_grid:
            raise ParameterError("--c-grid is required for sweep")
        kernel = config.kernel_spec()
        W = files.read_matrix(config.input)
        truth = files.read_labels(config.truth) if config.truth is not None else None
        if truth is not None and len(truth) != len(W):
            raise ValidationError(f"Reference labels have {len(truth)} rows but the input has {len(W)}")
        rows = fire_temperature_sweep(W, kernel, config.c_grid, seed=config.seed, truth=truth)
        files.write_rows(config.output, rows, SWEEP_COLUMNS)
        for row in rows:
            score = 'nan' if math.isnan(row.silhouette) else f"{row.silhouette:.4f}"
            self.say(f"c={row.c:g} clusters={row.num_clusters} silhouette={score}")
        return rows
