import os
import sys

import numpy as np
import pytest

# Add src directory to path
sys.path.insert(0, os.path.join(os.path.dirname(__file__), '..', 'src'))

from forest_fire.data.datagen import MixtureSpec, gaussian_circle
from forest_fire.graph.affinity import AffinityGraph, KernelSpec, build_graph

TIGHT_KERNEL = KernelSpec.gaussian(0.1)


@pytest.fixture(scope='session')
def tight_blobs():
    """Eight well-separated components, 20 points each."""
    return gaussian_circle(MixtureSpec(n=160, k=8, sigma=0.04, seed=11))


@pytest.fixture(scope='session')
def tight_graph(tight_blobs):
    return build_graph(tight_blobs.points, TIGHT_KERNEL)


@pytest.fixture
def far_pairs():
    """Two pairs of 1-D points 100 apart: points 0,1 and 2,3."""
    return np.array([[0.0], [0.5], [100.0], [100.5]])


def graph_from(matrix) -> AffinityGraph:
    return AffinityGraph.from_affinities(np.array(matrix, dtype=np.float64))
