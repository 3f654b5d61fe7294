import numpy as np
import pytest

from evnav.graph import EdgeAttrs, RoadNetwork

DUMMY_ATTRS = EdgeAttrs(length_m=1000.0, grade_rad=0.0, speed_mean_mps=15.0, speed_std_mps=0.0)


def make_net(n_vertices, pairs):
    """Network from bare (u, v) pairs with placeholder physical attributes."""
    return RoadNetwork(n_vertices, [(u, v, DUMMY_ATTRS) for u, v in pairs])


def random_dag(rng, max_vertices=10, max_edges=25):
    """Random DAG with vertex order 0..n-1 and at least one 0->n-1 path."""
    n = int(rng.integers(3, max_vertices + 1))
    pairs = [(i, i + 1) for i in range(n - 1)]  # guarantee reachability
    extra = [(i, j) for i in range(n) for j in range(i + 2, n)]
    if extra:
        k = int(rng.integers(0, min(len(extra), max_edges - len(pairs)) + 1))
        idx = rng.permutation(len(extra))[:k]
        pairs.extend(extra[i] for i in idx)
    return make_net(n, pairs)


@pytest.fixture
def rng():
    return np.random.default_rng(1234)
