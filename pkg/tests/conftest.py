"""Shared builders for the test suite."""

import numpy as np
import pytest

from infmax.graph import Graph, apply_weights, generate_er, parse_weight_scheme


def make_graph(edges, n=None, weights=1.0):
    edges = np.asarray(edges, dtype=np.int64).reshape(-1, 2)
    if n is None:
        n = int(edges.max()) + 1
    return Graph.from_edges(n, edges, weights)


def weighted_er(n, deg, scheme, graph_seed=0, weight_seed=0):
    g = generate_er(n, deg, seed=graph_seed)
    return apply_weights(g, parse_weight_scheme(scheme), rng_seed=weight_seed)


@pytest.fixture
def path3():
    # 0 - 1 - 2
    return make_graph([(0, 1), (1, 2)])


@pytest.fixture
def tri_pendant():
    # triangle 0-1-2 with vertex 3 hanging off 2
    return make_graph([(0, 1), (0, 2), (1, 2), (2, 3)])
