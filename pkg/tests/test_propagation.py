"""Fused propagation tests: known answers, oracle agreement, sweep modes."""
import numpy as np
import pytest

import infmax.propagation as prop
from infmax.graph import Graph, apply_weights, generate_er, parse_weight_scheme
from infmax.hashing import LANE_WIDTH, EdgeHashTable, SimulationRandoms, build_hash_table
from infmax.oracles import HashSampler, bfs_component_labels
from infmax.propagation import (
    component_sizes,
    component_sizes_and_gains,
    dump_labels,
    initial_marginal_gains,
    lane_label_step,
    load_labels,
    propagate,
)

from conftest import make_graph, weighted_er


def _setup(g, r=16, seed=0):
    table = build_hash_table(g)
    randoms = SimulationRandoms(r, master_seed=seed)
    return table, randoms


# ---------------------------------------------------------------------------
# exact answers at the weight extremes
# ---------------------------------------------------------------------------

def test_weight_one_floods_min_label_everywhere():
    g = weighted_er(80, 5, "const:1.0")
    table, randoms = _setup(g)
    labels = propagate(g, table, randoms)
    # with every edge live, each vertex takes the min vertex id of its
    # connected component, identically across lanes
    want = bfs_component_labels(HashSampler(g, table, randoms).sample(0))
    assert np.array_equal(labels, np.repeat(want[:, None], randoms.padded, axis=1))


def test_weight_zero_keeps_identity_labels():
    g = weighted_er(80, 5, "const:0.0")
    table, randoms = _setup(g)
    labels, stats = propagate(g, table, randoms, return_stats=True)
    assert np.array_equal(labels, np.repeat(np.arange(80, dtype=np.int32)[:, None],
                                            randoms.padded, axis=1))
    assert stats.sweeps == 1   # nothing to revisit


def test_edgeless_graph_is_identity():
    g = Graph.from_edges(5, [])
    table, randoms = _setup(g)
    labels = propagate(g, table, randoms)
    assert np.array_equal(labels, np.repeat(np.arange(5, dtype=np.int32)[:, None],
                                            randoms.padded, axis=1))


def test_path_with_middle_edge_dead():
    # 0-1 live (w=1), 1-2 dead (w=0): component {0,1} and {2} in every lane
    g = make_graph([(0, 1), (1, 2)], weights=[1.0, 0.0])
    table, randoms = _setup(g)
    labels = propagate(g, table, randoms)
    assert (labels[0] == 0).all() and (labels[1] == 0).all()
    assert (labels[2] == 2).all()


# ---------------------------------------------------------------------------
# agreement with the explicit-BFS oracle
# ---------------------------------------------------------------------------

@pytest.mark.parametrize("scheme", ["const:0.15", "uniform:0.05,0.6",
                                    "normal:0.3,0.2", "wc"])
def test_partition_matches_bfs_oracle(scheme):
    g = weighted_er(150, 6, scheme, graph_seed=3, weight_seed=5)
    table, randoms = _setup(g, r=24, seed=7)
    labels = propagate(g, table, randoms)
    sampler = HashSampler(g, table, randoms)
    for r in range(randoms.padded):
        assert np.array_equal(labels[:, r], bfs_component_labels(sampler.sample(r)))


def test_all_sweep_shapes_agree(monkeypatch):
    # force each propagation shape and check the fixpoint is identical
    g = weighted_er(400, 6, "const:0.04", graph_seed=1, weight_seed=1)
    table, randoms = _setup(g, r=32, seed=2)
    labels, stats = propagate(g, table, randoms, return_stats=True)
    assert "index" in stats.modes   # subcritical uniform weights take it
    monkeypatch.setattr(prop, "_SPARSE_FACTOR", 10**9)
    dense_only, dense_stats = propagate(g, table, randoms, return_stats=True)
    assert set(dense_stats.modes) == {"dense"}
    assert np.array_equal(labels, dense_only)
    monkeypatch.setattr(prop, "_SPARSE_FACTOR", 0)
    sparse_after, sparse_stats = propagate(g, table, randoms, return_stats=True)
    assert np.array_equal(labels, sparse_after)


def test_thread_counts_do_not_change_labels():
    g = weighted_er(200, 8, "wc", graph_seed=9)
    table, randoms = _setup(g, r=32, seed=4)
    one = propagate(g, table, randoms, n_threads=1)
    four = propagate(g, table, randoms, n_threads=4)
    assert np.array_equal(one, four)


# ---------------------------------------------------------------------------
# argument validation and stats
# ---------------------------------------------------------------------------

def test_propagate_rejects_bad_widths():
    g = make_graph([(0, 1)])
    table, randoms = _setup(g, r=16)
    with pytest.raises(ValueError):
        propagate(g, table, randoms, num_simulations=12)
    with pytest.raises(ValueError):
        propagate(g, table, randoms, num_simulations=24)   # beyond padded R
    with pytest.raises(ValueError):
        propagate(g, table, randoms, num_simulations=0)


def test_stats_trace_invariants():
    g = weighted_er(120, 6, "const:0.3", graph_seed=6)
    table, randoms = _setup(g, r=16, seed=1)
    labels, stats = propagate(g, table, randoms, return_stats=True)
    assert stats.sweeps == len(stats.modes) == len(stats.changed_pairs)
    assert stats.changed_pairs[-1] == 0   # converged
    # labels only ever decrease, so their sum is nonincreasing sweep to sweep
    sums = stats.label_sums
    assert len(sums) == stats.sweeps
    assert all(a >= b for a, b in zip(sums, sums[1:]))
    assert sums[-1] == labels.sum()


def test_narrower_width_is_prefix_of_wider():
    g = weighted_er(100, 5, "const:0.2", graph_seed=2)
    table = build_hash_table(g)
    randoms = SimulationRandoms(32, master_seed=5)
    full = propagate(g, table, randoms)
    part = propagate(g, table, randoms, num_simulations=16)
    assert np.array_equal(full[:, :16], part)


# ---------------------------------------------------------------------------
# single-edge lane step
# ---------------------------------------------------------------------------

def test_lane_label_step_pushes_only_into_v():
    g = make_graph([(0, 1), (1, 2)], weights=1.0)
    table, randoms = _setup(g, r=8)
    labels = np.repeat(np.arange(3, dtype=np.int32)[:, None], 8, axis=1)
    assert lane_label_step(g, 1, 2, 0, labels, table, randoms)
    assert (labels[2] == 1).all()
    assert (labels[0] == 0).all() and (labels[1] == 1).all()
    assert lane_label_step(g, 0, 1, 0, labels, table, randoms)
    assert (labels[1] == 0).all()
    # already converged on this edge: no further change
    assert not lane_label_step(g, 0, 1, 0, labels, table, randoms)


def test_lane_label_step_respects_membership():
    g = make_graph([(0, 1)], weights=0.0)
    table, randoms = _setup(g, r=8)
    labels = np.repeat(np.arange(2, dtype=np.int32)[:, None], 8, axis=1)
    assert not lane_label_step(g, 0, 1, 0, labels, table, randoms)
    assert (labels[1] == 1).all()


def test_lane_label_step_rejects_misaligned_batch():
    g = make_graph([(0, 1)])
    table, randoms = _setup(g, r=16)
    labels = np.zeros((2, 16), dtype=np.int32)
    with pytest.raises(ValueError):
        lane_label_step(g, 0, 1, 5, labels, table, randoms)
    with pytest.raises(ValueError):
        lane_label_step(g, 0, 1, 16, labels, table, randoms)


# ---------------------------------------------------------------------------
# memoization inputs: sizes and gains
# ---------------------------------------------------------------------------

def test_component_sizes_and_gains_by_hand():
    labels = np.array([[0, 0],
                       [0, 1],
                       [2, 0]], dtype=np.int32)
    sizes = component_sizes(labels)
    # lane 0: component 0 = {0, 1}, component 2 = {2}
    assert sizes[:, 0].tolist() == [2, 0, 1]
    # lane 1: component 0 = {0, 2}, component 1 = {1}
    assert sizes[:, 1].tolist() == [2, 1, 0]
    gains = initial_marginal_gains(labels, sizes)
    assert gains.tolist() == [4, 3, 3]
    fused_sizes, fused_gains = component_sizes_and_gains(labels)
    assert np.array_equal(fused_sizes, sizes)
    assert np.array_equal(fused_gains, gains)


def test_fused_pass_matches_two_pass_with_padding():
    g = weighted_er(90, 6, "const:0.25", graph_seed=8)
    table, randoms = _setup(g, r=20, seed=3)   # pads 20 -> 24
    labels = propagate(g, table, randoms)
    sizes = component_sizes(labels)
    gains = initial_marginal_gains(labels, sizes, randoms.num_scored)
    fsizes, fgains = component_sizes_and_gains(labels, randoms.num_scored)
    assert np.array_equal(fsizes, sizes)
    assert np.array_equal(fgains, gains)
    assert fgains.dtype == np.int64
    # padded lanes must not leak into the scores
    assert not np.array_equal(fgains, initial_marginal_gains(labels, sizes))


# ---------------------------------------------------------------------------
# label dumps
# ---------------------------------------------------------------------------

def test_dump_and_load_labels_round_trip(tmp_path):
    g = weighted_er(40, 4, "uniform:0.1,0.9", graph_seed=4)
    table, randoms = _setup(g, r=8, seed=6)
    labels = propagate(g, table, randoms)
    path = tmp_path / "labels.bin"
    dump_labels(labels, path)
    back = load_labels(path)
    assert back.dtype == np.int32
    assert np.array_equal(back, labels)
