"""Input coercion and invariant checks shared by the estimator and CLI."""
import numpy as np
import pytest

from infmax.graph import ConstraintError, Graph, generate_er, save_csr, write_edge_list
from infmax.validation import as_graph, check_graph, check_num_seeds, check_simulations

from conftest import make_graph


# ---------------------------------------------------------------------------
# as_graph coercion
# ---------------------------------------------------------------------------

def test_as_graph_passes_through_graph():
    g = make_graph([(0, 1)])
    assert as_graph(g) is g


def test_as_graph_loads_files(tmp_path):
    g = make_graph([(0, 1), (1, 2)], weights=0.5)
    text = tmp_path / "g.txt"
    binary = tmp_path / "g.csr"
    write_edge_list(g, text)
    save_csr(g, binary)
    for path in (text, binary, str(text)):
        back = as_graph(path)
        assert back.n == 3 and back.num_undirected_edges == 2
        assert np.array_equal(back.weights, g.weights)


def test_as_graph_accepts_edge_arrays():
    g = as_graph([(5, 9), (9, 7), (5, 7)])
    assert g.n == 3 and g.num_undirected_edges == 3
    # first-appearance compaction, original ids preserved
    assert g.orig_ids.tolist() == [5, 9, 7]
    assert (g.weights == 1.0).all()


def test_as_graph_accepts_weighted_arrays_and_dedupes():
    g = as_graph(np.array([[0, 1, 0.25],
                           [1, 1, 0.9],      # self-loop: dropped
                           [1, 0, 0.75],     # duplicate: first wins
                           [1, 2, 0.5]]))
    assert g.n == 3 and g.num_undirected_edges == 2
    assert g.weights[g.slot(0, 1)] == 0.25
    assert g.weights[g.slot(1, 2)] == 0.5


@pytest.mark.parametrize("bad", [
    [],                           # empty
    [1, 2, 3],                    # 1-D
    [[1, 2, 3, 4]],               # too many columns
    [[0, 0]],                     # nothing but a self-loop
])
def test_as_graph_rejects_malformed_input(bad):
    with pytest.raises(ValueError):
        as_graph(bad)


# ---------------------------------------------------------------------------
# invariant checks
# ---------------------------------------------------------------------------

def test_check_graph_accepts_healthy_graph():
    g = generate_er(50, 4, seed=0)
    assert check_graph(g) is g


def test_check_graph_rejects_bad_offsets():
    g = make_graph([(0, 1)])
    g.xadj[-1] += 1
    with pytest.raises(ValueError):
        check_graph(g)


def test_check_graph_rejects_out_of_range_weights():
    g = make_graph([(0, 1), (1, 2)])
    g.weights[0] = 1.5
    with pytest.raises(ConstraintError):
        check_graph(g)


def test_check_num_seeds():
    assert check_num_seeds(3, 10) == 3
    assert check_num_seeds("2", 10) == 2
    with pytest.raises(ConstraintError):
        check_num_seeds(0, 10)
    with pytest.raises(ConstraintError):
        check_num_seeds(11, 10)


def test_check_simulations():
    assert check_simulations(256) == 256
    with pytest.raises(ConstraintError):
        check_simulations(0)
