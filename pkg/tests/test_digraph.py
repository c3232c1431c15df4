"""Digraph construction, neighbor sets, reachability and strong connectivity."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from inertial_kuramoto.digraph import (
    Digraph,
    is_reachable,
    is_strongly_connected,
    neighbors,
    strongly_connected_components,
)


def test_ring_neighbor_sets():
    """On the 3-ring each vertex hears exactly its predecessor (0<-2, 1<-0, 2<-1)."""
    g = Digraph.ring(3)
    assert neighbors(g, 0) == {2}
    assert neighbors(g, 1) == {0}
    assert neighbors(g, 2) == {1}


def test_neighbors_empty_graph():
    g = Digraph(np.zeros((3, 3)))
    for i in range(3):
        assert neighbors(g, i) == set()


def test_neighbors_index_out_of_range():
    g = Digraph.ring(3)
    with pytest.raises(ValueError, match="out of range"):
        neighbors(g, 3)
    with pytest.raises(ValueError, match="out of range"):
        neighbors(g, -1)


def test_construction_rejects_bad_entries():
    with pytest.raises(ValueError, match="0 or 1"):
        Digraph(np.array([[0, 2], [1, 0]]))
    with pytest.raises(ValueError, match="self loops"):
        Digraph(np.array([[1, 0], [0, 0]]))
    with pytest.raises(ValueError, match="square"):
        Digraph(np.zeros((2, 3)))
    with pytest.raises(ValueError, match="0 or 1"):
        Digraph(np.array([[0, 0.5], [1, 0]]))


def test_from_flat_row_major():
    g = Digraph.from_flat(3, [0, 0, 1, 1, 0, 0, 0, 1, 0])
    assert (g.adjacency == Digraph.ring(3).adjacency).all()
    with pytest.raises(ValueError, match="9 entries"):
        Digraph.from_flat(3, [0, 1])


def test_adjacency_immutable():
    g = Digraph.ring(3)
    with pytest.raises(ValueError):
        g.adjacency[0, 1] = 1


def test_reachability_on_ring():
    g = Digraph.ring(3)
    assert is_reachable(g, 0, 1)
    assert is_reachable(g, 0, 2)
    assert is_reachable(g, 2, 0)


def test_reachability_isolated_and_self():
    g = Digraph(np.zeros((2, 2)))
    assert not is_reachable(g, 0, 1)
    assert is_reachable(g, 0, 0)  # empty path
    with pytest.raises(ValueError):
        is_reachable(g, 0, 2)


def test_strongly_connected_cases():
    assert is_strongly_connected(Digraph.ring(3))
    assert is_strongly_connected(Digraph(np.zeros((1, 1))))  # vacuous
    one_way = Digraph(np.array([[0, 0], [1, 0]]))  # only 0 -> 1
    assert not is_strongly_connected(one_way)


def test_scc_partition():
    # two 2-cycles joined by a single one-way edge
    adj = np.zeros((4, 4), dtype=int)
    adj[0, 1] = adj[1, 0] = 1       # 0 <-> 1
    adj[2, 3] = adj[3, 2] = 1       # 2 <-> 3
    adj[2, 1] = 1                   # 1 -> 2
    comps = strongly_connected_components(Digraph(adj))
    assert sorted(map(sorted, comps)) == [[0, 1], [2, 3]]


def test_with_reversed_edges_symmetrizes():
    g = Digraph.ring(3).with_reversed_edges()
    assert (g.adjacency == g.adjacency.T).all()
    assert is_strongly_connected(g)


@settings(max_examples=200, deadline=None)
@given(st.integers(2, 6), st.integers(0, 2 ** 30))
def test_scc_agrees_with_pairwise_reachability(n, seed):
    """Strong connectivity is equivalent to all-pairs reachability."""
    rng = np.random.default_rng(seed)
    adj = (rng.random((n, n)) < 0.35).astype(int)
    np.fill_diagonal(adj, 0)
    g = Digraph(adj)
    brute = all(is_reachable(g, i, j) for i in range(n) for j in range(n))
    assert is_strongly_connected(g) == brute


@settings(max_examples=100, deadline=None)
@given(st.integers(1, 6), st.integers(0, 2 ** 30))
def test_neighbors_never_contain_self(n, seed):
    rng = np.random.default_rng(seed)
    adj = (rng.random((n, n)) < 0.5).astype(int)
    np.fill_diagonal(adj, 0)
    g = Digraph(adj)
    for i in range(n):
        assert i not in neighbors(g, i)
