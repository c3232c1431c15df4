"""Directed interaction networks.

The coupling topology is a digraph on vertices 0..n-1 held as a dense 0/1
adjacency matrix: ``adjacency[i, j] == 1`` means vertex j directly influences
vertex i (j is an in-neighbor of i). Self loops are excluded. Influence flows
along a path i -> ... -> j when each vertex on it is an in-neighbor of the
next one.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = [
    "Digraph",
    "neighbors",
    "is_reachable",
    "is_strongly_connected",
    "strongly_connected_components",
]


@dataclass(frozen=True)
class Digraph:
    """Dense 0/1 adjacency matrix, immutable after construction."""

    adjacency: np.ndarray

    def __post_init__(self):
        adj = np.asarray(self.adjacency)
        if adj.ndim != 2 or adj.shape[0] != adj.shape[1] or adj.shape[0] < 1:
            raise ValueError("adjacency must be a square matrix with at least one vertex")
        if not np.isin(adj, (0, 1)).all():
            raise ValueError("adjacency entries must be exactly 0 or 1")
        if np.diagonal(adj).any():
            raise ValueError("self loops are not allowed (nonzero diagonal entry)")
        adj = adj.astype(np.int64, copy=True)
        adj.setflags(write=False)
        object.__setattr__(self, "adjacency", adj)

    @property
    def n(self) -> int:
        return self.adjacency.shape[0]

    @classmethod
    def from_flat(cls, n: int, entries) -> "Digraph":
        """Build from a row-major sequence of n*n entries (the config file format)."""
        flat = np.asarray(entries)
        if flat.size != n * n:
            raise ValueError(f"adjacency needs {n * n} entries for n = {n}, got {flat.size}")
        return cls(flat.reshape(n, n))

    @classmethod
    def ring(cls, n: int) -> "Digraph":
        """Directed cycle 0 -> 1 -> ... -> n-1 -> 0; each vertex hears its predecessor."""
        if n < 2:
            raise ValueError("a directed ring needs at least 2 vertices")
        adj = np.zeros((n, n), dtype=np.int64)
        for i in range(n):
            adj[i, (i - 1) % n] = 1
        return cls(adj)

    def with_reversed_edges(self) -> "Digraph":
        """Symmetrized copy: every edge together with its reverse."""
        return Digraph(self.adjacency | self.adjacency.T)


def _check_index(g: Digraph, i: int) -> None:
    if not 0 <= i < g.n:
        raise ValueError(f"vertex index {i} out of range for n = {g.n}")


def neighbors(g: Digraph, i: int) -> set[int]:
    """In-neighbor set of vertex i: the vertices that directly influence it."""
    _check_index(g, i)
    return set(np.flatnonzero(g.adjacency[i]).tolist())


def is_reachable(g: Digraph, i: int, j: int) -> bool:
    """True iff influence can flow from vertex i to vertex j.

    Every vertex reaches itself (empty path). The successors of u are the
    vertices that list u as an in-neighbor, i.e. column u of the adjacency.
    """
    _check_index(g, i)
    _check_index(g, j)
    if i == j:
        return True
    seen = np.zeros(g.n, dtype=bool)
    seen[i] = True
    stack = [i]
    while stack:
        u = stack.pop()
        for v in np.flatnonzero(g.adjacency[:, u]):
            if v == j:
                return True
            if not seen[v]:
                seen[v] = True
                stack.append(int(v))
    return False


def strongly_connected_components(g: Digraph) -> list[list[int]]:
    """Kosaraju's two-pass linear-time decomposition into strongly connected components."""
    n = g.n
    succs = [np.flatnonzero(g.adjacency[:, u]) for u in range(n)]
    preds = [np.flatnonzero(g.adjacency[u, :]) for u in range(n)]

    # First pass: record DFS finish order on the successor graph.
    finish: list[int] = []
    seen = np.zeros(n, dtype=bool)
    for start in range(n):
        if seen[start]:
            continue
        seen[start] = True
        stack: list[tuple[int, int]] = [(start, 0)]
        while stack:
            u, k = stack[-1]
            if k < len(succs[u]):
                stack[-1] = (u, k + 1)
                v = int(succs[u][k])
                if not seen[v]:
                    seen[v] = True
                    stack.append((v, 0))
            else:
                stack.pop()
                finish.append(u)

    # Second pass: collect components on the reversed graph in reverse finish order.
    components: list[list[int]] = []
    assigned = np.zeros(n, dtype=bool)
    for start in reversed(finish):
        if assigned[start]:
            continue
        assigned[start] = True
        component = [start]
        stack2 = [start]
        while stack2:
            u = stack2.pop()
            for v in preds[u]:
                v = int(v)
                if not assigned[v]:
                    assigned[v] = True
                    component.append(v)
                    stack2.append(v)
        components.append(sorted(component))
    return components


def is_strongly_connected(g: Digraph) -> bool:
    """True iff every vertex is reachable from every other vertex (exactly one component)."""
    return len(strongly_connected_components(g)) == 1
