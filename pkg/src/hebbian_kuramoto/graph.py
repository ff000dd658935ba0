"""Simple undirected graphs with a canonical edge order.

Every per-edge quantity in this package (coupling strengths, incidence
columns, edge weights) is indexed by the same canonical order: edges are
stored as pairs (i, j) with i < j, sorted lexicographically. Column k of an
incidence matrix always refers to edge k in that order.

Sign convention for incidence: column k carries -w_k at row i_k and +w_k at
row j_k. With that orientation, incidence(w) @ incidence(w).T equals the
weighted Laplacian built from the squared weights w_k**2.
"""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from functools import cached_property
from pathlib import Path

import numpy as np


@dataclass(frozen=True)
class Graph:
    """Undirected graph on vertices 0..n_vertices-1 with canonical edges.

    The constructor insists on canonical form: each edge (i, j) with
    0 <= i < j < n_vertices, strictly sorted lexicographically (which also
    rules out duplicates). Use graph_from_edges to normalize arbitrary pairs.
    """

    n_vertices: int
    edges: tuple[tuple[int, int], ...]

    def __post_init__(self):
        if int(self.n_vertices) < 1:
            raise ValueError("graph needs at least one vertex")
        object.__setattr__(self, "n_vertices", int(self.n_vertices))
        edges = tuple((int(i), int(j)) for i, j in self.edges)
        object.__setattr__(self, "edges", edges)
        prev = None
        for i, j in edges:
            if not (0 <= i < self.n_vertices and 0 <= j < self.n_vertices):
                raise ValueError(
                    f"edge ({i}, {j}) out of range for {self.n_vertices} vertices"
                )
            if i >= j:
                raise ValueError(f"edge ({i}, {j}) must satisfy i < j")
            if prev is not None and (i, j) <= prev:
                raise ValueError("edge list must be strictly sorted")
            prev = (i, j)

    @property
    def n_edges(self) -> int:
        return len(self.edges)

    @cached_property
    def edge_i(self) -> np.ndarray:
        arr = np.array([i for i, _ in self.edges], dtype=np.intp)
        arr.flags.writeable = False
        return arr

    @cached_property
    def edge_j(self) -> np.ndarray:
        arr = np.array([j for _, j in self.edges], dtype=np.intp)
        arr.flags.writeable = False
        return arr

    @cached_property
    def degrees(self) -> np.ndarray:
        deg = np.bincount(self.edge_i, minlength=self.n_vertices)
        deg = deg + np.bincount(self.edge_j, minlength=self.n_vertices)
        deg.flags.writeable = False
        return deg

    @cached_property
    def incidence_pattern(self) -> np.ndarray:
        """Unweighted incidence: -1 at (i_k, k), +1 at (j_k, k)."""
        pat = np.zeros((self.n_vertices, self.n_edges))
        cols = np.arange(self.n_edges)
        pat[self.edge_i, cols] = -1.0
        pat[self.edge_j, cols] = 1.0
        pat.flags.writeable = False
        return pat

    def is_connected(self) -> bool:
        if self.n_vertices == 1:
            return True
        adjacency: list[list[int]] = [[] for _ in range(self.n_vertices)]
        for i, j in self.edges:
            adjacency[i].append(j)
            adjacency[j].append(i)
        seen = np.zeros(self.n_vertices, dtype=bool)
        seen[0] = True
        queue = deque([0])
        while queue:
            v = queue.popleft()
            for u in adjacency[v]:
                if not seen[u]:
                    seen[u] = True
                    queue.append(u)
        return bool(seen.all())


def complete_graph(n: int) -> Graph:
    """All-to-all graph on n vertices; edges come out canonically sorted."""
    if n < 1:
        raise ValueError("graph needs at least one vertex")
    edges = tuple((i, j) for i in range(n) for j in range(i + 1, n))
    return Graph(n, edges)


def graph_from_edges(n_vertices: int, pairs) -> Graph:
    """Build a Graph from unnormalized vertex pairs.

    Pairs may come in either orientation; they are flipped to (low, high)
    and sorted. Self-loops and duplicate edges are rejected.
    """
    normalized = []
    for i, j in pairs:
        i, j = int(i), int(j)
        if i == j:
            raise ValueError(f"self-loop ({i}, {j}) not allowed")
        normalized.append((min(i, j), max(i, j)))
    normalized.sort()
    for prev, cur in zip(normalized, normalized[1:]):
        if prev == cur:
            raise ValueError(f"duplicate edge {cur}")
    return Graph(n_vertices, tuple(normalized))


def incidence_matrix(g: Graph, edge_weights) -> np.ndarray:
    """Weighted incidence matrix, n_vertices x n_edges.

    Column k holds -w_k at row i_k and +w_k at row j_k.
    """
    w = _as_edge_weights(g, edge_weights)
    return g.incidence_pattern * w


def laplacian_from_weights(g: Graph, edge_weights) -> np.ndarray:
    """Weighted graph Laplacian: off-diagonal -w_k, diagonal sums of incident weights.

    Symmetric by construction with exact zero row sums up to the float sums
    involved; positive semidefinite when all weights are nonnegative.
    """
    w = _as_edge_weights(g, edge_weights)
    n = g.n_vertices
    lap = np.zeros((n, n))
    lap[g.edge_i, g.edge_j] = -w
    lap[g.edge_j, g.edge_i] = -w
    diag = np.bincount(g.edge_i, weights=w, minlength=n)
    diag = diag + np.bincount(g.edge_j, weights=w, minlength=n)
    lap[np.diag_indices(n)] = diag
    return lap


def _as_edge_weights(g: Graph, edge_weights) -> np.ndarray:
    w = np.asarray(edge_weights, dtype=float)
    if w.shape != (g.n_edges,):
        raise ValueError(
            f"expected {g.n_edges} edge weights, got shape {w.shape}"
        )
    return w


def parse_edge_list(text: str) -> Graph:
    """Parse the on-disk graph format.

    First content line is a header "n <N>", then one "i j" pair per line.
    Blank lines and lines starting with # are ignored. Pairs are normalized
    to (low, high) order.
    """
    n_vertices = None
    pairs = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        fields = line.split()
        if n_vertices is None:
            if len(fields) != 2 or fields[0] != "n":
                raise ValueError(f"line {lineno}: expected header 'n <N>'")
            try:
                n_vertices = int(fields[1])
            except ValueError:
                raise ValueError(f"line {lineno}: bad vertex count {fields[1]!r}")
            continue
        if len(fields) != 2:
            raise ValueError(f"line {lineno}: expected 'i j', got {line!r}")
        try:
            pairs.append((int(fields[0]), int(fields[1])))
        except ValueError:
            raise ValueError(f"line {lineno}: bad edge {line!r}")
    if n_vertices is None:
        raise ValueError("empty graph file, expected header 'n <N>'")
    return graph_from_edges(n_vertices, pairs)


def load_graph(path) -> Graph:
    return parse_edge_list(Path(path).read_text())


def parse_graph_spec(spec: str) -> Graph:
    """Resolve a graph argument: either "complete:<N>" or a path to an edge list."""
    spec = spec.strip()
    if spec.startswith("complete:"):
        try:
            n = int(spec.split(":", 1)[1])
        except ValueError:
            raise ValueError(f"bad graph spec {spec!r}")
        return complete_graph(n)
    return load_graph(spec)
