"""Neighborhood graph construction and graph-distance computation.

Graphs are undirected with positive Euclidean edge weights, stored as
symmetric CSR adjacency. Construction is the union-symmetrized k-NN rule;
disconnected graphs are repaired by greedily bridging the closest pair of
components.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp
from scipy.sparse.csgraph import connected_components, dijkstra
from scipy.spatial.distance import cdist

from .errors import ArgumentError, DegenerateInputError

ALL_PAIRS = "all_pairs"
LANDMARK_TO_ALL = "landmark_to_all"


@dataclass(frozen=True)
class GeodesicGraph:
    """Undirected weighted graph over the observations."""

    n_nodes: int
    adjacency: sp.csr_matrix
    k_nn: int
    bridges: tuple = ()


@dataclass(frozen=True)
class DistanceMatrix:
    """Graph distances; rows are source nodes, columns all nodes."""

    values: np.ndarray
    kind: str

    def __post_init__(self):
        if self.kind not in (ALL_PAIRS, LANDMARK_TO_ALL):
            raise ArgumentError(f"unknown distance-matrix kind {self.kind!r}")


def _samples_of(data) -> np.ndarray:
    x = getattr(data, "samples", data)
    return np.asarray(x, dtype=np.float64)


def build_knn_graph(data, k_nn: int = 10) -> GeodesicGraph:
    """Union-symmetrized k-nearest-neighbor graph with Euclidean weights.

    Each node contributes edges to its k_nn nearest neighbors (ties broken
    toward lower index); an edge kept in either direction is kept in both.
    Duplicate points would create zero-weight edges and are rejected.
    """
    x = _samples_of(data)
    n = x.shape[0]
    if not 1 <= k_nn < n:
        raise ArgumentError(f"k_nn must be in [1, {n - 1}], got {k_nn}")
    dist = cdist(x, x)
    np.fill_diagonal(dist, np.inf)
    neighbor = np.argsort(dist, axis=1, kind="stable")[:, :k_nn]
    weight = np.take_along_axis(dist, neighbor, axis=1)
    if (weight <= 0).any():
        raise DegenerateInputError("duplicate points: zero-distance edge weight")
    rows = np.repeat(np.arange(n), k_nn)
    directed = sp.csr_matrix((weight.ravel(), (rows, neighbor.ravel())), shape=(n, n))
    return GeodesicGraph(n_nodes=n, adjacency=directed.maximum(directed.T), k_nn=k_nn)


def connect_components(graph: GeodesicGraph, data) -> GeodesicGraph:
    """Bridge a disconnected graph into one component.

    While more than one component remains, the single minimum-Euclidean-
    distance edge between the two closest components is added. Added edges
    are recorded in `bridges`. A connected graph is returned unchanged.
    """
    n_comp, labels = connected_components(graph.adjacency, directed=False)
    if n_comp <= 1:
        return graph
    x = _samples_of(data)
    if x.shape[0] != graph.n_nodes:
        raise ArgumentError("data does not match graph size")
    dist = cdist(x, x)
    labels = labels.copy()
    bridges = list(graph.bridges)
    new_edges = []
    while n_comp > 1:
        cross = np.where(labels[:, None] != labels[None, :], dist, np.inf)
        i, j = np.unravel_index(np.argmin(cross), cross.shape)
        bridges.append((int(min(i, j)), int(max(i, j))))
        new_edges.append((int(i), int(j), float(dist[i, j])))
        labels[labels == labels[j]] = labels[i]
        n_comp -= 1
    r, c, w = zip(*new_edges)
    extra = sp.csr_matrix(
        (np.concatenate([w, w]), (np.concatenate([r, c]), np.concatenate([c, r]))),
        shape=(graph.n_nodes, graph.n_nodes),
    )
    return GeodesicGraph(
        n_nodes=graph.n_nodes,
        adjacency=graph.adjacency.maximum(extra),
        k_nn=graph.k_nn,
        bridges=tuple(bridges),
    )


def _require_connected(graph: GeodesicGraph) -> None:
    n_comp, _ = connected_components(graph.adjacency, directed=False)
    if n_comp != 1:
        raise ArgumentError(
            f"graph has {n_comp} components; run connect_components first"
        )


def shortest_paths_from(graph: GeodesicGraph, sources) -> DistanceMatrix:
    """Multi-source graph distances, one row per source node."""
    sources = np.asarray(sources, dtype=np.int64)
    if sources.ndim != 1 or sources.size == 0:
        raise ArgumentError("sources must be a nonempty index vector")
    if sources.min() < 0 or sources.max() >= graph.n_nodes:
        raise ArgumentError(
            f"source index out of range [0, {graph.n_nodes}): {sources.min()}..{sources.max()}"
        )
    _require_connected(graph)
    values = dijkstra(graph.adjacency, directed=False, indices=sources)
    return DistanceMatrix(values=np.atleast_2d(values), kind=LANDMARK_TO_ALL)


def full_geodesic_matrix(graph: GeodesicGraph) -> DistanceMatrix:
    """All-pairs graph distances (symmetric, zero diagonal)."""
    _require_connected(graph)
    values = dijkstra(graph.adjacency, directed=False)
    values = 0.5 * (values + values.T)
    np.fill_diagonal(values, 0.0)
    return DistanceMatrix(values=values, kind=ALL_PAIRS)


def write_edge_list(graph: GeodesicGraph, path) -> None:
    """Dump edges as `i,j,weight` csv rows (upper triangle only)."""
    coo = sp.triu(graph.adjacency, k=1).tocoo()
    order = np.lexsort((coo.col, coo.row))
    with open(path, "w") as fh:
        fh.write("i,j,weight\n")
        for i, j, w in zip(coo.row[order], coo.col[order], coo.data[order]):
            fh.write(f"{i},{j},{w:.17g}\n")
