"""Landmark selection: seeded k-means with medoid snapping, plus a uniform
random baseline."""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np
from scipy.spatial.distance import cdist

from .errors import ArgumentError


@dataclass(frozen=True)
class ClusterModel:
    """Result of Lloyd's algorithm on the observations.

    inertia is the sum of squared distances to assigned centroids;
    inertia_trace records that objective after every update step and is
    non-increasing. landmark_indices are the data indices of the medoid
    nearest each centroid (distinct by construction).
    """

    centroids: np.ndarray
    assignments: np.ndarray
    inertia: float
    landmark_indices: np.ndarray
    iterations_run: int
    inertia_trace: tuple


def _samples_of(data) -> np.ndarray:
    x = getattr(data, "samples", data)
    return np.asarray(x, dtype=np.float64)


def _plus_plus_init(x: np.ndarray, k: int, rng: np.random.Generator) -> np.ndarray:
    n = x.shape[0]
    chosen = np.empty(k, dtype=np.int64)
    chosen[0] = rng.integers(n)
    d2 = np.sum((x - x[chosen[0]]) ** 2, axis=1)
    for i in range(1, k):
        total = d2.sum()
        if total <= 0:
            # every remaining point coincides with a chosen centroid
            remaining = np.setdiff1d(np.arange(n), chosen[:i])
            chosen[i] = rng.choice(remaining)
        else:
            chosen[i] = rng.choice(n, p=d2 / total)
        d2 = np.minimum(d2, np.sum((x - x[chosen[i]]) ** 2, axis=1))
    return x[chosen].copy()


def _assign_with_repair(x, centroids):
    """Nearest-centroid assignment; empty clusters grab the worst-fit point."""
    d2 = cdist(x, centroids, metric="sqeuclidean")
    assignments = np.argmin(d2, axis=1)
    k = centroids.shape[0]
    empty = [c for c in range(k) if not (assignments == c).any()]
    if empty:
        centroids = centroids.copy()
        taken = set()
        for c in empty:
            cost = d2[np.arange(x.shape[0]), assignments].copy()
            for t in taken:
                cost[t] = -np.inf
            far = int(np.argmax(cost))
            taken.add(far)
            centroids[c] = x[far]
            assignments[far] = c
    return assignments, centroids


def _objective(x, centroids, assignments) -> float:
    return float(np.sum((x - centroids[assignments]) ** 2))


def kmeans(data, n_clusters: int, max_iter: int = 100, seed: int = 0) -> ClusterModel:
    """Lloyd's algorithm with k-means++ seeding.

    Deterministic for a fixed seed. Stops at the assignment fixpoint or
    after max_iter iterations; a final assignment pass keeps the returned
    assignments consistent with the returned centroids either way.
    """
    x = _samples_of(data)
    n = x.shape[0]
    if not 2 <= n_clusters <= n:
        raise ArgumentError(f"n_clusters must be in [2, {n}], got {n_clusters}")
    if max_iter < 1:
        raise ArgumentError("max_iter must be >= 1")
    rng = np.random.default_rng(seed)
    centroids = _plus_plus_init(x, n_clusters, rng)
    assignments = None
    trace = []
    iterations = 0
    for _ in range(max_iter):
        iterations += 1
        new_assignments, centroids = _assign_with_repair(x, centroids)
        if assignments is not None and np.array_equal(new_assignments, assignments):
            assignments = new_assignments
            break
        assignments = new_assignments
        centroids = np.vstack([x[assignments == c].mean(axis=0) for c in range(n_clusters)])
        trace.append(_objective(x, centroids, assignments))
    assignments, centroids = _assign_with_repair(x, centroids)
    inertia = _objective(x, centroids, assignments)
    trace.append(inertia)
    model = ClusterModel(
        centroids=centroids,
        assignments=assignments,
        inertia=inertia,
        landmark_indices=np.empty(0, dtype=np.int64),
        iterations_run=iterations,
        inertia_trace=tuple(trace),
    )
    return snap_to_medoids(model, x)


def snap_to_medoids(model: ClusterModel, data) -> ClusterModel:
    """Replace each centroid index by its cluster's closest member.

    Ties at equal distance go to the lowest data index. Idempotent: the
    centroid coordinates themselves are left untouched, only the landmark
    indices are (re)computed.
    """
    x = _samples_of(data)
    k = model.centroids.shape[0]
    indices = np.empty(k, dtype=np.int64)
    for c in range(k):
        members = np.flatnonzero(model.assignments == c)
        if members.size == 0:
            raise ArgumentError(f"cluster {c} is empty; cannot snap to a medoid")
        d = np.linalg.norm(x[members] - model.centroids[c], axis=1)
        indices[c] = members[int(np.argmin(d))]
    return replace(model, landmark_indices=indices)


def random_landmarks(n: int, count: int, seed: int = 0) -> np.ndarray:
    """`count` distinct indices drawn uniformly from range(n), sorted."""
    if n < 1:
        raise ArgumentError("n must be >= 1")
    if not 1 <= count <= n:
        raise ArgumentError(f"count must be in [1, {n}], got {count}")
    rng = np.random.default_rng(seed)
    return np.sort(rng.choice(n, size=count, replace=False))
