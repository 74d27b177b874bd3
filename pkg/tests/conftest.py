import numpy as np
import pytest

import lrisomap as lr


@pytest.fixture
def blobs4():
    return lr.gen_labeled_clusters(4, 25, 10, separation=8.0, seed=0)


@pytest.fixture
def blobs8():
    return lr.gen_labeled_clusters(8, 25, 50, separation=5.0, seed=0)


@pytest.fixture
def swiss():
    return lr.gen_swiss_roll(300, noise=0.05, seed=0)


@pytest.fixture
def subspaces():
    return lr.gen_subspace_union(30, 2, 3, 20, 0.0, seed=0)


def procrustes_residual(a, b):
    """Relative misfit of b to a after optimal rotation/reflection+translation.

    Keeps scale fixed: the variants under comparison embed actual geodesic
    distances, so a scale-free match would hide errors.
    """
    a = a - a.mean(axis=0)
    b = b - b.mean(axis=0)
    u, _, vt = np.linalg.svd(b.T @ a)
    rot = u @ vt
    return np.linalg.norm(b @ rot - a) / np.linalg.norm(a)


def floyd_warshall(weights):
    """Dense all-pairs shortest paths; reference for the sparse solver."""
    n = weights.shape[0]
    dist = np.where(weights > 0, weights, np.inf)
    np.fill_diagonal(dist, 0.0)
    for k in range(n):
        dist = np.minimum(dist, dist[:, k : k + 1] + dist[k : k + 1, :])
    return dist


def block_mass_fraction(z, labels):
    az = np.abs(z)
    total = az.sum()
    if total == 0:
        return float("nan")
    same = labels[:, None] == labels[None, :]
    return az[same].sum() / total
