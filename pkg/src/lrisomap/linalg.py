"""Dense spectral kernels: centering, MDS, scatter matrices, proximal
operators, and the partial generalized eigensolver.

Everything here works on plain float64 arrays. Eigenvector columns follow a
deterministic sign convention (the entry of largest magnitude is positive) so
downstream embeddings are reproducible across equivalent inputs.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .errors import ArgumentError, NumericalError

log = logging.getLogger(__name__)

# full decompositions below this size are cheap enough to truncate; above it
# the partial solver switches to an iterative top-m routine
_ITERATIVE_CUTOFF = 512

_GEVD_RIDGE_SCALE = 1e-6


@dataclass(frozen=True)
class GramMatrix:
    """Double-centered inner-product matrix (symmetric, rows sum to ~0)."""

    values: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.values, dtype=np.float64)
        if v.ndim != 2 or v.shape[0] != v.shape[1]:
            raise ArgumentError(f"gram matrix must be square, got {v.shape}")
        object.__setattr__(self, "values", v)


@dataclass(frozen=True)
class ScatterPair:
    """Between-class and within-class scatter of a labeled feature matrix."""

    s_b: np.ndarray
    s_w: np.ndarray
    feature_dim: int
    n_classes: int
    global_mean: np.ndarray
    class_means: np.ndarray
    class_counts: np.ndarray
    class_ids: np.ndarray


@dataclass(frozen=True)
class ProjectionMatrix:
    """Top-m generalized eigenvectors (columns) with their eigenvalues."""

    columns: np.ndarray
    eigenvalues: np.ndarray


def sym(a: np.ndarray) -> np.ndarray:
    """Symmetric part (a + a.T) / 2."""
    return 0.5 * (a + a.T)


def _fix_signs(columns: np.ndarray) -> np.ndarray:
    out = columns.copy()
    for j in range(out.shape[1]):
        i = int(np.argmax(np.abs(out[:, j])))
        if out[i, j] < 0:
            out[:, j] = -out[:, j]
    return out


def _as_square_distances(dist) -> np.ndarray:
    values = getattr(dist, "values", dist)
    kind = getattr(dist, "kind", "all_pairs")
    if kind != "all_pairs":
        raise ArgumentError("double centering needs an all-pairs distance matrix")
    values = np.asarray(values, dtype=np.float64)
    if values.ndim != 2 or values.shape[0] != values.shape[1]:
        raise ArgumentError(f"distance matrix must be square, got {values.shape}")
    if not np.allclose(values, values.T, rtol=1e-10, atol=1e-10):
        raise ArgumentError("distance matrix must be symmetric")
    return values


def double_center(dist) -> GramMatrix:
    """Convert a square symmetric distance matrix to a centered Gram matrix.

    Entries are squared entrywise first, then both margins are removed:
    B = -1/2 * H D2 H with H = I - (1/N) 1 1^T.
    """
    d2 = _as_square_distances(dist) ** 2
    row = d2.mean(axis=1, keepdims=True)
    col = d2.mean(axis=0, keepdims=True)
    grand = d2.mean()
    b = -0.5 * (d2 - row - col + grand)
    return GramMatrix(sym(b))


def classical_mds(gram, m: int) -> np.ndarray:
    """Embed a Gram matrix into m dimensions via its top eigenpairs.

    Eigenvector columns are scaled by sqrt(eigenvalue); negative eigenvalues
    among the top m are clamped to zero (their magnitude is logged, since a
    large negative tail means the distances were far from Euclidean).
    """
    b = gram.values if isinstance(gram, GramMatrix) else np.asarray(gram, dtype=np.float64)
    n = b.shape[0]
    if m < 1 or m > n:
        raise ArgumentError(f"embedding dimension must be in [1, {n}], got {m}")
    vals, vecs = np.linalg.eigh(sym(b))
    order = np.argsort(vals)[::-1][:m]
    top = vals[order]
    if (top < 0).any():
        log.info("classical_mds: clamping %d negative eigenvalues (worst %.3e)",
                 int((top < 0).sum()), float(top.min()))
    top = np.maximum(top, 0.0)
    return _fix_signs(vecs[:, order]) * np.sqrt(top)


def scatter_matrices(features: np.ndarray, assignments: np.ndarray,
                     within: str = "class") -> ScatterPair:
    """Between-class and within-class scatter matrices of labeled features.

    Parameters
    ----------
    features : (N, F) array
    assignments : length-N integer vector, at least two nonempty classes
    within : "class" centers each group at its own mean (the standard
        within-class scatter); "global" centers every point at the grand
        mean instead, which makes s_w the total scatter.
    """
    x = np.asarray(features, dtype=np.float64)
    a = np.asarray(assignments)
    if x.ndim != 2:
        raise ArgumentError("features must be 2-D")
    if a.shape != (x.shape[0],):
        raise ArgumentError("assignments must be one label per row")
    if within not in ("class", "global"):
        raise ArgumentError(f"unknown within-scatter form {within!r}")
    ids, inverse, counts = np.unique(a, return_inverse=True, return_counts=True)
    if ids.size < 2:
        raise ArgumentError("need at least two nonempty classes")
    n, f = x.shape
    mu = x.mean(axis=0)
    class_means = np.zeros((ids.size, f))
    np.add.at(class_means, inverse, x)
    class_means /= counts[:, None]
    centered_means = class_means - mu
    s_b = (centered_means * counts[:, None]).T @ centered_means
    if within == "class":
        resid = x - class_means[inverse]
    else:
        resid = x - mu
    s_w = resid.T @ resid
    return ScatterPair(
        s_b=sym(s_b),
        s_w=sym(s_w),
        feature_dim=f,
        n_classes=int(ids.size),
        global_mean=mu,
        class_means=class_means,
        class_counts=counts,
        class_ids=ids,
    )


def soft_threshold(x, eps: float):
    """Entrywise shrinkage sgn(x) * max(|x| - eps, 0)."""
    if eps < 0:
        raise ArgumentError("threshold must be >= 0")
    x = np.asarray(x, dtype=np.float64)
    out = np.sign(x) * np.maximum(np.abs(x) - eps, 0.0)
    return float(out) if out.ndim == 0 else out


def svt(a: np.ndarray, eps: float, return_values: bool = False):
    """Singular value thresholding: U max(S - eps, 0) V^T.

    With return_values=True also returns the thresholded singular values
    (whose sum is the nuclear norm of the result).
    """
    if eps < 0:
        raise ArgumentError("threshold must be >= 0")
    a = np.asarray(a, dtype=np.float64)
    if not np.isfinite(a).all():
        raise ArgumentError("svt input must be finite")
    u, s, vt = np.linalg.svd(a, full_matrices=False)
    s = np.maximum(s - eps, 0.0)
    out = (u * s) @ vt
    return (out, s) if return_values else out


def spectral_norm(a: np.ndarray, tol: float = 1e-8, max_iter: int = 5000) -> float:
    """Largest singular value by power iteration on a^T a.

    Deterministic start vector; converges when the estimate's relative
    change drops below tol.
    """
    a = np.asarray(a, dtype=np.float64)
    n = a.shape[1]
    v = np.ones(n) / np.sqrt(n)
    sigma = 0.0
    for _ in range(max_iter):
        w = a.T @ (a @ v)
        norm = np.linalg.norm(w)
        if norm == 0.0:
            return 0.0
        v = w / norm
        new_sigma = float(np.sqrt(norm))
        if abs(new_sigma - sigma) <= tol * max(new_sigma, 1.0):
            return new_sigma
        sigma = new_sigma
    return sigma


def partial_gevd(a: np.ndarray, b: np.ndarray, m: int) -> ProjectionMatrix:
    """Top-m eigenpairs of the pencil (a, b + ridge*I), eigenvalues descending.

    b is ridge-regularized with 1e-6 * trace(b) / F, Cholesky-whitened, a
    symmetric eigensolve runs in the whitened coordinates, and vectors are
    mapped back. Returned columns satisfy w_i^T (b + ridge) w_j = delta_ij.
    For problems larger than 512 only an iterative top-m solve is run.
    """
    a = sym(np.asarray(a, dtype=np.float64))
    b = sym(np.asarray(b, dtype=np.float64))
    if a.shape != b.shape or a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ArgumentError(f"matrices must be square and same shape, got {a.shape} vs {b.shape}")
    f = a.shape[0]
    if m < 1 or m > f:
        raise ArgumentError(f"m must be in [1, {f}], got {m}")
    ridge = _GEVD_RIDGE_SCALE * np.trace(b) / f
    reg = b + ridge * np.eye(f)
    try:
        chol = scipy.linalg.cholesky(reg, lower=True)
    except scipy.linalg.LinAlgError as exc:
        raise NumericalError(
            "within-scatter matrix is not positive definite after ridge "
            f"regularization ({exc})"
        ) from None
    # whitened pencil: inv(L) a inv(L)^T
    half = scipy.linalg.solve_triangular(chol, a, lower=True)
    white = sym(scipy.linalg.solve_triangular(chol, half.T, lower=True))
    if f <= _ITERATIVE_CUTOFF or m == f:
        vals, vecs = scipy.linalg.eigh(white, subset_by_index=[f - m, f - 1])
        vals, vecs = vals[::-1], vecs[:, ::-1]
    else:
        from scipy.sparse.linalg import eigsh

        vals, vecs = eigsh(white, k=m, which="LA")
        order = np.argsort(vals)[::-1]
        vals, vecs = vals[order], vecs[:, order]
    columns = scipy.linalg.solve_triangular(chol.T, vecs, lower=False)
    return ProjectionMatrix(columns=_fix_signs(columns), eigenvalues=np.ascontiguousarray(vals))
