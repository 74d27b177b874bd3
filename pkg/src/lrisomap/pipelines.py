"""End-to-end embedding pipelines.

Four variants share the same building blocks:

- low_rank: k-means landmarks, geodesic features, Fisher scatter pair, a
  low-rank self-expressive surrogate of the between-class scatter, and a
  partial generalized eigensolve for the projection.
- extended_clustered: same front end, full generalized eigensolve on the
  raw scatter pair (no surrogate), truncated to the latent dimension.
- random_landmark: uniformly chosen landmarks, landmark MDS with distance
  triangulation for the remaining points.
- classic: all-pairs geodesic matrix, double centering, classical MDS.
  Guarded to N <= 5000 since it materializes the full matrix.

Every stage is wall-clock timed; `timings` carries per-stage seconds plus
the measured total.
"""

from __future__ import annotations

import dataclasses
import json
import time
from contextlib import contextmanager
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .datasets import Dataset
from .errors import ArgumentError, NumericalError, ResourceError
from .graph import (
    ALL_PAIRS,
    DistanceMatrix,
    build_knn_graph,
    connect_components,
    full_geodesic_matrix,
    shortest_paths_from,
)
from .landmarks import kmeans, random_landmarks, snap_to_medoids
from .linalg import (
    ProjectionMatrix,
    _fix_signs,
    classical_mds,
    double_center,
    partial_gevd,
    scatter_matrices,
    spectral_norm,
    sym,
)
from .lrr import LRRConfig, LRRSolution, lrr_solve

VARIANTS = ("low_rank", "extended_clustered", "random_landmark", "classic")

# Spectral norm the between-class scatter is rescaled to before the
# self-expressive decomposition; the solver's thresholds are absolute and
# behave usefully only in a band around this magnitude.
LRR_REFERENCE_NORM = 120.0

_CLASSIC_MAX_N = 5000


@dataclass(frozen=True)
class PipelineConfig:
    variant: str = "low_rank"
    n_landmarks: int = 20
    latent_dim: int = 2
    k_nn: int = 10
    feature_space: str = "geodesic"
    scatter_labels: str = "clusters"
    kmeans_max_iter: int = 100
    seed: int = 0
    lrr: LRRConfig = field(default_factory=LRRConfig)

    def __post_init__(self):
        if self.variant not in VARIANTS:
            raise ArgumentError(f"unknown variant {self.variant!r}; choose from {VARIANTS}")
        if self.latent_dim < 1:
            raise ArgumentError("latent_dim must be >= 1")
        if self.n_landmarks < 2:
            raise ArgumentError("n_landmarks must be >= 2")
        if self.k_nn < 1:
            raise ArgumentError("k_nn must be >= 1")
        if self.feature_space not in ("geodesic", "ambient"):
            raise ArgumentError(f"unknown feature_space {self.feature_space!r}")
        if self.scatter_labels not in ("clusters", "true"):
            raise ArgumentError(f"unknown scatter_labels {self.scatter_labels!r}")


@dataclass(frozen=True)
class PipelineResult:
    embedding: np.ndarray
    projection: ProjectionMatrix | None
    spectrum_before: np.ndarray | None
    spectrum_after: np.ndarray | None
    lrr_solution: LRRSolution | None
    timings: dict
    config: PipelineConfig


class _StageClock:
    def __init__(self):
        self.timings = {}
        self._start = time.perf_counter()

    @contextmanager
    def stage(self, name):
        t0 = time.perf_counter()
        yield
        self.timings[name] = time.perf_counter() - t0

    def done(self) -> dict:
        self.timings["total"] = time.perf_counter() - self._start
        return self.timings


def _normalized_spectrum(eigenvalues: np.ndarray) -> np.ndarray:
    top = eigenvalues[0]
    if not top > 0:
        raise NumericalError("largest generalized eigenvalue is not positive")
    return eigenvalues / top


def _geodesic_features(data: Dataset, landmark_indices, k_nn: int, clock: _StageClock):
    with clock.stage("graph"):
        graph = connect_components(build_knn_graph(data, k_nn), data)
    with clock.stage("geodesics"):
        dists = shortest_paths_from(graph, landmark_indices)
    return dists.values.T


def _clustered_front_end(data: Dataset, cfg: PipelineConfig, clock: _StageClock):
    """Landmark clustering, feature extraction, and the scatter pair."""
    with clock.stage("landmarks"):
        model = snap_to_medoids(kmeans(data, cfg.n_landmarks, cfg.kmeans_max_iter, cfg.seed), data)
    if cfg.feature_space == "geodesic":
        features = _geodesic_features(data, model.landmark_indices, cfg.k_nn, clock)
    else:
        features = data.samples
    if cfg.latent_dim > features.shape[1]:
        raise ArgumentError(
            f"latent_dim {cfg.latent_dim} exceeds feature dimension {features.shape[1]}"
        )
    if cfg.scatter_labels == "true":
        if data.labels is None:
            raise ArgumentError("scatter_labels='true' requires a labeled dataset")
        scatter_ids = data.labels
    else:
        scatter_ids = model.assignments
    with clock.stage("scatter"):
        pair = scatter_matrices(features, scatter_ids)
    return model, features, pair


def low_rank_isomap(data: Dataset, cfg: PipelineConfig | None = None) -> PipelineResult:
    """Landmark Isomap with the low-rank surrogate between-class scatter.

    The self-expressive solver's thresholds are absolute, so the stage feeds
    it a copy of S_B rescaled to a reference spectral norm. Z is scale-free
    and is applied to the raw S_B; the eigenvalue problem downstream depends
    only on ratios, so no other stage is affected.
    """
    cfg = cfg or PipelineConfig()
    clock = _StageClock()
    _, features, pair = _clustered_front_end(data, cfg, clock)
    with clock.stage("lrr"):
        norm = spectral_norm(pair.s_b)
        calibrated = pair.s_b * (LRR_REFERENCE_NORM / norm) if norm > 0 else pair.s_b
        solution = lrr_solve(calibrated, cfg.lrr)
        surrogate = sym(pair.s_b @ solution.z)
    f = pair.feature_dim
    with clock.stage("gevd"):
        projection = partial_gevd(surrogate, pair.s_w, cfg.latent_dim)
        before = _normalized_spectrum(partial_gevd(pair.s_b, pair.s_w, f).eigenvalues)
        after = _normalized_spectrum(partial_gevd(surrogate, pair.s_w, f).eigenvalues)
    with clock.stage("embed"):
        embedding = features @ projection.columns
    return PipelineResult(
        embedding=embedding,
        projection=projection,
        spectrum_before=before,
        spectrum_after=after,
        lrr_solution=solution,
        timings=clock.done(),
        config=cfg,
    )


def extended_clustered_isomap(data: Dataset, cfg: PipelineConfig | None = None) -> PipelineResult:
    """Same front end as low_rank, but the raw scatter pair is solved in full."""
    cfg = cfg or PipelineConfig(variant="extended_clustered")
    clock = _StageClock()
    _, features, pair = _clustered_front_end(data, cfg, clock)
    f = pair.feature_dim
    with clock.stage("gevd"):
        full = partial_gevd(pair.s_b, pair.s_w, f)
        before = _normalized_spectrum(full.eigenvalues)
        projection = ProjectionMatrix(
            columns=full.columns[:, : cfg.latent_dim],
            eigenvalues=full.eigenvalues[: cfg.latent_dim],
        )
    with clock.stage("embed"):
        embedding = features @ projection.columns
    return PipelineResult(
        embedding=embedding,
        projection=projection,
        spectrum_before=before,
        spectrum_after=None,
        lrr_solution=None,
        timings=clock.done(),
        config=cfg,
    )


def random_landmark_isomap(data: Dataset, cfg: PipelineConfig | None = None) -> PipelineResult:
    """Landmark MDS on uniformly sampled landmarks with triangulation."""
    cfg = cfg or PipelineConfig(variant="random_landmark")
    if cfg.latent_dim > cfg.n_landmarks:
        raise ArgumentError(
            f"latent_dim {cfg.latent_dim} exceeds the {cfg.n_landmarks}-landmark MDS rank"
        )
    clock = _StageClock()
    with clock.stage("landmarks"):
        indices = random_landmarks(data.n, cfg.n_landmarks, cfg.seed)
    with clock.stage("graph"):
        graph = connect_components(build_knn_graph(data, cfg.k_nn), data)
    with clock.stage("geodesics"):
        dist_to_all = shortest_paths_from(graph, indices).values
    with clock.stage("embed"):
        embedding = _triangulated_mds(dist_to_all, indices, cfg.latent_dim)
    return PipelineResult(
        embedding=embedding,
        projection=None,
        spectrum_before=None,
        spectrum_after=None,
        lrr_solution=None,
        timings=clock.done(),
        config=cfg,
    )


def _triangulated_mds(dist_to_all: np.ndarray, landmark_indices, m: int) -> np.ndarray:
    """Classical MDS on the landmark block, remaining points by triangulation.

    Triangulated coordinates of the landmarks themselves coincide with
    their MDS coordinates, so one formula covers every point.
    """
    d_ll = dist_to_all[:, landmark_indices]
    gram = double_center(DistanceMatrix(values=0.5 * (d_ll + d_ll.T), kind=ALL_PAIRS))
    vals, vecs = np.linalg.eigh(gram.values)
    order = np.argsort(vals)[::-1][:m]
    lam = vals[order]
    if (lam <= 0).any():
        raise NumericalError(
            f"landmark Gram matrix has fewer than {m} positive eigenvalues"
        )
    vecs = _fix_signs(vecs[:, order])
    delta = dist_to_all ** 2
    delta_mean = (d_ll ** 2).mean(axis=1)
    return -0.5 * (delta - delta_mean[:, None]).T @ (vecs / np.sqrt(lam))


def classic_isomap(data: Dataset, cfg: PipelineConfig | None = None) -> PipelineResult:
    """Full-matrix Isomap: all-pairs geodesics, double centering, MDS."""
    cfg = cfg or PipelineConfig(variant="classic")
    if data.n > _CLASSIC_MAX_N:
        raise ResourceError(
            f"classic variant materializes an N x N geodesic matrix; "
            f"N={data.n} exceeds the supported {_CLASSIC_MAX_N}"
        )
    clock = _StageClock()
    with clock.stage("graph"):
        graph = connect_components(build_knn_graph(data, cfg.k_nn), data)
    with clock.stage("geodesics"):
        dist = full_geodesic_matrix(graph)
    with clock.stage("embed"):
        embedding = classical_mds(double_center(dist), cfg.latent_dim)
    return PipelineResult(
        embedding=embedding,
        projection=None,
        spectrum_before=None,
        spectrum_after=None,
        lrr_solution=None,
        timings=clock.done(),
        config=cfg,
    )


_RUNNERS = {
    "low_rank": low_rank_isomap,
    "extended_clustered": extended_clustered_isomap,
    "random_landmark": random_landmark_isomap,
    "classic": classic_isomap,
}


def run_pipeline(data: Dataset, cfg: PipelineConfig) -> PipelineResult:
    """Dispatch to the configured variant."""
    return _RUNNERS[cfg.variant](data, cfg)


def _write_vector_csv(path: Path, header: str, values) -> None:
    with open(path, "w") as fh:
        fh.write(header + "\n")
        for v in values:
            fh.write(format(float(v), ".17g") + "\n")


def save_result(result: PipelineResult, out_dir) -> None:
    """Serialize a pipeline result into a directory.

    Writes embedding.csv always; spectrum_before.csv / spectrum_after.csv
    when the variant produced them; timings.json; config.json.
    """
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    m = result.embedding.shape[1]
    with open(out / "embedding.csv", "w") as fh:
        fh.write(",".join(f"y{j}" for j in range(m)) + "\n")
        for row in result.embedding:
            fh.write(",".join(format(v, ".17g") for v in row) + "\n")
    if result.spectrum_before is not None:
        _write_vector_csv(out / "spectrum_before.csv", "eigenvalue", result.spectrum_before)
    if result.spectrum_after is not None:
        _write_vector_csv(out / "spectrum_after.csv", "eigenvalue", result.spectrum_after)
    with open(out / "timings.json", "w") as fh:
        json.dump(result.timings, fh, indent=2, sort_keys=True)
        fh.write("\n")
    with open(out / "config.json", "w") as fh:
        json.dump(dataclasses.asdict(result.config), fh, indent=2, sort_keys=True)
        fh.write("\n")
