"""Landmark Isomap variants with a low-rank self-expressive acceleration of
the Fisher eigenproblem, plus baselines and an evaluation harness."""

__version__ = "0.1.0"

from .datasets import (
    Dataset,
    gen_labeled_clusters,
    gen_subspace_union,
    gen_swiss_roll,
    load_matrix,
    save_csv,
)
from .errors import (
    ArgumentError,
    DegenerateInputError,
    FormatError,
    NumericalError,
    ResourceError,
)
from .evaluation import (
    EvalReport,
    SpectrumReport,
    SweepTable,
    effective_rank,
    loocv_flda_accuracy,
    scaling_benchmark,
    spectrum_report,
    sweep,
    top_energy_fraction,
)
from .graph import (
    DistanceMatrix,
    GeodesicGraph,
    build_knn_graph,
    connect_components,
    full_geodesic_matrix,
    shortest_paths_from,
)
from .landmarks import ClusterModel, kmeans, random_landmarks, snap_to_medoids
from .linalg import (
    GramMatrix,
    ProjectionMatrix,
    ScatterPair,
    classical_mds,
    double_center,
    partial_gevd,
    scatter_matrices,
    soft_threshold,
    svt,
    sym,
)
from .lrr import LRRConfig, LRRSolution, LRRState, lrr_solve
from .pipelines import (
    LRR_REFERENCE_NORM,
    PipelineConfig,
    PipelineResult,
    classic_isomap,
    extended_clustered_isomap,
    low_rank_isomap,
    random_landmark_isomap,
    run_pipeline,
    save_result,
)

__all__ = [
    "ArgumentError",
    "ClusterModel",
    "Dataset",
    "DegenerateInputError",
    "DistanceMatrix",
    "EvalReport",
    "FormatError",
    "GeodesicGraph",
    "GramMatrix",
    "LRRConfig",
    "LRRSolution",
    "LRRState",
    "NumericalError",
    "LRR_REFERENCE_NORM",
    "PipelineConfig",
    "PipelineResult",
    "ProjectionMatrix",
    "ResourceError",
    "ScatterPair",
    "SpectrumReport",
    "SweepTable",
    "build_knn_graph",
    "classic_isomap",
    "classical_mds",
    "connect_components",
    "double_center",
    "effective_rank",
    "extended_clustered_isomap",
    "full_geodesic_matrix",
    "gen_labeled_clusters",
    "gen_subspace_union",
    "gen_swiss_roll",
    "kmeans",
    "load_matrix",
    "loocv_flda_accuracy",
    "low_rank_isomap",
    "lrr_solve",
    "partial_gevd",
    "random_landmark_isomap",
    "random_landmarks",
    "run_pipeline",
    "save_csv",
    "save_result",
    "scaling_benchmark",
    "scatter_matrices",
    "shortest_paths_from",
    "snap_to_medoids",
    "soft_threshold",
    "spectrum_report",
    "svt",
    "sweep",
    "sym",
    "top_energy_fraction",
]
