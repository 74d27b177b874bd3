"""Run every pipeline variant on the same labeled blobs and compare them.

Prints LOOCV accuracy and wall time per variant, then shows that the
landmark approximation is exact in the limit: with every point promoted
to a landmark, the random-landmark embedding matches the classic one up
to a rigid motion.
"""

import numpy as np

import lrisomap as lr
from lrisomap.pipelines import VARIANTS


def rigid_misfit(a, b):
    # best rotation/reflection of b onto a after centering, scale kept fixed
    a = a - a.mean(axis=0)
    b = b - b.mean(axis=0)
    u, _, vt = np.linalg.svd(b.T @ a)
    return np.linalg.norm(b @ (u @ vt) - a) / np.linalg.norm(a)


def main():
    data = lr.gen_labeled_clusters(4, 25, 10, separation=8.0, seed=0)
    print(f"dataset: {data.name}, {data.n} points in {data.dim} dimensions, "
          f"{len(np.unique(data.labels))} classes\n")

    print(f"{'variant':>20}  {'accuracy':>8}  {'total s':>8}")
    for variant in VARIANTS:
        cfg = lr.PipelineConfig(variant=variant, n_landmarks=8, latent_dim=2, k_nn=6)
        result = lr.run_pipeline(data, cfg)
        report = lr.loocv_flda_accuracy(result.embedding, data.labels)
        print(f"{variant:>20}  {report.accuracy:8.4f}  {result.timings['total']:8.3f}")

    small = lr.gen_swiss_roll(120, noise=0.0, seed=0)
    classic = lr.run_pipeline(small, lr.PipelineConfig(variant="classic", latent_dim=2))
    full = lr.run_pipeline(
        small,
        lr.PipelineConfig(variant="random_landmark", n_landmarks=small.n, latent_dim=2),
    )
    misfit = rigid_misfit(classic.embedding, full.embedding)
    print(f"\nrandom_landmark with all {small.n} points as landmarks vs classic: "
          f"rigid misfit {misfit:.2e}")


if __name__ == "__main__":
    main()
