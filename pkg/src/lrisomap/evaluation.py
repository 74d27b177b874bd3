"""Embedding quality evaluation: transductive LOOCV classification,
generalized-eigenvalue spectrum reports, parameter sweeps, and a scaling
benchmark.

The LOOCV protocol is transductive on purpose: the embedding is fitted once
on all observations and only the linear discriminant classifier is refitted
per fold. Scores therefore compare embeddings, not out-of-sample inference.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, replace
from typing import Callable, NamedTuple, Sequence

import numpy as np

from .datasets import Dataset
from .errors import ArgumentError
from .linalg import partial_gevd, scatter_matrices, sym
from .lrr import LRRSolution
from .pipelines import PipelineConfig, run_pipeline


@dataclass(frozen=True)
class EvalReport:
    accuracy: float
    n_correct: int
    n_total: int
    per_class_accuracy: np.ndarray
    wall_clock_s: float


class SpectrumReport(NamedTuple):
    before: np.ndarray
    after: np.ndarray | None


@dataclass(frozen=True)
class SweepRow:
    variant: str
    param: str
    value: int
    accuracy: float
    wall_clock_s: float
    latent_dim: int
    n_landmarks: int
    seed: int
    error: str = ""


@dataclass(frozen=True)
class SweepTable:
    rows: tuple

    def to_csv(self, path) -> None:
        header = "variant,param,value,accuracy,wall_clock_s,latent_dim,n_landmarks,seed,error"
        with open(path, "w") as fh:
            fh.write(header + "\n")
            for r in self.rows:
                acc = "nan" if math.isnan(r.accuracy) else format(r.accuracy, ".17g")
                fh.write(
                    f"{r.variant},{r.param},{r.value},{acc},"
                    f"{r.wall_clock_s:.17g},{r.latent_dim},{r.n_landmarks},{r.seed},"
                    f"{r.error}\n"
                )


def loocv_flda_accuracy(latent: np.ndarray, labels: np.ndarray) -> EvalReport:
    """Leave-one-out accuracy of a linear discriminant nearest-mean classifier.

    For every held-out observation the discriminant basis is refitted on the
    rest (projecting to min(C-1, latent_dim) directions) and the held-out
    point is assigned to the nearest projected class mean. Requires at least
    two classes with at least two members each, so no fold can empty a class.
    """
    y = np.asarray(latent, dtype=np.float64)
    labels = np.asarray(labels)
    if y.ndim != 2 or labels.shape != (y.shape[0],):
        raise ArgumentError("latent must be (N, m) with one label per row")
    n, m = y.shape
    if n < 3:
        raise ArgumentError("need at least 3 observations")
    ids, counts = np.unique(labels, return_counts=True)
    if ids.size < 2:
        raise ArgumentError("need at least two classes")
    if (counts < 2).any():
        raise ArgumentError("every class needs at least two members")
    d = min(ids.size - 1, m)
    t0 = time.perf_counter()
    correct = np.zeros(ids.size, dtype=np.int64)
    total = np.zeros(ids.size, dtype=np.int64)
    mask = np.ones(n, dtype=bool)
    for i in range(n):
        mask[i] = False
        pair = scatter_matrices(y[mask], labels[mask])
        basis = partial_gevd(pair.s_b, pair.s_w, d).columns
        means = pair.class_means @ basis
        point = y[i] @ basis
        pred = pair.class_ids[int(np.argmin(np.linalg.norm(means - point, axis=1)))]
        k = int(np.searchsorted(ids, labels[i]))
        total[k] += 1
        correct[k] += int(pred == labels[i])
        mask[i] = True
    wall = time.perf_counter() - t0
    return EvalReport(
        accuracy=float(correct.sum() / n),
        n_correct=int(correct.sum()),
        n_total=n,
        per_class_accuracy=correct / total,
        wall_clock_s=wall,
    )


def effective_rank(a: np.ndarray, rel_tol: float = 1e-3) -> int:
    """Number of singular values above rel_tol times the largest."""
    if rel_tol <= 0:
        raise ArgumentError("rel_tol must be > 0")
    sv = np.linalg.svd(np.asarray(a, dtype=np.float64), compute_uv=False)
    if sv.size == 0 or sv[0] <= 0:
        return 0
    return int((sv > rel_tol * sv[0]).sum())


def spectrum_report(pair, lrr: LRRSolution | None = None) -> SpectrumReport:
    """Full generalized-eigenvalue spectra of a scatter pair.

    `before` is the spectrum of (s_b, s_w); with an LRR solution, `after`
    is the spectrum of the surrogate (sym(s_b @ z), s_w). Both are sorted
    descending and normalized by their own largest value.
    """
    f = pair.feature_dim
    before = partial_gevd(pair.s_b, pair.s_w, f).eigenvalues
    before = before / before[0]
    after = None
    if lrr is not None:
        surrogate = sym(pair.s_b @ lrr.z)
        after = partial_gevd(surrogate, pair.s_w, f).eigenvalues
        after = after / after[0]
    return SpectrumReport(before=before, after=after)


def top_energy_fraction(spectrum: np.ndarray, k: int) -> float:
    """Share of total spectrum mass held by the k largest entries."""
    s = np.asarray(spectrum, dtype=np.float64)
    if k < 1 or k > s.size:
        raise ArgumentError(f"k must be in [1, {s.size}]")
    total = s.sum()
    if total == 0:
        raise ArgumentError("spectrum sums to zero")
    return float(s[:k].sum() / total)


def sweep(
    data: Dataset,
    variants: Sequence[str],
    param: str,
    values: Sequence[int],
    seeds: Sequence[int],
    base: PipelineConfig | None = None,
) -> SweepTable:
    """Grid of pipeline runs scored by LOOCV accuracy.

    One row per (variant, value, seed), in deterministic grid order. A cell
    that raises is recorded with accuracy NaN and the error message; it does
    not abort the sweep. `param` is "n_landmarks" or "latent_dim".
    """
    if param not in ("n_landmarks", "latent_dim"):
        raise ArgumentError(f"sweep parameter must be n_landmarks or latent_dim, got {param!r}")
    if data.labels is None:
        raise ArgumentError("sweep scoring needs a labeled dataset")
    base = base or PipelineConfig()
    rows = []
    for variant in variants:
        for value in values:
            for seed in seeds:
                cfg = replace(base, variant=variant, seed=seed, **{param: int(value)})
                t0 = time.perf_counter()
                try:
                    result = run_pipeline(data, cfg)
                    report = loocv_flda_accuracy(result.embedding, data.labels)
                    rows.append(SweepRow(
                        variant=variant, param=param, value=int(value),
                        accuracy=report.accuracy,
                        wall_clock_s=time.perf_counter() - t0,
                        latent_dim=cfg.latent_dim, n_landmarks=cfg.n_landmarks,
                        seed=seed,
                    ))
                except Exception as exc:  # recorded, not fatal
                    rows.append(SweepRow(
                        variant=variant, param=param, value=int(value),
                        accuracy=float("nan"),
                        wall_clock_s=time.perf_counter() - t0,
                        latent_dim=cfg.latent_dim, n_landmarks=cfg.n_landmarks,
                        seed=seed, error=f"{type(exc).__name__}: {exc}",
                    ))
    return SweepTable(rows=tuple(rows))


def scaling_benchmark(
    make_dataset: Callable[[int], Dataset],
    sizes: Sequence[int],
    cfg: PipelineConfig,
    variants: Sequence[str] = ("low_rank",),
) -> list:
    """Stage timings of each variant across dataset sizes.

    Returns rows {variant, n, stage, seconds}. One warm-up run per variant
    at the smallest size is executed and discarded so library and cache
    effects do not pollute the first measurement. Sizes must be strictly
    increasing.
    """
    sizes = [int(s) for s in sizes]
    if sizes != sorted(set(sizes)) or len(sizes) == 0:
        raise ArgumentError("sizes must be strictly increasing and nonempty")
    rows = []
    for variant in variants:
        run_pipeline(make_dataset(sizes[0]), replace(cfg, variant=variant))  # warm-up
        for n in sizes:
            result = run_pipeline(make_dataset(n), replace(cfg, variant=variant))
            for stage, seconds in result.timings.items():
                rows.append({"variant": variant, "n": n, "stage": stage, "seconds": seconds})
    return rows


def write_scaling_csv(rows, path) -> None:
    with open(path, "w") as fh:
        fh.write("variant,n,stage,seconds\n")
        for r in rows:
            fh.write(f"{r['variant']},{r['n']},{r['stage']},{r['seconds']:.17g}\n")
