"""Show how the self-expressive projection concentrates the eigen-spectrum.

The discriminant pencil of landmark geodesic features usually spreads its
energy over many generalized eigenvalues. Projecting the between-scatter
through the low-rank representation trims that tail: the same number of
leading eigenvalues captures a larger share of the total, and the
effective rank of the scatter drops. Saves a side-by-side spectrum plot.
"""

import argparse
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt

import lrisomap as lr


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--out", default="demo_output", help="directory for the figure")
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    data = lr.gen_labeled_clusters(8, 25, 50, separation=5.0, seed=args.seed)
    cfg = lr.PipelineConfig(n_landmarks=20, latent_dim=2, seed=args.seed)
    result = lr.run_pipeline(data, cfg)

    before = result.spectrum_before
    after = result.spectrum_after
    for k in (2, 5):
        print(f"top-{k} energy fraction: raw pencil "
              f"{lr.top_energy_fraction(before, k):.4f}, projected "
              f"{lr.top_energy_fraction(after, k):.4f}")
    print(f"effective rank of the representation: {lr.effective_rank(result.lrr_solution.z)}")

    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    fig, ax = plt.subplots(figsize=(7, 4))
    idx = range(1, len(before) + 1)
    ax.plot(idx, before, "o-", label="raw pencil")
    ax.plot(idx, after, "s-", label="after projection")
    ax.set_xlabel("eigenvalue index")
    ax.set_ylabel("normalized generalized eigenvalue")
    ax.set_title("spectrum of the discriminant pencil")
    ax.legend()
    fig.tight_layout()
    path = out / "spectrum.png"
    fig.savefig(path, dpi=120)
    print(f"figure saved to {path}")


if __name__ == "__main__":
    main()
