"""Command-line interface.

Subcommands: embed, eval, sweep, spectrum, bench. Every run writes a
manifest.json into its output directory recording the resolved
configuration, seed, tool version, input checksum, and timestamps;
replaying the manifest's argv reproduces all numeric outputs bit-for-bit
(timings excluded).

Wherever a dataset path is accepted, a generator spec works too:
`blobs`, `swiss:n=800,noise=0.05`, `subspaces:ambient=30,dim=2,k=3,per=20`.

Exit codes: 0 success, 1 runtime failure, 2 usage error.
"""

from __future__ import annotations

import argparse
import dataclasses
import hashlib
import json
import sys
import time
from datetime import datetime, timezone
from pathlib import Path

import numpy as np

from . import __version__
from .datasets import (
    Dataset,
    gen_labeled_clusters,
    gen_subspace_union,
    gen_swiss_roll,
    load_matrix,
)
from .errors import ArgumentError
from .evaluation import loocv_flda_accuracy, scaling_benchmark, sweep, write_scaling_csv
from .lrr import LRRConfig
from .pipelines import VARIANTS, PipelineConfig, run_pipeline, save_result

_GENERATORS = ("blobs", "swiss", "subspaces")

# option name -> (parser, default); config-file keys use the same names
_PIPELINE_OPTIONS = {
    "variant": (str, "low_rank"),
    "landmarks": (int, 20),
    "dim": (int, 2),
    "knn": (int, 10),
    "feature_space": (str, "geodesic"),
    "scatter_labels": (str, "clusters"),
    "kmeans_max_iter": (int, 100),
    "seed": (int, 0),
    "lrr_beta": (float, 1.0),
    "lrr_lambda": (float, 0.02),
    "lrr_mu0": (float, 1e-6),
    "lrr_mu_max": (float, 1e6),
    "lrr_rho0": (float, 2.5),
    "lrr_eps1": (float, 1e-6),
    "lrr_eps2": (float, 1e-2),
    "lrr_max_iter": (int, 1000),
}


class _UsageError(Exception):
    pass


def _parse_config_file(path: str) -> dict:
    values = {}
    try:
        lines = Path(path).read_text().splitlines()
    except OSError as exc:
        raise _UsageError(f"cannot read config file: {exc}") from None
    for lineno, raw in enumerate(lines, 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        if not sep:
            raise _UsageError(f"{path}:{lineno}: expected key=value, got {raw!r}")
        key = key.strip().replace("-", "_")
        if key not in _PIPELINE_OPTIONS:
            raise _UsageError(f"{path}:{lineno}: unknown option {key!r}")
        parse, _ = _PIPELINE_OPTIONS[key]
        try:
            values[key] = parse(value.strip())
        except ValueError as exc:
            raise _UsageError(f"{path}:{lineno}: {exc}") from None
    return values


def _resolve_options(args) -> dict:
    """Merge flag > config file > default."""
    from_file = _parse_config_file(args.config) if getattr(args, "config", None) else {}
    resolved = {}
    for name, (_, default) in _PIPELINE_OPTIONS.items():
        flag_value = getattr(args, name, None)
        if flag_value is not None:
            resolved[name] = flag_value
        elif name in from_file:
            resolved[name] = from_file[name]
        else:
            resolved[name] = default
    return resolved


def _pipeline_config(options: dict) -> PipelineConfig:
    try:
        return PipelineConfig(
            variant=options["variant"],
            n_landmarks=options["landmarks"],
            latent_dim=options["dim"],
            k_nn=options["knn"],
            feature_space=options["feature_space"],
            scatter_labels=options["scatter_labels"],
            kmeans_max_iter=options["kmeans_max_iter"],
            seed=options["seed"],
            lrr=LRRConfig(
                beta=options["lrr_beta"],
                lambda_err=options["lrr_lambda"],
                mu0=options["lrr_mu0"],
                mu_max=options["lrr_mu_max"],
                rho0=options["lrr_rho0"],
                eps1=options["lrr_eps1"],
                eps2=options["lrr_eps2"],
                max_iter=options["lrr_max_iter"],
            ),
        )
    except ArgumentError as exc:
        raise _UsageError(str(exc)) from None


def _is_generator_spec(spec: str) -> bool:
    if Path(spec).exists():
        return False
    return spec.partition(":")[0] in _GENERATORS


def _parse_generator_params(rest: str) -> dict:
    params = {}
    if not rest:
        return params
    for part in rest.split(","):
        key, sep, value = part.partition("=")
        if not sep:
            raise _UsageError(f"bad generator parameter {part!r} (expected k=v)")
        params[key.strip()] = value.strip()
    return params


def _make_generated(spec: str, seed: int, size: int | None = None) -> Dataset:
    name, _, rest = spec.partition(":")
    params = _parse_generator_params(rest)

    def take(key, parse, default):
        return parse(params.pop(key)) if key in params else default

    try:
        if name == "blobs":
            classes = take("classes", int, 4)
            per = take("per", int, 25)
            ambient = take("dim", int, 10)
            sep = take("sep", float, 8.0)
            if size is not None:
                if size % classes:
                    raise _UsageError(f"size {size} not divisible by {classes} classes")
                per = size // classes
            data = gen_labeled_clusters(classes, per, ambient, sep, seed)
        elif name == "swiss":
            n = take("n", int, 800)
            noise = take("noise", float, 0.0)
            if size is not None:
                n = size
            data = gen_swiss_roll(n, noise, seed)
        elif name == "subspaces":
            ambient = take("ambient", int, 30)
            dim = take("dim", int, 2)
            k = take("k", int, 3)
            per = take("per", int, 20)
            corruption = take("corruption", float, 0.0)
            if size is not None:
                if size % k:
                    raise _UsageError(f"size {size} not divisible by {k} subspaces")
                per = size // k
            data = gen_subspace_union(ambient, dim, k, per, corruption, seed)
        else:
            raise _UsageError(f"unknown generator {name!r}")
    except ValueError as exc:
        raise _UsageError(f"bad generator spec {spec!r}: {exc}") from None
    if params:
        raise _UsageError(f"unknown generator parameters {sorted(params)} in {spec!r}")
    return data


def _load_dataset(spec: str, fmt: str | None, seed: int) -> Dataset:
    if _is_generator_spec(spec):
        return _make_generated(spec, seed)
    path = Path(spec)
    if fmt is None:
        if path.is_dir():
            fmt = "image-dir"
        elif ".idx" in path.name or path.name.endswith((".idx", ".gz", "-ubyte")):
            fmt = "idx"
        else:
            fmt = "csv"
    return load_matrix(path, fmt)


def _input_checksum(spec: str) -> str:
    h = hashlib.sha256()
    path = Path(spec)
    if _is_generator_spec(spec):
        h.update(spec.encode())
    elif path.is_dir():
        for f in sorted(p for p in path.rglob("*") if p.is_file()):
            h.update(str(f.relative_to(path)).encode())
            h.update(f.read_bytes())
    else:
        h.update(path.read_bytes())
    return "sha256:" + h.hexdigest()


def _write_manifest(out: Path, command: str, argv: list, config: dict,
                    seed: int, input_spec: str | None, started: str) -> None:
    manifest = {
        "command": command,
        "argv": argv,
        "tool_version": __version__,
        "seed": seed,
        "input": input_spec,
        "input_checksum": _input_checksum(input_spec) if input_spec else None,
        "config": config,
        "started_utc": started,
        "finished_utc": datetime.now(timezone.utc).isoformat(),
    }
    with open(out / "manifest.json", "w") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)
        fh.write("\n")


def _write_labels(out: Path, data: Dataset) -> None:
    if data.labels is None:
        return
    with open(out / "labels.csv", "w") as fh:
        fh.write("label\n")
        for v in data.labels:
            fh.write(f"{int(v)}\n")


def _int_list(text: str) -> list:
    try:
        return [int(p) for p in text.split(",") if p.strip()]
    except ValueError:
        raise _UsageError(f"expected comma-separated integers, got {text!r}") from None


def _add_pipeline_flags(sub: argparse.ArgumentParser) -> None:
    sub.add_argument("--variant", choices=VARIANTS)
    sub.add_argument("--landmarks", type=int)
    sub.add_argument("--dim", type=int)
    sub.add_argument("--knn", type=int)
    sub.add_argument("--feature-space", dest="feature_space", choices=("geodesic", "ambient"))
    sub.add_argument("--scatter-labels", dest="scatter_labels", choices=("clusters", "true"))
    sub.add_argument("--kmeans-max-iter", dest="kmeans_max_iter", type=int)
    sub.add_argument("--seed", type=int)
    sub.add_argument("--config")
    for flag in ("beta", "lambda", "mu0", "mu-max", "rho0", "eps1", "eps2"):
        dest = "lrr_" + flag.replace("-", "_")
        sub.add_argument(f"--lrr-{flag}", dest=dest, type=float)
    sub.add_argument("--lrr-max-iter", dest="lrr_max_iter", type=int)


def _add_input_flags(sub: argparse.ArgumentParser) -> None:
    sub.add_argument("--input", required=True, help="dataset path or generator spec")
    sub.add_argument("--format", choices=("csv", "idx", "image-dir"))


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="lrisomap", description=__doc__.split("\n\n")[0])
    parser.add_argument("--version", action="version", version=__version__)
    subs = parser.add_subparsers(dest="command", required=True)

    embed = subs.add_parser("embed", help="run one embedding pipeline")
    _add_input_flags(embed)
    embed.add_argument("--out", required=True)
    _add_pipeline_flags(embed)
    embed.set_defaults(func=_cmd_embed)

    ev = subs.add_parser("eval", help="score a saved embedding by LOOCV accuracy")
    ev.add_argument("--run", required=True, help="directory written by embed")
    ev.add_argument("--out", help="output directory (default: the run directory)")
    ev.add_argument("--json", action="store_true", help="print the report as JSON")
    ev.set_defaults(func=_cmd_eval)

    sw = subs.add_parser("sweep", help="grid of runs scored by LOOCV accuracy")
    _add_input_flags(sw)
    sw.add_argument("--out", required=True)
    sw.add_argument("--param", required=True, choices=("landmarks", "dim"))
    sw.add_argument("--values", required=True, help="comma-separated integers")
    sw.add_argument("--variants", default="low_rank,extended_clustered")
    sw.add_argument("--seeds", default="0")
    _add_pipeline_flags(sw)
    sw.set_defaults(func=_cmd_sweep)

    sp = subs.add_parser("spectrum", help="generalized-eigenvalue spectra of a run")
    _add_input_flags(sp)
    sp.add_argument("--out", required=True)
    sp.add_argument("--no-lrr", action="store_true", help="skip the surrogate spectrum")
    _add_pipeline_flags(sp)
    sp.set_defaults(func=_cmd_spectrum)

    be = subs.add_parser("bench", help="stage-timing scaling benchmark")
    be.add_argument("--generator", default="blobs:dim=50",
                    help="generator spec; size is substituted per run")
    be.add_argument("--sizes", required=True, help="comma-separated increasing sizes")
    be.add_argument("--out", required=True)
    be.add_argument("--variants", default="low_rank")
    _add_pipeline_flags(be)
    be.set_defaults(func=_cmd_bench)
    return parser


def _cmd_embed(args, argv) -> int:
    options = _resolve_options(args)
    cfg = _pipeline_config(options)
    started = datetime.now(timezone.utc).isoformat()
    out = Path(args.out)
    try:
        data = _load_dataset(args.input, args.format, options["seed"])
    except _UsageError:
        raise
    except Exception as exc:
        print(f"error [load-input]: {exc}", file=sys.stderr)
        return 1
    try:
        result = run_pipeline(data, cfg)
    except Exception as exc:
        print(f"error [pipeline]: {exc}", file=sys.stderr)
        return 1
    try:
        save_result(result, out)
        _write_labels(out, data)
        _write_manifest(out, "embed", argv, dataclasses.asdict(cfg),
                        options["seed"], args.input, started)
    except OSError as exc:
        print(f"error [write-output]: {exc}", file=sys.stderr)
        return 1
    print(f"embedded {data.n} observations into {result.embedding.shape[1]} dimensions "
          f"({cfg.variant}); wrote {out}")
    return 0


def _read_column_csv(path: Path, parse):
    lines = path.read_text().splitlines()
    return [parse(line) for line in lines[1:] if line.strip()]


def _cmd_eval(args, argv) -> int:
    run_dir = Path(args.run)
    out = Path(args.out) if args.out else run_dir
    started = datetime.now(timezone.utc).isoformat()
    try:
        emb_path = run_dir / "embedding.csv"
        lab_path = run_dir / "labels.csv"
        if not emb_path.exists():
            raise ArgumentError(f"{emb_path} not found (is this an embed output?)")
        if not lab_path.exists():
            raise ArgumentError(f"{lab_path} not found; eval needs a labeled run")
        embedding = np.loadtxt(emb_path, delimiter=",", skiprows=1, ndmin=2)
        labels = np.asarray(_read_column_csv(lab_path, int))
    except Exception as exc:
        print(f"error [load-run]: {exc}", file=sys.stderr)
        return 1
    try:
        report = loocv_flda_accuracy(embedding, labels)
    except Exception as exc:
        print(f"error [evaluate]: {exc}", file=sys.stderr)
        return 1
    payload = {
        "accuracy": report.accuracy,
        "n_correct": report.n_correct,
        "n_total": report.n_total,
        "per_class_accuracy": [float(v) for v in report.per_class_accuracy],
    }
    try:
        out.mkdir(parents=True, exist_ok=True)
        with open(out / "report.json", "w") as fh:
            json.dump(payload, fh, indent=2, sort_keys=True)
            fh.write("\n")
        _write_manifest(out, "eval", argv, payload, 0, None, started)
    except OSError as exc:
        print(f"error [write-output]: {exc}", file=sys.stderr)
        return 1
    if args.json:
        print(json.dumps(payload, sort_keys=True))
    else:
        print(f"loocv accuracy {report.accuracy:.4f} "
              f"({report.n_correct}/{report.n_total})")
    return 0


def _cmd_sweep(args, argv) -> int:
    options = _resolve_options(args)
    base = _pipeline_config(options)
    param = {"landmarks": "n_landmarks", "dim": "latent_dim"}[args.param]
    values = _int_list(args.values)
    seeds = _int_list(args.seeds)
    variants = [v.strip() for v in args.variants.split(",") if v.strip()]
    for v in variants:
        if v not in VARIANTS:
            raise _UsageError(f"unknown variant {v!r}")
    if not values or not seeds or not variants:
        raise _UsageError("values, seeds, and variants must be nonempty")
    started = datetime.now(timezone.utc).isoformat()
    out = Path(args.out)
    try:
        data = _load_dataset(args.input, args.format, options["seed"])
        table = sweep(data, variants, param, values, seeds, base)
        out.mkdir(parents=True, exist_ok=True)
        table.to_csv(out / "sweep.csv")
        _write_manifest(out, "sweep", argv, dataclasses.asdict(base),
                        options["seed"], args.input, started)
    except _UsageError:
        raise
    except Exception as exc:
        print(f"error [sweep]: {exc}", file=sys.stderr)
        return 1
    n_failed = sum(1 for r in table.rows if r.error)
    print(f"swept {len(table.rows)} cells ({n_failed} failed); wrote {out / 'sweep.csv'}")
    return 0


def _cmd_spectrum(args, argv) -> int:
    options = _resolve_options(args)
    if args.no_lrr:
        options = dict(options, variant="extended_clustered")
    elif options["variant"] not in ("low_rank", "extended_clustered"):
        raise _UsageError("spectrum needs a clustered variant (low_rank or extended_clustered)")
    cfg = _pipeline_config(options)
    started = datetime.now(timezone.utc).isoformat()
    out = Path(args.out)
    try:
        data = _load_dataset(args.input, args.format, options["seed"])
        result = run_pipeline(data, cfg)
        out.mkdir(parents=True, exist_ok=True)
        for name, spectrum in (("spectrum_before.csv", result.spectrum_before),
                               ("spectrum_after.csv", result.spectrum_after)):
            if spectrum is None:
                continue
            with open(out / name, "w") as fh:
                fh.write("eigenvalue\n")
                for v in spectrum:
                    fh.write(format(float(v), ".17g") + "\n")
        _write_manifest(out, "spectrum", argv, dataclasses.asdict(cfg),
                        options["seed"], args.input, started)
    except _UsageError:
        raise
    except Exception as exc:
        print(f"error [spectrum]: {exc}", file=sys.stderr)
        return 1
    print(f"wrote spectra for {cfg.variant} to {out}")
    return 0


def _cmd_bench(args, argv) -> int:
    options = _resolve_options(args)
    cfg = _pipeline_config(options)
    sizes = _int_list(args.sizes)
    if sizes != sorted(set(sizes)):
        raise _UsageError("sizes must be strictly increasing")
    variants = [v.strip() for v in args.variants.split(",") if v.strip()]
    for v in variants:
        if v not in VARIANTS:
            raise _UsageError(f"unknown variant {v!r}")
    if not _is_generator_spec(args.generator):
        raise _UsageError(f"bench needs a generator spec, got {args.generator!r}")
    seed = options["seed"]

    def make(n: int) -> Dataset:
        return _make_generated(args.generator, seed, size=n)

    make(sizes[0])  # surface generator/size problems as usage errors early
    started = datetime.now(timezone.utc).isoformat()
    out = Path(args.out)
    try:
        rows = scaling_benchmark(make, sizes, cfg, variants)
        out.mkdir(parents=True, exist_ok=True)
        write_scaling_csv(rows, out / "scaling.csv")
        _write_manifest(out, "bench", argv, dataclasses.asdict(cfg),
                        seed, args.generator, started)
    except Exception as exc:
        print(f"error [bench]: {exc}", file=sys.stderr)
        return 1
    print(f"benchmarked {variants} at sizes {sizes}; wrote {out / 'scaling.csv'}")
    return 0


def main(argv=None) -> int:
    argv = list(sys.argv[1:]) if argv is None else list(argv)
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args, argv)
    except _UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
