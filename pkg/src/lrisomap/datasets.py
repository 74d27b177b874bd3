"""Dataset container, file loaders, and seeded synthetic generators.

All generators are pure functions of their arguments: the same seed yields
bit-identical output. Loaders normalize everything to float64 row-major
samples with optional contiguous integer labels.
"""

from __future__ import annotations

import csv
import gzip
import struct
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import ArgumentError, FormatError

_IMAGE_EXTENSIONS = {".png", ".pgm", ".jpg", ".jpeg", ".bmp"}

# Subspace columns need entries well above the self-expressive solver's
# absolute thresholds, but not so large that its penalty ramp stalls.
_SUBSPACE_COEFF = 15.0

# Corruption spikes, as multiples of the clean matrix std. Big enough to
# outrank residual noise in the solver's error term, small enough that a
# corrupted column isn't cheaper to reproduce via its own unit coefficient.
_CORRUPT_LO = 3.0
_CORRUPT_HI = 6.0

# IDX type codes -> big-endian numpy dtypes
_IDX_DTYPES = {
    0x08: ">u1",
    0x09: ">i1",
    0x0B: ">i2",
    0x0C: ">i4",
    0x0D: ">f4",
    0x0E: ">f8",
}


@dataclass(frozen=True)
class Dataset:
    """N observations of dimension M stored row-wise, with optional labels.

    Labels, when present, are contiguous class ids 0..C-1 with every class
    nonempty. `intrinsic` and `corruption_mask` hold generator metadata
    (the swiss roll keeps its manifold coordinates, the subspace generator
    its corrupted-entry mask); loaders leave both unset.
    """

    samples: np.ndarray
    labels: np.ndarray | None
    name: str
    source: str
    intrinsic: np.ndarray | None = None
    corruption_mask: np.ndarray | None = None

    def __post_init__(self):
        samples = np.ascontiguousarray(np.asarray(self.samples, dtype=np.float64))
        if samples.ndim != 2:
            raise ArgumentError("samples must be a 2-D array")
        n, m = samples.shape
        if n < 2 or m < 1:
            raise ArgumentError(
                f"need at least 2 observations of dimension >= 1, got shape {samples.shape}"
            )
        if not np.isfinite(samples).all():
            raise FormatError("samples contain non-finite entries")
        samples.setflags(write=False)
        object.__setattr__(self, "samples", samples)
        if self.labels is not None:
            labels = np.ascontiguousarray(np.asarray(self.labels, dtype=np.int64))
            if labels.shape != (n,):
                raise ArgumentError(
                    f"labels must be a length-{n} vector, got shape {labels.shape}"
                )
            classes = np.unique(labels)
            if not np.array_equal(classes, np.arange(classes.size)):
                raise ArgumentError(
                    "labels must be contiguous ids 0..C-1 with every class nonempty"
                )
            labels.setflags(write=False)
            object.__setattr__(self, "labels", labels)

    @property
    def n(self) -> int:
        return self.samples.shape[0]

    @property
    def dim(self) -> int:
        return self.samples.shape[1]

    @property
    def n_classes(self) -> int:
        return 0 if self.labels is None else int(self.labels.max()) + 1


def load_matrix(path, format: str = "csv") -> Dataset:
    """Load a dataset from disk.

    Parameters
    ----------
    path : str or Path
        File (csv, idx) or directory root (image-dir).
    format : str
        One of "csv", "idx", "image-dir".

    csv: comma-separated, one row per observation; an optional header row may
    mark a trailing integer `label` column. idx: the big-endian magic-number
    matrix format used for handwritten-digit corpora (gzipped files accepted;
    a sibling label file following the images->labels naming convention is
    attached automatically). image-dir: root/<class>/<file>, grayscale images
    flattened in raster order with pixels scaled to [0, 1]; the subdirectory
    name becomes the class.
    """
    path = Path(path)
    if format == "csv":
        return _load_csv(path)
    if format == "idx":
        return _load_idx(path)
    if format == "image-dir":
        return _load_image_dir(path)
    raise ArgumentError(f"unknown format {format!r}")


def save_csv(dataset: Dataset, path) -> None:
    """Write a dataset as csv; reloading reproduces samples bit-exactly."""
    path = Path(path)
    m = dataset.dim
    header = [f"f{j}" for j in range(m)]
    if dataset.labels is not None:
        header.append("label")
    with open(path, "w", newline="") as fh:
        fh.write(",".join(header) + "\n")
        for i in range(dataset.n):
            cells = [format(v, ".17g") for v in dataset.samples[i]]
            if dataset.labels is not None:
                cells.append(str(int(dataset.labels[i])))
            fh.write(",".join(cells) + "\n")


def _load_csv(path: Path) -> Dataset:
    with open(path, newline="") as fh:
        rows = [r for r in csv.reader(fh) if r and any(c.strip() for c in r)]
    if not rows:
        raise FormatError(f"{path}: empty csv")

    def _numeric(row):
        try:
            [float(c) for c in row]
            return True
        except ValueError:
            return False

    has_labels = False
    if not _numeric(rows[0]):
        header, rows = rows[0], rows[1:]
        has_labels = header[-1].strip().lower() == "label"
        if not rows:
            raise FormatError(f"{path}: header without data rows")
    widths = {len(r) for r in rows}
    if len(widths) != 1:
        raise FormatError(f"{path}: ragged rows (widths {sorted(widths)})")
    try:
        values = np.array([[float(c) for c in r] for r in rows], dtype=np.float64)
    except ValueError as exc:
        raise FormatError(f"{path}: non-numeric cell ({exc})") from None
    if not np.isfinite(values).all():
        raise FormatError(f"{path}: non-finite value")
    labels = None
    if has_labels:
        raw = values[:, -1]
        values = values[:, :-1]
        if values.shape[1] == 0:
            raise FormatError(f"{path}: label column only, no features")
        if not np.array_equal(raw, np.round(raw)):
            raise FormatError(f"{path}: label column must be integral")
        _, labels = np.unique(raw.astype(np.int64), return_inverse=True)
    return Dataset(values, labels, name=path.stem, source=str(path))


def _read_binary(path: Path) -> bytes:
    opener = gzip.open if path.suffix == ".gz" else open
    with opener(path, "rb") as fh:
        return fh.read()


def _parse_idx(blob: bytes, origin: str) -> np.ndarray:
    if len(blob) < 4:
        raise FormatError(f"{origin}: truncated idx header")
    zero0, zero1, code, ndim = struct.unpack(">BBBB", blob[:4])
    if zero0 != 0 or zero1 != 0:
        raise FormatError(f"{origin}: bad idx magic {blob[:4]!r}")
    if code not in _IDX_DTYPES:
        raise FormatError(f"{origin}: unknown idx type code 0x{code:02x}")
    if ndim < 1:
        raise FormatError(f"{origin}: idx rank must be >= 1")
    head = 4 + 4 * ndim
    if len(blob) < head:
        raise FormatError(f"{origin}: truncated idx dimension list")
    dims = struct.unpack(">" + "I" * ndim, blob[4:head])
    dtype = np.dtype(_IDX_DTYPES[code])
    expected = int(np.prod(dims)) * dtype.itemsize
    payload = blob[head:]
    if len(payload) != expected:
        raise FormatError(
            f"{origin}: payload is {len(payload)} bytes, dims {dims} require {expected}"
        )
    data = np.frombuffer(payload, dtype=dtype).reshape(dims)
    out = data.astype(np.float64)
    if code == 0x08:
        out = out / 255.0
    return out


def _sibling_label_path(path: Path) -> Path | None:
    name = path.name
    for a, b in (("images", "labels"), ("idx3", "idx1")):
        name = name.replace(a, b)
    if name == path.name:
        return None
    candidate = path.with_name(name)
    return candidate if candidate.exists() else None


def _load_idx(path: Path) -> Dataset:
    data = _parse_idx(_read_binary(path), str(path))
    samples = data.reshape(data.shape[0], -1) if data.ndim > 1 else data.reshape(-1, 1)
    labels = None
    sibling = _sibling_label_path(path)
    if sibling is not None:
        raw = _parse_idx(_read_binary(sibling), str(sibling))
        if raw.ndim == 1 and raw.shape[0] == samples.shape[0]:
            # uint8 label payloads come back scaled; undo before re-indexing
            ints = np.round(raw * 255.0 if raw.max() <= 1.0 else raw).astype(np.int64)
            _, labels = np.unique(ints, return_inverse=True)
    return Dataset(samples, labels, name=path.stem, source=str(path))


def _load_image_dir(root: Path) -> Dataset:
    from PIL import Image

    if not root.is_dir():
        raise FormatError(f"{root}: not a directory")
    rows, labels, shape = [], [], None
    class_dirs = sorted(p for p in root.iterdir() if p.is_dir())
    class_id = 0
    for sub in class_dirs:
        files = sorted(p for p in sub.iterdir() if p.suffix.lower() in _IMAGE_EXTENSIONS)
        if not files:
            continue
        for f in files:
            img = np.asarray(Image.open(f).convert("L"), dtype=np.float64) / 255.0
            if shape is None:
                shape = img.shape
            elif img.shape != shape:
                raise FormatError(
                    f"{f}: image shape {img.shape} differs from first image {shape}"
                )
            rows.append(img.ravel())
            labels.append(class_id)
        class_id += 1
    if not rows:
        raise FormatError(f"{root}: no class subdirectories with readable images")
    return Dataset(np.vstack(rows), np.asarray(labels), name=root.name, source=str(root))


def gen_swiss_roll(n: int, noise: float = 0.0, seed: int = 0) -> Dataset:
    """Sample a 3-D swiss roll.

    The roll parameter t is uniform on [1.5*pi, 4.5*pi], the height uniform
    on [0, 21]; points are (t cos t, h, t sin t) plus isotropic Gaussian
    noise of scale `noise`. Labels are the sample quartile of t, and the
    intrinsic (t, h) coordinates are kept on the dataset.
    """
    if n < 10:
        raise ArgumentError("swiss roll needs n >= 10")
    if noise < 0:
        raise ArgumentError("noise must be >= 0")
    rng = np.random.default_rng(seed)
    t = rng.uniform(1.5 * np.pi, 4.5 * np.pi, size=n)
    h = rng.uniform(0.0, 21.0, size=n)
    points = np.column_stack([t * np.cos(t), h, t * np.sin(t)])
    if noise > 0:
        points = points + rng.normal(scale=noise, size=points.shape)
    edges = np.quantile(t, [0.25, 0.5, 0.75])
    labels = np.digitize(t, edges)
    return Dataset(
        points,
        labels,
        name="swiss_roll",
        source=f"swiss(n={n},noise={noise},seed={seed})",
        intrinsic=np.column_stack([t, h]),
    )


def gen_subspace_union(
    ambient: int,
    subspace_dim: int,
    n_subspaces: int,
    per_subspace: int,
    corruption_frac: float = 0.0,
    seed: int = 0,
) -> Dataset:
    """Columns drawn from a union of random linear subspaces, stored as rows.

    Each subspace gets an orthonormal basis (QR of a Gaussian draw) and
    `per_subspace` columns with uniform[-15, 15] coefficients. The coefficient
    scale matters: the self-expressive solver's thresholds are absolute, so
    unit-scale columns would sit in the regime where the sparse error term
    absorbs everything. A fraction of
    entries, exactly round(corruption_frac * ambient * n_columns), is
    replaced by large sparse noise, spread as evenly over the columns as the
    count allows; the boolean mask of replaced entries is stored on the
    dataset in samples orientation.
    """
    if subspace_dim < 1 or subspace_dim >= ambient:
        raise ArgumentError("need 1 <= subspace_dim < ambient")
    if n_subspaces < 1 or per_subspace < 1:
        raise ArgumentError("need at least one subspace and one column each")
    if not 0.0 <= corruption_frac <= 1.0:
        raise ArgumentError("corruption_frac must be in [0, 1]")
    rng = np.random.default_rng(seed)
    blocks = []
    for _ in range(n_subspaces):
        basis, _ = np.linalg.qr(rng.standard_normal((ambient, subspace_dim)))
        coeffs = rng.uniform(-_SUBSPACE_COEFF, _SUBSPACE_COEFF, size=(subspace_dim, per_subspace))
        blocks.append(basis @ coeffs)
    matrix = np.hstack(blocks)
    total = n_subspaces * per_subspace
    mask = np.zeros((ambient, total), dtype=bool)
    n_corrupt = round(corruption_frac * ambient * total)
    if n_corrupt:
        # spread spikes evenly over the columns: a column carrying many of
        # them stops being sparsely corrupted and can't be self-expressed
        counts = np.full(total, n_corrupt // total)
        counts[rng.permutation(total)[: n_corrupt % total]] += 1
        for col, cnt in enumerate(counts):
            if cnt:
                mask[rng.choice(ambient, size=int(cnt), replace=False), col] = True
        scale = matrix.std()
        sign = rng.choice([-1.0, 1.0], size=n_corrupt)
        matrix[mask] = rng.uniform(_CORRUPT_LO, _CORRUPT_HI, size=n_corrupt) * sign * scale
    labels = np.repeat(np.arange(n_subspaces), per_subspace)
    return Dataset(
        matrix.T,
        labels,
        name="subspace_union",
        source=(
            f"subspaces(ambient={ambient},dim={subspace_dim},k={n_subspaces},"
            f"per={per_subspace},corruption={corruption_frac},seed={seed})"
        ),
        corruption_mask=mask.T,
    )


def gen_labeled_clusters(
    n_classes: int,
    per_class: int,
    ambient: int,
    separation: float = 8.0,
    seed: int = 0,
) -> Dataset:
    """Isotropic unit-variance Gaussian blobs with well-separated means.

    When n_classes <= ambient the class means sit on `separation`-scaled
    orthonormal directions of a seeded random frame (pairwise distance
    separation * sqrt(2) exactly); otherwise they are Gaussian draws of
    comparable scale.
    """
    if n_classes < 1 or per_class < 1 or ambient < 1:
        raise ArgumentError("counts must be >= 1")
    if separation < 0:
        raise ArgumentError("separation must be >= 0")
    rng = np.random.default_rng(seed)
    if n_classes <= ambient:
        frame, _ = np.linalg.qr(rng.standard_normal((ambient, n_classes)))
        means = separation * frame.T
    else:
        means = separation * rng.standard_normal((n_classes, ambient)) / np.sqrt(ambient)
    rows = []
    for k in range(n_classes):
        rows.append(means[k] + rng.standard_normal((per_class, ambient)))
    labels = np.repeat(np.arange(n_classes), per_class)
    return Dataset(
        np.vstack(rows),
        labels,
        name="labeled_clusters",
        source=(
            f"blobs(classes={n_classes},per={per_class},ambient={ambient},"
            f"sep={separation},seed={seed})"
        ),
    )
