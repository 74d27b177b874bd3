import struct

import numpy as np
import pytest

import lrisomap as lr
from lrisomap import ArgumentError, FormatError
from lrisomap.datasets import Dataset, load_matrix, save_csv


def test_dataset_coerces_and_freezes():
    d = Dataset(np.arange(6).reshape(3, 2), np.array([0, 1, 1]), name="t", source="t")
    assert d.samples.dtype == np.float64
    assert d.samples.flags["C_CONTIGUOUS"]
    assert not d.samples.flags["WRITEABLE"]
    assert d.n == 3 and d.dim == 2 and d.n_classes == 2


def test_dataset_rejects_bad_shapes():
    with pytest.raises(ArgumentError):
        Dataset(np.zeros((1, 3)), None, name="t", source="t")
    with pytest.raises(ArgumentError):
        Dataset(np.zeros(5), None, name="t", source="t")
    with pytest.raises(FormatError):
        Dataset(np.array([[1.0, np.nan]] * 2), None, name="t", source="t")


def test_dataset_rejects_noncontiguous_labels():
    # class ids must be 0..C-1 with every class populated
    with pytest.raises(ArgumentError):
        Dataset(np.zeros((3, 2)), np.array([0, 2, 2]), name="t", source="t")
    with pytest.raises(ArgumentError):
        Dataset(np.zeros((3, 2)), np.array([1, 1, 1]), name="t", source="t")
    with pytest.raises(ArgumentError):
        Dataset(np.zeros((3, 2)), np.array([0, 1]), name="t", source="t")


def test_csv_roundtrip_exact(tmp_path):
    rng = np.random.default_rng(0)
    d = Dataset(rng.standard_normal((12, 5)), np.array([0, 1] * 6), name="t", source="t")
    path = tmp_path / "d.csv"
    save_csv(d, path)
    back = load_matrix(path, format="csv")
    np.testing.assert_array_equal(back.samples, d.samples)
    np.testing.assert_array_equal(back.labels, d.labels)


def test_csv_without_labels(tmp_path):
    path = tmp_path / "plain.csv"
    path.write_text("f0,f1\n1.0,2.0\n3.0,4.0\n")
    d = load_matrix(path, format="csv")
    assert d.labels is None
    np.testing.assert_allclose(d.samples, [[1, 2], [3, 4]])


def test_csv_headerless(tmp_path):
    path = tmp_path / "raw.csv"
    path.write_text("1.0,2.0\n3.0,4.0\n")
    d = load_matrix(path, format="csv")
    assert d.n == 2 and d.dim == 2


def test_csv_ragged_rejected(tmp_path):
    path = tmp_path / "bad.csv"
    path.write_text("1.0,2.0\n3.0\n")
    with pytest.raises(FormatError):
        load_matrix(path, format="csv")


def test_csv_fractional_label_rejected(tmp_path):
    path = tmp_path / "bad.csv"
    path.write_text("f0,label\n1.0,0.5\n2.0,1.0\n")
    with pytest.raises(FormatError):
        load_matrix(path, format="csv")


def test_csv_label_reindexing(tmp_path):
    # arbitrary integer ids come back as contiguous 0..C-1 preserving order
    path = tmp_path / "d.csv"
    path.write_text("f0,label\n1.0,7\n2.0,3\n3.0,7\n")
    d = load_matrix(path, format="csv")
    np.testing.assert_array_equal(d.labels, [1, 0, 1])


def _write_idx_images(path, array):
    n, rows, cols = array.shape
    with open(path, "wb") as fh:
        fh.write(struct.pack(">BBBB", 0, 0, 0x08, 3))
        fh.write(struct.pack(">III", n, rows, cols))
        fh.write(array.astype(np.uint8).tobytes())


def _write_idx_labels(path, labels):
    with open(path, "wb") as fh:
        fh.write(struct.pack(">BBBB", 0, 0, 0x08, 1))
        fh.write(struct.pack(">I", len(labels)))
        fh.write(np.asarray(labels, dtype=np.uint8).tobytes())


def test_idx_loading_scales_uint8(tmp_path):
    imgs = np.arange(2 * 3 * 4, dtype=np.uint8).reshape(2, 3, 4)
    ipath = tmp_path / "train-images.idx3-ubyte"
    _write_idx_images(ipath, imgs)
    _write_idx_labels(tmp_path / "train-labels.idx1-ubyte", [1, 0])
    d = load_matrix(ipath, format="idx")
    assert d.samples.shape == (2, 12)
    np.testing.assert_allclose(d.samples[0], imgs[0].ravel() / 255.0)
    np.testing.assert_array_equal(d.labels, [1, 0])


def test_idx_bad_magic(tmp_path):
    path = tmp_path / "bad.idx3-ubyte"
    path.write_bytes(b"\x01\x00\x08\x03" + b"\x00" * 12)
    with pytest.raises(FormatError):
        load_matrix(path, format="idx")


def test_idx_truncated_payload(tmp_path):
    path = tmp_path / "short.idx3-ubyte"
    with open(path, "wb") as fh:
        fh.write(struct.pack(">BBBB", 0, 0, 0x08, 3))
        fh.write(struct.pack(">III", 2, 3, 4))
        fh.write(b"\x00" * 5)
    with pytest.raises(FormatError):
        load_matrix(path, format="idx")


def test_image_dir_loading(tmp_path):
    pil = pytest.importorskip("PIL.Image")
    for cls, shade in [("s1", 10), ("s2", 200)]:
        sub = tmp_path / cls
        sub.mkdir()
        for i in range(2):
            pil.fromarray(np.full((4, 3), shade + i, dtype=np.uint8)).save(sub / f"{i}.png")
    d = load_matrix(tmp_path, format="image-dir")
    assert d.samples.shape == (4, 12)
    np.testing.assert_array_equal(d.labels, [0, 0, 1, 1])
    assert d.samples.max() <= 1.0


def test_image_dir_shape_mismatch(tmp_path):
    pil = pytest.importorskip("PIL.Image")
    sub = tmp_path / "a"
    sub.mkdir()
    pil.fromarray(np.zeros((4, 3), dtype=np.uint8)).save(sub / "0.png")
    pil.fromarray(np.zeros((5, 3), dtype=np.uint8)).save(sub / "1.png")
    with pytest.raises(FormatError):
        load_matrix(tmp_path, format="image-dir")


def test_unknown_format(tmp_path):
    path = tmp_path / "d.csv"
    path.write_text("1.0\n")
    with pytest.raises(ArgumentError):
        load_matrix(path, format="parquet")


def test_swiss_roll_geometry():
    d = lr.gen_swiss_roll(500, noise=0.0, seed=3)
    t = d.intrinsic[:, 0]
    h = d.intrinsic[:, 1]
    assert d.samples.shape == (500, 3)
    assert t.min() >= 1.5 * np.pi and t.max() <= 4.5 * np.pi
    assert h.min() >= 0.0 and h.max() <= 21.0
    # noiseless roll: x = t cos t, z = t sin t exactly
    np.testing.assert_allclose(d.samples[:, 0], t * np.cos(t), atol=1e-12)
    np.testing.assert_allclose(d.samples[:, 2], t * np.sin(t), atol=1e-12)
    np.testing.assert_allclose(d.samples[:, 1], h, atol=1e-12)
    assert d.n_classes == 4


def test_swiss_roll_label_quartiles():
    d = lr.gen_swiss_roll(400, noise=0.1, seed=1)
    t = d.intrinsic[:, 0]
    # labels must be monotone in t
    order = np.argsort(t)
    assert (np.diff(d.labels[order]) >= 0).all()
    counts = np.bincount(d.labels)
    assert counts.min() > 0


def test_swiss_roll_determinism():
    a = lr.gen_swiss_roll(100, noise=0.05, seed=9)
    b = lr.gen_swiss_roll(100, noise=0.05, seed=9)
    np.testing.assert_array_equal(a.samples, b.samples)


def test_subspace_union_rank(subspaces):
    assert np.linalg.matrix_rank(subspaces.samples.T) == 6
    assert subspaces.samples.shape == (60, 30)
    np.testing.assert_array_equal(np.bincount(subspaces.labels), [20, 20, 20])


def test_subspace_union_corruption_count():
    d = lr.gen_subspace_union(30, 2, 3, 20, corruption_frac=0.1, seed=2)
    expected = round(0.1 * 30 * 60)
    assert d.corruption_mask.sum() == expected
    # corrupted entries dominate the column scale
    clean = lr.gen_subspace_union(30, 2, 3, 20, 0.0, seed=2)
    hit = d.samples[d.corruption_mask]
    assert np.abs(hit).min() >= 2.9 * clean.samples.std()
    assert np.abs(hit).max() <= 6.1 * clean.samples.std()


def test_subspace_union_corruption_spread():
    # spikes are balanced over columns: per-column counts differ by at most 1
    d = lr.gen_subspace_union(30, 2, 3, 20, corruption_frac=0.1, seed=5)
    per_col = d.corruption_mask.sum(axis=1)  # samples orientation: rows are columns of S
    assert per_col.max() - per_col.min() <= 1
    assert per_col.sum() == 180


def test_subspace_union_rejects_bad_dims():
    with pytest.raises(ArgumentError):
        lr.gen_subspace_union(5, 5, 2, 10, 0.0, seed=0)
    with pytest.raises(ArgumentError):
        lr.gen_subspace_union(5, 2, 2, 10, corruption_frac=1.5, seed=0)


def test_labeled_clusters_separation():
    d = lr.gen_labeled_clusters(4, 10, 12, separation=6.0, seed=0)
    means = np.stack([d.samples[d.labels == c].mean(axis=0) for c in range(4)])
    dists = np.linalg.norm(means[:, None] - means[None, :], axis=-1)
    off = dists[~np.eye(4, dtype=bool)]
    # orthogonal-frame construction: pairwise mean distance near separation*sqrt(2)
    np.testing.assert_allclose(off, 6.0 * np.sqrt(2), rtol=0.25)


def test_labeled_clusters_counts():
    d = lr.gen_labeled_clusters(3, 7, 5, separation=4.0, seed=1)
    assert d.n == 21
    np.testing.assert_array_equal(np.bincount(d.labels), [7, 7, 7])
