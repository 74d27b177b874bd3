"""End-to-end exercises of the command-line interface.

Each test drives main() in-process with an explicit argv and checks the
documented contract: exit code 0 on success, 1 on runtime failure, 2 on
usage error, plus the files a run leaves behind.
"""

import hashlib
import json

import numpy as np
import pytest

import lrisomap as lr
from lrisomap.cli import main

# 4 classes x 12 points in 8 dimensions: a full pipeline run stays well
# under a second at this size
BLOBS = "blobs:classes=4,per=12,dim=8"


def read_csv_matrix(path):
    return np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)


def read_spectrum(path):
    lines = path.read_text().splitlines()
    assert lines[0] == "eigenvalue"
    return np.array([float(v) for v in lines[1:] if v.strip()])


@pytest.fixture(scope="module")
def embed_run(tmp_path_factory):
    """One labeled low_rank embed shared by the read-only tests."""
    out = tmp_path_factory.mktemp("cli") / "run"
    argv = ["embed", "--input", BLOBS, "--out", str(out),
            "--landmarks", "6", "--seed", "0"]
    assert main(argv) == 0
    return out, argv


def test_version_flag(capsys):
    assert main(["--version"]) == 0
    assert lr.__version__ in capsys.readouterr().out


def test_missing_required_flag_is_usage_error(capsys):
    assert main(["embed", "--input", BLOBS]) == 2  # no --out
    capsys.readouterr()


def test_unknown_variant_is_usage_error(tmp_path, capsys):
    code = main(["embed", "--input", BLOBS, "--out", str(tmp_path / "r"),
                 "--variant", "bogus"])
    assert code == 2
    capsys.readouterr()


def test_embed_writes_expected_files(embed_run):
    out, _ = embed_run
    assert (out / "embedding.csv").read_text().splitlines()[0] == "y0,y1"
    emb = read_csv_matrix(out / "embedding.csv")
    assert emb.shape == (48, 2)
    labels = (out / "labels.csv").read_text().splitlines()
    assert labels[0] == "label"
    assert len(labels) == 49
    for name in ("spectrum_before.csv", "spectrum_after.csv",
                 "timings.json", "config.json", "manifest.json"):
        assert (out / name).exists(), name


def test_manifest_contents(embed_run):
    out, argv = embed_run
    manifest = json.loads((out / "manifest.json").read_text())
    assert manifest["command"] == "embed"
    assert manifest["argv"] == argv
    assert manifest["tool_version"] == lr.__version__
    assert manifest["seed"] == 0
    assert manifest["input"] == BLOBS
    # generator inputs are checksummed by their spec string
    digest = hashlib.sha256(BLOBS.encode()).hexdigest()
    assert manifest["input_checksum"] == "sha256:" + digest
    assert manifest["config"]["variant"] == "low_rank"
    assert manifest["config"]["n_landmarks"] == 6
    assert manifest["config"]["lrr"]["beta"] == 1.0
    assert manifest["finished_utc"] >= manifest["started_utc"]


def test_embed_stdout_reports_shape_and_variant(tmp_path, capsys):
    out = tmp_path / "r"
    assert main(["embed", "--input", BLOBS, "--out", str(out),
                 "--landmarks", "6"]) == 0
    msg = capsys.readouterr().out
    assert "embedded 48 observations into 2 dimensions" in msg
    assert "low_rank" in msg


def test_embed_determinism(tmp_path):
    # same seed into two directories: numeric artifacts byte-identical
    outs = []
    for name in ("a", "b"):
        out = tmp_path / name
        assert main(["embed", "--input", BLOBS, "--out", str(out),
                     "--landmarks", "6", "--seed", "3"]) == 0
        outs.append(out)
    for fname in ("embedding.csv", "spectrum_before.csv", "spectrum_after.csv"):
        assert (outs[0] / fname).read_bytes() == (outs[1] / fname).read_bytes()


def test_embed_rejects_bad_latent_dim(tmp_path, capsys):
    code = main(["embed", "--input", BLOBS, "--out", str(tmp_path / "r"),
                 "--dim", "0"])
    assert code == 2
    assert "usage error" in capsys.readouterr().err


def test_embed_bad_generator_parameters(tmp_path, capsys):
    out = str(tmp_path / "r")
    assert main(["embed", "--input", "blobs:bogus=1", "--out", out]) == 2
    assert main(["embed", "--input", "blobs:classes", "--out", out]) == 2
    assert "usage error" in capsys.readouterr().err
    assert not (tmp_path / "r").exists()


def test_embed_missing_input_file(tmp_path, capsys):
    code = main(["embed", "--input", str(tmp_path / "nope.csv"),
                 "--out", str(tmp_path / "r")])
    assert code == 1
    assert "error [load-input]" in capsys.readouterr().err


def test_embed_unparseable_csv(tmp_path, capsys):
    bad = tmp_path / "junk.csv"
    bad.write_text("a,b\nc,d\n")
    code = main(["embed", "--input", str(bad), "--out", str(tmp_path / "r")])
    assert code == 1
    assert "error [load-input]" in capsys.readouterr().err


def test_config_file_values_and_flag_precedence(tmp_path):
    cfg = tmp_path / "opts.cfg"
    cfg.write_text("landmarks = 5   # hyphenated keys map to underscores\nlrr-beta = 2.0\n")
    out_a = tmp_path / "file_only"
    assert main(["embed", "--input", BLOBS, "--out", str(out_a),
                 "--config", str(cfg)]) == 0
    man_a = json.loads((out_a / "manifest.json").read_text())
    assert man_a["config"]["n_landmarks"] == 5
    assert man_a["config"]["lrr"]["beta"] == 2.0

    out_b = tmp_path / "flag_wins"
    assert main(["embed", "--input", BLOBS, "--out", str(out_b),
                 "--config", str(cfg), "--landmarks", "8"]) == 0
    man_b = json.loads((out_b / "manifest.json").read_text())
    assert man_b["config"]["n_landmarks"] == 8
    assert man_b["config"]["lrr"]["beta"] == 2.0


def test_rejected_config_files(tmp_path, capsys):
    out = str(tmp_path / "r")
    unknown = tmp_path / "unknown.cfg"
    unknown.write_text("bogus = 3\n")
    assert main(["embed", "--input", BLOBS, "--out", out,
                 "--config", str(unknown)]) == 2
    assert "unknown option" in capsys.readouterr().err

    malformed = tmp_path / "malformed.cfg"
    malformed.write_text("landmarks\n")
    assert main(["embed", "--input", BLOBS, "--out", out,
                 "--config", str(malformed)]) == 2
    assert "expected key=value" in capsys.readouterr().err

    assert main(["embed", "--input", BLOBS, "--out", out,
                 "--config", str(tmp_path / "nope.cfg")]) == 2
    assert "cannot read config file" in capsys.readouterr().err


def test_eval_reports_loocv_accuracy(embed_run, tmp_path, capsys):
    run, _ = embed_run
    out = tmp_path / "report"
    assert main(["eval", "--run", str(run), "--out", str(out)]) == 0
    assert "loocv accuracy" in capsys.readouterr().out
    payload = json.loads((out / "report.json").read_text())
    assert payload["n_total"] == 48
    assert payload["n_correct"] <= 48
    assert payload["accuracy"] >= 0.9  # well-separated blobs
    assert len(payload["per_class_accuracy"]) == 4
    manifest = json.loads((out / "manifest.json").read_text())
    assert manifest["command"] == "eval"


def test_eval_default_out_is_run_dir(embed_run, tmp_path, capsys):
    # work on a copy so the report does not clobber the shared fixture
    src, _ = embed_run
    dst = tmp_path / "copy"
    dst.mkdir()
    for name in ("embedding.csv", "labels.csv"):
        (dst / name).write_bytes((src / name).read_bytes())
    assert main(["eval", "--run", str(dst)]) == 0
    assert (dst / "report.json").exists()
    capsys.readouterr()


def test_eval_json_output(embed_run, tmp_path, capsys):
    run, _ = embed_run
    code = main(["eval", "--run", str(run), "--out", str(tmp_path / "o"),
                 "--json"])
    assert code == 0
    payload = json.loads(capsys.readouterr().out.strip())
    assert set(payload) == {"accuracy", "n_correct", "n_total",
                            "per_class_accuracy"}


def test_eval_missing_run_dir(tmp_path, capsys):
    assert main(["eval", "--run", str(tmp_path / "nope")]) == 1
    assert "error [load-run]" in capsys.readouterr().err


def test_eval_refuses_unlabeled_run(tmp_path, capsys):
    # a headerless numeric csv carries no label column
    points = lr.gen_swiss_roll(120, 0.0, seed=0).samples
    src = tmp_path / "points.csv"
    np.savetxt(src, points, delimiter=",", fmt="%.17g")
    out = tmp_path / "swiss"
    assert main(["embed", "--input", str(src), "--out", str(out),
                 "--variant", "classic"]) == 0
    assert not (out / "labels.csv").exists()
    assert not (out / "spectrum_before.csv").exists()  # classic has no pencil
    assert main(["eval", "--run", str(out)]) == 1
    assert "labeled run" in capsys.readouterr().err


def test_sweep_grid_csv_and_manifest(tmp_path, capsys):
    out = tmp_path / "sw"
    assert main(["sweep", "--input", BLOBS, "--out", str(out),
                 "--param", "landmarks", "--values", "4,8",
                 "--seeds", "0"]) == 0
    lines = (out / "sweep.csv").read_text().splitlines()
    assert lines[0] == ("variant,param,value,accuracy,wall_clock_s,"
                        "latent_dim,n_landmarks,seed,error")
    assert len(lines) == 5
    # the param column carries the config attribute name, not the flag
    cells = [tuple(line.split(",")[:3]) for line in lines[1:]]
    assert cells == [("low_rank", "n_landmarks", "4"),
                     ("low_rank", "n_landmarks", "8"),
                     ("extended_clustered", "n_landmarks", "4"),
                     ("extended_clustered", "n_landmarks", "8")]
    assert all(line.rsplit(",", 1)[1] == "" for line in lines[1:])  # no failures
    manifest = json.loads((out / "manifest.json").read_text())
    assert manifest["command"] == "sweep"
    assert "swept 4 cells (0 failed)" in capsys.readouterr().out


def test_sweep_malformed_values(tmp_path, capsys):
    assert main(["sweep", "--input", BLOBS, "--out", str(tmp_path / "o"),
                 "--param", "landmarks", "--values", "4,x"]) == 2
    assert "comma-separated integers" in capsys.readouterr().err


def test_sweep_unknown_variant(tmp_path, capsys):
    assert main(["sweep", "--input", BLOBS, "--out", str(tmp_path / "o"),
                 "--param", "landmarks", "--values", "4",
                 "--variants", "low_rank,bogus"]) == 2
    assert "unknown variant" in capsys.readouterr().err


def test_spectrum_concentrates_top_energy(tmp_path, capsys):
    """The surrogate pencil holds a larger top-5 share of eigenvalue mass."""
    out = tmp_path / "sp"
    assert main(["spectrum", "--input", "blobs", "--out", str(out),
                 "--landmarks", "20", "--seed", "0"]) == 0
    before = read_spectrum(out / "spectrum_before.csv")
    after = read_spectrum(out / "spectrum_after.csv")

    def top5(spec):
        return float(spec[:5].sum() / spec.sum())

    for spec in (before, after):
        assert spec[0] == 1.0  # normalized by the leading eigenvalue
        assert np.all(np.diff(spec) <= 1e-12)
    assert top5(after) >= top5(before)
    capsys.readouterr()


def test_spectrum_no_lrr_skips_surrogate(tmp_path, capsys):
    out = tmp_path / "sp"
    assert main(["spectrum", "--input", BLOBS, "--out", str(out),
                 "--landmarks", "6", "--no-lrr"]) == 0
    assert (out / "spectrum_before.csv").exists()
    assert not (out / "spectrum_after.csv").exists()
    manifest = json.loads((out / "manifest.json").read_text())
    assert manifest["config"]["variant"] == "extended_clustered"
    capsys.readouterr()


def test_spectrum_rejects_non_clustered_variant(tmp_path, capsys):
    assert main(["spectrum", "--input", BLOBS, "--out", str(tmp_path / "o"),
                 "--variant", "classic"]) == 2
    assert "clustered variant" in capsys.readouterr().err


def test_bench_writes_scaling_table(tmp_path, capsys):
    out = tmp_path / "bench"
    assert main(["bench", "--generator", BLOBS, "--sizes", "48,96",
                 "--out", str(out), "--landmarks", "4"]) == 0
    lines = (out / "scaling.csv").read_text().splitlines()
    assert lines[0] == "variant,n,stage,seconds"
    rows = [line.split(",") for line in lines[1:]]
    assert {r[1] for r in rows} == {"48", "96"}
    assert {"total", "lrr", "geodesics"} <= {r[2] for r in rows}
    assert all(float(r[3]) >= 0.0 for r in rows)
    manifest = json.loads((out / "manifest.json").read_text())
    assert manifest["command"] == "bench"
    assert manifest["input"] == BLOBS
    capsys.readouterr()


def test_bench_usage_errors(tmp_path, capsys):
    out = str(tmp_path / "o")
    # decreasing sizes, size not divisible by the class count, and a
    # generator argument that is actually a path
    assert main(["bench", "--generator", BLOBS, "--sizes", "96,48",
                 "--out", out]) == 2
    assert main(["bench", "--generator", BLOBS, "--sizes", "50,96",
                 "--out", out]) == 2
    assert main(["bench", "--generator", str(tmp_path), "--sizes", "48",
                 "--out", out]) == 2
    assert capsys.readouterr().err.count("usage error") == 3


def test_no_writes_outside_out_directory(tmp_path, monkeypatch):
    scratch = tmp_path / "cwd"
    scratch.mkdir()
    out = tmp_path / "run"
    monkeypatch.chdir(scratch)
    assert main(["embed", "--input", BLOBS, "--out", str(out),
                 "--landmarks", "6"]) == 0
    assert list(scratch.iterdir()) == []
