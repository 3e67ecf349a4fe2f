import csv
from pathlib import Path

import numpy as np
import pytest

from mfrl import Grid
from mfrl.cli import run_check_suite, run_cli
from mfrl.config import load_config
from mfrl.donsker import sample_donsker_batch
from mfrl.grid import read_sample_csv

DATA = Path(__file__).parent / "data"


def _cfg(tmp_path, text, name="run.cfg"):
    p = tmp_path / name
    p.write_text(text, encoding="utf-8")
    return str(p)


def test_converge_lattice_gaps_are_zero(tmp_path):
    assert run_cli(["converge", str(DATA / "brownian_lattice.cfg"), "-o", str(tmp_path)]) == 0
    rows = list(csv.DictReader(open(tmp_path / "converge.csv")))
    assert [r["n"] for r in rows] == ["8", "16", "32", "64"]
    assert all(float(r["gap"]) == 0.0 for r in rows)


def test_check_negative_control_exits_1(tmp_path, capsys):
    cfg = str(DATA / "brownian_lattice.cfg")
    code = run_cli(["check", cfg, "-o", str(tmp_path), "-s", "check.negative_control=true"])
    assert code == 1
    err = capsys.readouterr().err
    assert "negative_control_ks_normality" in err
    text = (tmp_path / "report.txt").read_text()
    assert "negative_control_ks_normality" in text


def test_check_passes_without_control(tmp_path):
    assert run_cli(["check", str(DATA / "brownian_lattice.cfg"), "-o", str(tmp_path)]) == 0
    assert (tmp_path / "report.csv").exists()


def test_cov_donsker_gap_on_acceptance_grid(tmp_path, capsys):
    cfg = _cfg(tmp_path, "hurst.kind = constant\nhurst.h = 0.5, 0.5\ngrid.resolution = 5\n"
                         "grid.lo = 0.2\ngrid.hi = 1.0\n")
    assert run_cli(["cov", cfg, "--donsker-n", "64", "-o", str(tmp_path)]) == 0
    gap = np.loadtxt(tmp_path / "covariance_gap.csv", delimiter=",", skiprows=1)
    assert gap.shape == (25, 25) and gap.max() < 0.02
    cov = np.loadtxt(tmp_path / "covariance.csv", delimiter=",", skiprows=1)
    assert cov[-1, -1] == pytest.approx(1.0)
    assert "max |donsker - exact|" in capsys.readouterr().out


def test_cov_gap_over_tolerance_exits_1(tmp_path):
    cfg = _cfg(tmp_path, "hurst.kind = constant\nhurst.h = 0.3\ngrid.resolution = 3\n")
    assert run_cli(["cov", cfg, "--donsker-n", "2", "-o", str(tmp_path)]) == 1


def test_unknown_key_exits_2(tmp_path, capsys):
    cfg = _cfg(tmp_path, "hurst.kind = constant\nhurst.h = 0.5\nseeed = 3\n")
    assert run_cli(["check", cfg, "-o", str(tmp_path)]) == 2
    assert "seeed" in capsys.readouterr().err


def test_missing_file_and_bad_subcommand(tmp_path):
    assert run_cli(["check", str(tmp_path / "nope.cfg")]) == 2
    assert run_cli(["frobnicate", "x"]) == 2


def test_dimension_cap(tmp_path, capsys):
    cfg = _cfg(tmp_path, "hurst.kind = constant\nhurst.h = 0.5\nd = 4\nn = 2\n"
                         "grid.resolution = 1\nreps = 2\n")
    assert run_cli(["sample-donsker", cfg, "-o", str(tmp_path)]) == 2
    assert run_cli(["sample-donsker", cfg, "-o", str(tmp_path), "--allow-large"]) == 0
    assert "cost estimate" in capsys.readouterr().err


def test_product_rejects_coupled_field(tmp_path, capsys):
    cfg = _cfg(tmp_path, "hurst.kind = affine\nhurst.base = 0.5, 0.5\n"
                         "hurst.slopes = 0.1, 0.1; 0, 0.1\nreps = 2\n")
    assert run_cli(["sample-product", cfg, "-o", str(tmp_path)]) == 2
    assert "per-axis" in capsys.readouterr().err


def test_sample_per_rep_round_trip(tmp_path):
    text = ("hurst.kind = sinusoidal\nhurst.mean = 0.5\nhurst.amplitude = 0.2\nd = 2\n"
            "n = 8\ngrid.resolution = 3\ngrid.lo = 0\nreps = 3\nseed = 5\n")
    cfg = _cfg(tmp_path, text)
    assert run_cli(["sample-donsker", cfg, "-o", str(tmp_path), "--layout", "per-rep"]) == 0
    rc = load_config(text)
    expected = sample_donsker_batch(rc.field, rc.grid, 8, 3, seed=5)
    for r in range(3):
        back = read_sample_csv((tmp_path / f"sample_donsker_{r:05d}.csv").read_text())
        np.testing.assert_array_equal(back.values, expected[r])
        assert isinstance(back.grid, Grid)


@pytest.mark.parametrize("cmd", ["sample-donsker", "sample-exact", "sample-product"])
def test_sample_long_layout(tmp_path, cmd):
    cfg = _cfg(tmp_path, "hurst.kind = constant\nhurst.h = 0.6, 0.4\nn = 8\n"
                         "grid.resolution = 2\nreps = 4\n")
    assert run_cli([cmd, cfg, "-o", str(tmp_path)]) == 0
    src = cmd.split("-")[1]
    rows = list(csv.reader(open(tmp_path / f"sample_{src}.csv")))
    assert rows[0] == ["rep", "t1", "t2", "value"]
    assert len(rows) == 1 + 4 * 4


def test_outputs_independent_of_threads(tmp_path, monkeypatch):
    cfg = str(DATA / "sinusoidal.cfg")
    outs = []
    for label, threads in (("a", "1"), ("b", "4")):
        monkeypatch.setenv("MFRL_THREADS", threads)
        d = tmp_path / label
        assert run_cli(["check", cfg, "-o", str(d)]) == 0
        assert run_cli(["sample-donsker", cfg, "-o", str(d), "-s", "reps=300"]) == 0
        outs.append(d)
    for name in ("report.txt", "report.csv", "sample_donsker.csv"):
        assert (outs[0] / name).read_bytes() == (outs[1] / name).read_bytes()


def test_check_suite_contents():
    cfg = load_config((DATA / "sinusoidal.cfg").read_text())
    names = [c.name for c in run_check_suite(cfg).checks]
    for expected in ("hurst_bounds", "hurst_holder_ratio", "moment_m2_exact", "moment_m4_ratio",
                     "increment_donsker_m2_no_blowup", "increment_exact_m2_no_blowup",
                     "holder_slope_axis0", "holder_slope_axis1", "ks_normality"):
        assert expected in names
