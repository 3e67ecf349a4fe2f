"""Command-line front end.

Subcommands: ``sample-donsker``, ``sample-exact``, ``sample-product``, ``cov``,
``check`` and ``converge``. Each takes a config file (see
:mod:`mfrl.config`). Exit codes: 0 success, 1 failed checks, 2 config error.
"""

from __future__ import annotations

import argparse
import csv
import io
import sys
from pathlib import Path

import numpy as np

from . import diagnostics as dg
from ._rng import default_threads
from .config import ConfigError, RunConfig, load_config
from .donsker import BudgetError, donsker_covariance_matrix, sample_donsker_batch
from .exact import (
    FactorizationError,
    SpecIncompatibilityError,
    covariance_matrix,
    sample_exact_array,
    sample_product_array,
)
from .grid import SheetSample
from .hurst import HurstField, validate_hurst
from .report import DiagnosticsReport, config_digest

MAX_D = 3

# seed offsets per task, so that each part of a run has its own noise
SEED_OFFSETS = {"samples": 0, "moment": 101, "ks": 303, "fdd": 404,
                "negative": 505}


def _seed(cfg: RunConfig, task: str) -> int:
    return cfg["seed"] + SEED_OFFSETS[task]


def _write(path: Path, text: str):
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(text)


def _long_csv(grid, values) -> str:
    pts = grid.points()
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["rep"] + [f"t{i + 1}" for i in range(pts.shape[1])] + ["value"])
    for r, row in enumerate(values):
        for p, v in zip(pts, row):
            w.writerow([r] + [f"{x:.17g}" for x in p] + [f"{v:.17g}"])
    return buf.getvalue()


def _matrix_csv(mat) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow([str(j) for j in range(mat.shape[1])])
    for row in mat:
        w.writerow([f"{v:.17g}" for v in row])
    return buf.getvalue()


def _write_samples(out: Path, grid, values, layout, stem):
    if layout == "long":
        _write(out / f"{stem}.csv", _long_csv(grid, values))
        return
    for r, row in enumerate(values):
        _write(out / f"{stem}_{r:05d}.csv", SheetSample(grid, row).to_csv())


def cmd_sample(cfg: RunConfig, args, source) -> int:
    out = Path(args.out or cfg["output_dir"])
    reps = max(1, cfg["reps"])
    if source == "donsker":
        vals = sample_donsker_batch(cfg.field, cfg.grid, cfg["n"], reps, _seed(cfg, "samples"),
                                    cfg["dist"], args.threads)
    elif source == "exact":
        cm = covariance_matrix(cfg.field, cfg.grid)
        vals = sample_exact_array(cm, _seed(cfg, "samples"), reps)
    else:
        vals = sample_product_array(cfg.field, cfg.grid, _seed(cfg, "samples"), reps)
    _write_samples(out, cfg.grid, vals, args.layout, f"sample_{source}")
    return 0


def cmd_cov(cfg: RunConfig, args) -> int:
    out = Path(args.out or cfg["output_dir"])
    cm = covariance_matrix(cfg.field, cfg.grid)
    _write(out / "covariance.csv", cm.to_csv())
    if args.donsker_n is None:
        return 0
    dc = donsker_covariance_matrix(cfg.field, args.donsker_n, cfg.grid)
    gap = np.abs(dc - cm.cov)
    _write(out / "donsker_covariance.csv", _matrix_csv(dc))
    _write(out / "covariance_gap.csv", _matrix_csv(gap))
    tol = cfg["cov.tolerance"]
    print(f"max |donsker - exact| at n={args.donsker_n}: {gap.max():.6g} (tolerance {tol:g})")
    return 0 if gap.max() < tol else 1


def _dyadic_pairs(t0, d, exps=range(2, 7)):
    pairs = []
    for e in exps:
        h = 2.0**-e
        for ax in range(d):
            s = np.array(t0, dtype=float)
            s[ax] -= h
            pairs.append((np.array(t0, dtype=float), s))
    return pairs


def run_check_suite(cfg: RunConfig, threads=None) -> DiagnosticsReport:
    field, d, n, reps = cfg.field, cfg.d, cfg["n"], cfg["reps"]
    dist = cfg["dist"]
    t0 = np.asarray(cfg["check.t0"] or [0.9] * d, dtype=float)
    if t0.size == 1:
        t0 = np.full(d, float(t0[0]))
    report = DiagnosticsReport(config_digest=config_digest(cfg.digest_payload()))

    report.extend(validate_hurst(field, cfg["check.hurst_resolution"]))

    ones = [dg.Power(0.0)] * d
    report.extend(dg.check_moment_bound(ones, n, 2, 0))
    m = cfg["check.moment_m"]
    mreps = cfg["check.moment_reps"] or reps
    if m != 2 and mreps > 1:
        report.extend(dg.check_moment_bound(ones, n, m, mreps, _seed(cfg, "moment"), dist,
                                            threads))

    pairs = _dyadic_pairs(t0, d)
    report.extend(dg.increment_moment(field, n, pairs, 2, source="donsker"))
    report.extend(dg.increment_moment(field, n, pairs, 2, source="exact"))

    hs = np.geomspace(1e-2, 1e-5, 10)
    for ax in range(d):
        _, r = dg.holder_slope(field, dg.ExactCov(), t0, hs, axis=ax)
        report.extend(r)

    if cfg["check.ks"] and reps >= 1000:
        report.extend(dg.ks_normality(field, n, t0, reps, _seed(cfg, "ks"), dist, threads))

    if cfg["check.negative_control"]:
        ctrl = HurstField.constant(0.5, d=1)
        r = dg.ks_normality(ctrl, 1, [1.0], max(reps, 1000), _seed(cfg, "negative"),
                            "rademacher", threads)
        report.extend(r, prefix="negative_control_")
    return report


def _fdd_spec(cfg: RunConfig) -> dg.FddSpec:
    pts = cfg["fdd.points"]
    if pts is None:
        pts = [cfg.grid.points()[-1].tolist()]
    coeffs = cfg["fdd.coeffs"] or [1.0] * len(pts)
    return dg.FddSpec(pts, coeffs)


def cmd_check(cfg: RunConfig, args) -> int:
    out = Path(args.out or cfg["output_dir"])
    report = run_check_suite(cfg, args.threads)
    _write(out / "report.txt", report.to_text())
    _write(out / "report.csv", report.to_csv())
    print(report.summary())
    for c in report.failed():
        print(f"check failed: {c.name}", file=sys.stderr)
    return 0 if report.passed else 1


def cmd_converge(cfg: RunConfig, args) -> int:
    out = Path(args.out or cfg["output_dir"])
    spec = _fdd_spec(cfg)
    n_list = cfg["n_list"]
    rows = dg.fdd_gap_table(cfg.field, spec, n_list)
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["n", "variance", "target", "gap"])
    for n, v, tgt, gap in rows:
        w.writerow([n, f"{v:.17g}", f"{tgt:.17g}", f"{gap:.17g}"])
    _write(out / "converge.csv", buf.getvalue())
    reps = cfg["reps"] if cfg["check.ks"] and cfg["reps"] >= 1000 else 0
    report = dg.fdd_convergence(cfg.field, spec, n_list, reps, _seed(cfg, "fdd"), cfg["dist"],
                                cfg["fdd.tol"], args.threads)
    report.config_digest = config_digest(cfg.digest_payload())
    _write(out / "converge_report.txt", report.to_text())
    print(report.summary())
    return 0 if report.passed else 1


def _cost_estimate(cfg: RunConfig) -> str:
    d, n = cfg.d, max([cfg["n"]] + list(cfg["n_list"]))
    P = cfg.grid.size
    return (f"cost estimate: d={d}, noise values per replicate n^d={n**d:,}, "
            f"grid points P={P:,}, covariance entries P^2={P * P:,}")


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="mfrl", description=__doc__.splitlines()[0])
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("config", help="path to a key = value config file")
    common.add_argument("-s", "--set", action="append", default=[], metavar="KEY=VALUE",
                        help="override a config key")
    common.add_argument("-o", "--out", default=None, help="output directory (overrides output_dir)")
    common.add_argument("--threads", type=int, default=None,
                        help="worker threads (default: $MFRL_THREADS or 1)")
    common.add_argument("--allow-large", action="store_true",
                        help=f"allow d > {MAX_D} after printing a cost estimate")
    sub = p.add_subparsers(dest="command", required=True)
    for name in ("sample-donsker", "sample-exact", "sample-product"):
        sp = sub.add_parser(name, parents=[common])
        sp.add_argument("--layout", choices=("long", "per-rep"), default="long")
    cov = sub.add_parser("cov", parents=[common])
    cov.add_argument("--donsker-n", type=int, default=None)
    sub.add_parser("check", parents=[common])
    sub.add_parser("converge", parents=[common])
    return p


def run_cli(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    if args.threads is None:
        args.threads = default_threads()
    try:
        text = Path(args.config).read_text(encoding="utf-8")
    except OSError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    try:
        cfg = load_config(text, args.set)
        if cfg.d > MAX_D:
            if not args.allow_large:
                raise ConfigError("hurst", f"d={cfg.d} exceeds {MAX_D}; pass --allow-large")
            print(_cost_estimate(cfg), file=sys.stderr)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    try:
        if args.command.startswith("sample-"):
            return cmd_sample(cfg, args, args.command.split("-", 1)[1])
        if args.command == "cov":
            return cmd_cov(cfg, args)
        if args.command == "check":
            return cmd_check(cfg, args)
        return cmd_converge(cfg, args)
    except (SpecIncompatibilityError, BudgetError, ValueError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except FactorizationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


def main():
    sys.exit(run_cli())


if __name__ == "__main__":
    main()
