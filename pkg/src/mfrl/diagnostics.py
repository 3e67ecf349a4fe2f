"""Checks of the moment bounds and of convergence to the limit sheet.

Convergence in law on ``C([0,1]^d)`` is not observable directly. The
checks here follow the usual decomposition instead:

* finite-dimensional laws -- ``fdd_convergence`` compares the exact variance
  of linear combinations ``sum_j a_j X_n(t^j)`` with the limit, and
  ``ks_normality`` checks that the combination is asymptotically Gaussian;
* tightness -- ``increment_moment`` and ``check_moment_bound`` check that
  moment ratios stay bounded across scales.

The constants in the moment bounds are existential, so no check asserts a
particular value for them; checks assert boundedness, no blow-up as the
scale shrinks, or no growth as ``n`` increases.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence, Union

import numpy as np
from scipy import stats

from .donsker import (
    donsker_covariance,
    donsker_covariance_matrix,
    map_noise_blocks,
    sample_donsker_batch,
)
from .exact import covariance_block, covariance_sheet
from .grid import PointSet, SheetSample
from .hurst import HurstField, eval_hurst
from .report import DiagnosticsReport, config_digest

KS_ALPHA = 0.01


# ---------------------------------------------------------------------------
# test functions for the moment bound


@dataclass(frozen=True)
class Power:
    """``f(u) = coef * u**p`` on ``[0, 1]``; square integrable for ``p > -1/2``."""

    p: float = 0.0
    coef: float = 1.0

    def __post_init__(self):
        if self.p <= -0.5:
            raise ValueError("u**p is square integrable only for p > -1/2")
        if self.coef < 0:
            raise ValueError("test functions must be non-negative")

    def cell_integrals(self, n):
        e = np.arange(n + 1, dtype=float) / n
        q = self.p + 1
        return self.coef * np.diff(e**q) / q

    def l2_squared(self):
        return self.coef**2 / (2 * self.p + 1)


@dataclass(frozen=True)
class Step:
    """Piecewise-constant ``f`` with ``f = values[j]`` on ``[breaks[j], breaks[j+1])``."""

    breaks: tuple
    values: tuple

    def __post_init__(self):
        b = np.asarray(self.breaks, dtype=float)
        v = np.asarray(self.values, dtype=float)
        if b.size != v.size + 1 or b[0] != 0 or b[-1] != 1 or np.any(np.diff(b) <= 0):
            raise ValueError("breaks must increase from 0 to 1 with one more entry than values")
        if np.any(v < 0):
            raise ValueError("test functions must be non-negative")
        object.__setattr__(self, "breaks", tuple(b))
        object.__setattr__(self, "values", tuple(v))

    def cell_integrals(self, n):
        e = np.arange(n + 1, dtype=float) / n
        b = np.asarray(self.breaks)
        v = np.asarray(self.values)
        lo = np.maximum(e[:-1, None], b[None, :-1])
        hi = np.minimum(e[1:, None], b[None, 1:])
        return np.clip(hi - lo, 0, None) @ v

    def l2_squared(self):
        return float(np.diff(self.breaks) @ np.square(self.values))


def _double_factorial(k):
    return math.prod(range(k, 0, -2)) if k > 0 else 1


def _moment_se(x, m):
    xm = x**m
    R = len(xm)
    est = float(np.mean(xm))
    se = float(np.std(xm, ddof=1) / np.sqrt(R)) if R > 1 else float("nan")
    return est, se


def check_moment_bound(f_specs: Sequence, n: int, m: int, reps: int, seed: int = 0,
                       dist: str = "rademacher", threads=None) -> DiagnosticsReport:
    """Moment bound for ``I = int prod_i f_i(u_i) theta_n(u) du``.

    The per-draw integral is exact: ``I = n^(d/2) sum_k Z_k prod_i c_i(k_i)``
    with ``c_i`` the cell integrals of ``f_i``. For ``m = 2`` the mean is the
    deterministic ``n^d prod_i sum_k c_i(k)^2``, which per-cell Cauchy-Schwarz
    bounds by ``prod_i ||f_i||^2``. The Monte Carlo ratio
    ``E[I^m] / prod_i ||f_i||^m`` is compared with ``(m-1)!!``: the three
    supported noise laws all have moments dominated by the Gaussian ones.
    """
    if m % 2 or m < 2 or m > 8:
        raise ValueError(f"m must be an even integer in [2, 8], got {m}")
    d = len(f_specs)
    if d < 1:
        raise ValueError("need at least one test function")
    cells = [np.asarray(f.cell_integrals(n), dtype=float) for f in f_specs]
    norm_sq = float(np.prod([f.l2_squared() for f in f_specs]))
    digest = config_digest({"op": "moment_bound", "f": [repr(f) for f in f_specs], "n": n,
                            "m": m, "reps": reps, "seed": seed, "dist": dist})
    report = DiagnosticsReport(config_digest=digest)

    if m == 2:
        det = float(float(n) ** d * np.prod([np.sum(c**2) for c in cells]))
        slack = det - norm_sq
        report.add("moment_m2_exact", (det, norm_sq), 1e-12, slack <= 1e-12,
                   notes="deterministic n^d prod sum_k c_k^2 against prod ||f_i||^2")

    if reps > 0:
        cells_letters = "abcdefgh"[:d]
        subs = "z" + cells_letters + "," + ",".join(cells_letters) + "->z"
        scale = float(n) ** (d / 2.0)
        integrals = map_noise_blocks(lambda z: scale * np.einsum(subs, z, *cells, optimize=True),
                                     n, d, reps, seed, dist, threads)
        est, se = _moment_se(integrals, m)
        denom = norm_sq ** (m / 2)
        ratio, ratio_se = est / denom, se / denom
        ref = _double_factorial(m - 1)
        report.add(f"moment_m{m}_ratio", ratio, ref, ratio <= ref + 3 * ratio_se, ratio_se,
                   notes=f"Monte Carlo E[I^{m}]/prod||f||^{m} over {reps} draws; "
                         f"reference {(m - 1)}!! = {ref}")
    return report


def check_moment_trend(f_specs: Sequence, n_list: Sequence[int], m: int, reps: int,
                       seed: int = 0, dist: str = "rademacher", n_se: float = 3.0,
                       threads=None) -> DiagnosticsReport:
    """Moment ratios must not grow with ``n`` beyond ``n_se`` standard errors.

    Every ``n`` gets independent noise (seed offset by the position in
    ``n_list``). The check compares each later ratio with every earlier one.
    """
    ratios, ses = [], []
    for j, n in enumerate(n_list):
        r = check_moment_bound(f_specs, n, m, reps, seed + j, dist, threads)[f"moment_m{m}_ratio"]
        ratios.append(r.value)
        ses.append(r.standard_error)
    worst = -math.inf
    for i in range(len(n_list)):
        for j in range(i + 1, len(n_list)):
            z = (ratios[j] - ratios[i]) / math.hypot(ses[i], ses[j])
            worst = max(worst, z)
    digest = config_digest({"op": "moment_trend", "f": [repr(f) for f in f_specs],
                            "n_list": list(n_list), "m": m, "reps": reps, "seed": seed,
                            "dist": dist})
    report = DiagnosticsReport(config_digest=digest)
    report.add(f"moment_m{m}_trend", ratios, n_se, worst <= n_se, max(ses),
               notes=f"ratios for n={list(n_list)}; max growth z-score {worst:.3f}")
    return report


# ---------------------------------------------------------------------------
# increments


def _increment_exact(cov_fn, t, s):
    return cov_fn(t, t) + cov_fn(s, s) - 2 * cov_fn(t, s)


def _scale_ratio_check(report, name, seps, ratios, factor=2.0):
    pos = seps > 0
    if not pos.any():
        report.add(name, 0.0, factor, True, notes="all pairs coincide")
        return
    key = np.round(seps[pos], 12)
    coarse = key.max()
    fine = key.min()
    r = ratios[pos]
    coarse_max = float(r[key == coarse].max())
    fine_max = float(r[key == fine].max())
    ok = fine_max <= factor * coarse_max
    report.add(name, (fine_max, coarse_max), factor * coarse_max, ok,
               notes=f"max ratio at separation {fine:.3g} vs {factor:g}x max at {coarse:.3g}; "
                     "moment control half of the weak-convergence check")


def increment_moment(field: HurstField, n: int, pairs, m: int = 2, reps: int = 0,
                     seed: int = 0, dist: str = "rademacher", source: str = "donsker",
                     threads=None) -> DiagnosticsReport:
    """Increment moments ``E[X(t) - X(s)]^m`` against ``||t - s||^(mH)``.

    ``H = min_i {alpha_i, gamma}``. With ``source="donsker"`` the field is
    ``X_n`` (exact for ``m = 2`` through the covariance, Monte Carlo
    otherwise); with ``source="exact"`` it is the limit sheet and only
    ``m = 2`` is available. Passes when the largest ratio at the finest
    separation is at most twice the largest ratio at the coarsest one.
    """
    if m % 2 or m < 2:
        raise ValueError(f"m must be a positive even integer, got {m}")
    if source not in ("donsker", "exact"):
        raise ValueError(f"unknown source {source!r}")
    ts = np.array([np.atleast_1d(p[0]) for p in pairs], dtype=float)
    ss = np.array([np.atleast_1d(p[1]) for p in pairs], dtype=float)
    H = field.increment_exponent
    seps = np.linalg.norm(ts - ss, axis=1)

    ses = None
    if m == 2 and source == "donsker":
        cov = lambda a, b: donsker_covariance(field, n, a, b)
        moments = np.array([_increment_exact(cov, t, s) for t, s in zip(ts, ss)])
    elif m == 2:
        cov = lambda a, b: covariance_sheet(field, a, b)
        moments = np.array([_increment_exact(cov, t, s) for t, s in zip(ts, ss)])
    elif source == "exact":
        raise ValueError("the exact source supports m = 2 only")
    else:
        if reps < 2:
            raise ValueError("Monte Carlo increments need reps >= 2")
        xs = sample_donsker_batch(field, PointSet(np.vstack([ts, ss])), n, reps, seed, dist,
                                  threads)
        inc = xs[:, :len(ts)] - xs[:, len(ts):]
        moments = np.mean(inc**m, axis=0)
        ses = np.std(inc**m, axis=0, ddof=1) / np.sqrt(reps)
    moments = np.where(seps == 0, 0.0, moments)
    with np.errstate(divide="ignore", invalid="ignore"):
        ratios = np.where(seps > 0, moments / seps ** (m * H), 0.0)

    digest = config_digest({"op": "increment_moment", "field": field.describe(), "n": n,
                            "pairs": [ts.tolist(), ss.tolist()], "m": m, "reps": reps,
                            "seed": seed, "dist": dist, "source": source})
    report = DiagnosticsReport(config_digest=digest)
    report.add(f"increment_{source}_m{m}_ratios", ratios, float(ratios.max()), True,
               None if ses is None else float(np.max(ses / np.maximum(seps, 1e-300) ** (m * H))),
               notes=f"moment / ||t-s||^({m}*{H:.4g}) per pair")
    report.add(f"increment_{source}_m{m}_negative", float(moments.min()), 0.0,
               bool(np.all(moments >= -1e-12)), notes="second moments must be non-negative")
    _scale_ratio_check(report, f"increment_{source}_m{m}_no_blowup", seps, ratios)
    return report


@dataclass(frozen=True)
class DonskerCov:
    n: int


@dataclass(frozen=True)
class ExactCov:
    pass


def holder_slope(field: HurstField, source: Union[DonskerCov, ExactCov], t0, h_list,
                 axis: int = 0, tol: float = 0.05):
    """Fit the log-log slope of axis-aligned increment variances.

    Increments run from ``t0 - h e_axis`` to ``t0``. Returns ``(slope,
    report)``; the report compares ``slope / 2`` with ``H_axis(t0)``.
    """
    t0 = np.atleast_1d(np.asarray(t0, dtype=float))
    hs = np.asarray(h_list, dtype=float)
    if hs.size < 3:
        raise ValueError("need at least 3 scales to fit a slope")
    if np.any(hs <= 0):
        raise ValueError("scales must be positive")
    if hs.max() < 100 * hs.min():
        raise ValueError("scales must span at least two decades")
    if np.any(t0 < hs.max() + 0.1) or np.any(t0 > 1):
        raise ValueError("t0 must be interior: every coordinate >= max(h_list) + 0.1")
    if isinstance(source, DonskerCov):
        cov = lambda a, b: donsker_covariance(field, source.n, a, b)
        label = f"donsker(n={source.n})"
    else:
        cov = lambda a, b: covariance_sheet(field, a, b)
        label = "exact"
    moments = []
    for h in hs:
        s = t0.copy()
        s[axis] -= h
        moments.append(_increment_exact(cov, t0, s))
    moments = np.array(moments)
    slope = float(np.polyfit(np.log(hs), np.log(moments), 1)[0])
    target = float(eval_hurst(field, t0)[axis])
    digest = config_digest({"op": "holder_slope", "field": field.describe(), "source": label,
                            "t0": t0.tolist(), "h_list": hs.tolist(), "axis": axis})
    report = DiagnosticsReport(config_digest=digest)
    report.add(f"holder_slope_axis{axis}", (slope / 2, target), tol,
               abs(slope / 2 - target) <= tol,
               notes=f"{label} increments; fitted slope/2 against H_{axis}(t0)")
    return slope, report


# ---------------------------------------------------------------------------
# laws


def _ks(report, name, x, sd, alpha=KS_ALPHA):
    z = np.asarray(x, dtype=float) / sd
    res = stats.kstest(z, "norm", method="asymp")
    report.add(name, (float(res.statistic), float(res.pvalue)), alpha, res.pvalue > alpha,
               notes=f"one-sample KS against N(0,1) over {len(z)} standardized draws; "
                     f"threshold is the minimum p-value")


def ks_normality(field: HurstField, n: int, t, reps: int, seed: int = 0,
                 dist: str = "rademacher", threads=None) -> DiagnosticsReport:
    t = np.atleast_1d(np.asarray(t, dtype=float))
    if reps < 1000:
        raise ValueError("KS normality check needs reps >= 1000")
    var = donsker_covariance(field, n, t, t)
    if not var > 0:
        raise ValueError(f"X_n({t.tolist()}) has zero variance")
    x = sample_donsker_batch(field, PointSet(t[None, :]), n, reps, seed, dist, threads)[:, 0]
    digest = config_digest({"op": "ks_normality", "field": field.describe(), "n": n,
                            "t": t.tolist(), "reps": reps, "seed": seed, "dist": dist})
    report = DiagnosticsReport(config_digest=digest)
    _ks(report, "ks_normality", x, np.sqrt(var))
    return report


@dataclass(frozen=True)
class FddSpec:
    points: np.ndarray
    coeffs: np.ndarray

    def __post_init__(self):
        pts = np.atleast_2d(np.asarray(self.points, dtype=float))
        a = np.atleast_1d(np.asarray(self.coeffs, dtype=float))
        if len(pts) < 1 or len(a) != len(pts):
            raise ValueError("need q >= 1 points and one coefficient per point")
        if not np.any(a != 0):
            raise ValueError("at least one coefficient must be non-zero")
        object.__setattr__(self, "points", pts)
        object.__setattr__(self, "coeffs", a)


def _trend_ok(gaps, scale, max_inversions=1, max_rise=0.10):
    """At most ``max_inversions`` rises, each at most ``max_rise`` relative."""
    g = np.where(np.abs(gaps) <= 1e-12 * max(scale, 1e-300), 0.0, np.abs(gaps))
    rises = 0
    for prev, cur in zip(g[:-1], g[1:]):
        if cur > prev:
            rises += 1
            if prev == 0 or (cur - prev) / prev > max_rise:
                return False, rises
    return rises <= max_inversions, rises


def fdd_convergence(field: HurstField, spec: FddSpec, n_list: Sequence[int], reps: int = 0,
                    seed: int = 0, dist: str = "rademacher", tol: float = 0.02,
                    threads=None) -> DiagnosticsReport:
    """Variance of ``S_n = sum_j a_j X_n(t^j)`` against its limit, over ``n_list``.

    With ``reps > 0`` also runs a KS normality check on ``S_n`` at the
    largest ``n``.
    """
    n_list = list(n_list)
    if len(n_list) < 3:
        raise ValueError("n_list needs at least 3 entries")
    a = spec.coeffs
    target = float(a @ covariance_block(field, spec.points) @ a)
    variances = np.array([a @ donsker_covariance_matrix(field, n, spec.points) @ a
                          for n in n_list])
    gaps = np.abs(variances - target)
    digest = config_digest({"op": "fdd_convergence", "field": field.describe(),
                            "points": spec.points.tolist(), "coeffs": a.tolist(),
                            "n_list": n_list, "reps": reps, "seed": seed, "dist": dist,
                            "tol": tol})
    report = DiagnosticsReport(config_digest=digest)
    report.add("fdd_gap_final", (gaps[-1], target), tol * target, gaps[-1] < tol * target
               or gaps[-1] <= 1e-12 * max(target, 1.0),
               notes=f"|Var S_n - Var S| at n={n_list[-1]}; threshold {tol} * target; "
                     "fdd identification half of the weak-convergence check")
    ok, rises = _trend_ok(gaps, target)
    report.add("fdd_gap_trend", gaps, 1, ok,
               notes=f"gaps for n={n_list}; {rises} inversion(s), each allowed <= 10%")
    if reps > 0:
        n = n_list[-1]
        xs = sample_donsker_batch(field, PointSet(spec.points), n, reps, seed, dist, threads)
        _ks(report, "fdd_ks_normality", xs @ a, np.sqrt(variances[-1]))
    return report


def fdd_gap_table(field: HurstField, spec: FddSpec, n_list: Sequence[int]):
    """Rows ``(n, var_n, target, gap)`` for the same computation as :func:`fdd_convergence`."""
    a = spec.coeffs
    target = float(a @ covariance_block(field, spec.points) @ a)
    rows = []
    for n in n_list:
        v = float(a @ donsker_covariance_matrix(field, n, spec.points) @ a)
        rows.append((int(n), v, target, abs(v - target)))
    return rows


# ---------------------------------------------------------------------------


def empirical_covariance(samples, idx_a: int, idx_b: int):
    """Zero-mean cross-moment estimate ``sum x_a x_b / R`` and its standard error."""
    if isinstance(samples, np.ndarray):
        arr = np.atleast_2d(samples)
    else:
        samples = list(samples)
        if samples and isinstance(samples[0], SheetSample):
            g = samples[0].grid
            if any(s.grid.size != g.size for s in samples):
                raise ValueError("samples must share a grid")
        arr = np.array([np.asarray(getattr(s, "values", s), dtype=float) for s in samples])
    R, P = arr.shape
    if R < 2:
        raise ValueError("need at least 2 samples")
    for idx in (idx_a, idx_b):
        if not -P <= idx < P:
            raise IndexError(f"index {idx} out of range for {P} grid points")
    prod = arr[:, idx_a] * arr[:, idx_b]
    return float(np.mean(prod)), float(np.std(prod, ddof=1) / np.sqrt(R))
