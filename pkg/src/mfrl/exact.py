"""The Gaussian limit sheet: covariance, Cholesky sampler, product oracle.

The covariance of ``X(t) = int prod_i (t_i - u_i)_+^(H_i(t) - 1/2) W(du)``
factorizes over axes,

    C(t, s) = prod_i c(t_i, s_i, H_i(t), H_i(s)),
    c(t, s, h_t, h_s) = int_0^min(t,s) (t - u)^(h_t - 1/2) (s - u)^(h_s - 1/2) du.

With ``m = min(t, s)``, ``delta = |t - s|`` and ``w = m - u`` the 1D factor
is ``int_0^m w^b (w + delta)^a dw`` where ``b`` is the exponent attached to
the smaller argument. ``w^b`` is singular at 0 when ``b < 0`` and
``(w + delta)^a`` is nearly singular there when ``delta`` is small. Both are
handled by a geometric mesh ``m, m/2, m/4, ...`` down to below ``delta``,
Gauss-Legendre on every graded interval and Gauss-Jacobi (weight ``w^b``)
on the innermost one.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Optional

import numpy as np
from scipy.special import roots_jacobi, roots_legendre

from ._rng import TAG_EXACT, TAG_PRODUCT, stream_generator
from .grid import Grid, PointSet, SheetSample, as_points
from .hurst import HurstField, eval_hurst

MAX_POINTS = 4096
JITTER_CAP = 1e-6
NODES = 16
REFINE_TOL = 1e-12


class FactorizationError(np.linalg.LinAlgError):
    pass


class SpecIncompatibilityError(ValueError):
    pass


@lru_cache(maxsize=None)
def _legendre(npts):
    x, w = roots_legendre(npts)
    return (x + 1) / 2, w / 2


@lru_cache(maxsize=None)
def _jacobi(npts, b):
    # weight (1 + x)^b on [-1, 1] -> w^b on [0, 1]
    x, w = roots_jacobi(npts, 0.0, b)
    return (x + 1) / 2, w / 2 ** (b + 1)


def _graded_integral(m, delta, a, b, npts, ratio):
    """``int_0^m w^b (w + delta)^a dw`` on a geometric mesh with the given ratio."""
    # innermost interval [0, x0] must sit well inside the analytic disc of (w + delta)^a
    x0 = min(m, 0.5 * delta)
    levels = int(np.ceil(np.log(m / x0) / -np.log(ratio))) if x0 < m else 0
    x0 = m * ratio**levels
    xj, wj = _jacobi(npts, round(b, 15))
    inner = x0 ** (b + 1) * np.sum(wj * (x0 * xj + delta) ** a)
    if levels == 0:
        return inner
    lo = x0 / ratio ** np.arange(levels)
    hi = lo / ratio
    xl, wl = _legendre(npts)
    w = lo[:, None] + (hi - lo)[:, None] * xl[None, :]
    f = w**b * (w + delta) ** a
    outer = np.sum((hi - lo) * (f @ wl))
    return inner + outer


def covariance_1d(t, s, h_t, h_s) -> float:
    t, s, h_t, h_s = float(t), float(s), float(h_t), float(h_s)
    if not (0 < h_t < 1 and 0 < h_s < 1):
        raise ValueError(f"Hurst exponents must lie in (0, 1), got {h_t}, {h_s}")
    if not (0 <= t <= 1 and 0 <= s <= 1):
        raise ValueError(f"coordinates must lie in [0, 1], got {t}, {s}")
    if t <= s:
        m, delta, b, a = t, s - t, h_t - 0.5, h_s - 0.5
    else:
        m, delta, b, a = s, t - s, h_s - 0.5, h_t - 0.5
    if m == 0:
        return 0.0
    if delta == 0:
        return m ** (a + b + 1) / (a + b + 1)
    if a == 0:
        return m ** (b + 1) / (b + 1)
    ratio = 0.5
    for _ in range(4):
        coarse = _graded_integral(m, delta, a, b, NODES, ratio)
        fine = _graded_integral(m, delta, a, b, NODES + 8, ratio)
        if abs(fine - coarse) <= REFINE_TOL * abs(fine):
            return float(fine)
        ratio = np.sqrt(ratio)
    return float(fine)


def covariance_sheet(field: HurstField, t, s) -> float:
    t = np.atleast_1d(np.asarray(t, dtype=float))
    s = np.atleast_1d(np.asarray(s, dtype=float))
    if t.size != field.d or s.size != field.d:
        raise ValueError(f"points must have dimension d={field.d}")
    ht, hs = eval_hurst(field, t), eval_hurst(field, s)
    out = 1.0
    for i in range(field.d):
        out *= covariance_1d(t[i], s[i], ht[i], hs[i])
        if out == 0.0:
            break
    return out


def covariance_block(field: HurstField, pts, other=None) -> np.ndarray:
    """Matrix of ``covariance_sheet`` over two point lists."""
    a = as_points(pts)
    b = a if other is None else as_points(other)
    ha, hb = eval_hurst(field, a), eval_hurst(field, b)
    sym = other is None
    out = np.ones((len(a), len(b)))
    for i in range(field.d):
        for p in range(len(a)):
            q0 = p if sym else 0
            for q in range(q0, len(b)):
                if out[p, q] == 0.0:
                    continue
                out[p, q] *= covariance_1d(a[p, i], b[q, i], ha[p, i], hb[q, i])
    if sym:
        out = np.triu(out) + np.triu(out, 1).T
    return out


@dataclass
class CovarianceMatrix:
    """Covariance of the limit field on a grid plus its Cholesky factor.

    ``chol`` is the full ``P x P`` lower factor; rows and columns of points
    with a zero coordinate (``~active``) are identically zero.
    """

    grid: object
    cov: np.ndarray
    chol: Optional[np.ndarray] = None
    jitter_used: float = 0.0
    active: np.ndarray = field(default=None)

    def to_csv(self) -> str:
        P = self.cov.shape[0]
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow([str(j) for j in range(P)])
        for row in self.cov:
            w.writerow([f"{v:.17g}" for v in row])
        return buf.getvalue()


def factorize(cov, cap=JITTER_CAP):
    """Cholesky with escalating diagonal jitter; returns ``(L, jitter)``."""
    scale = float(np.max(np.diag(cov))) if cov.size else 0.0
    for jitter in [0.0] + [scale * 10.0**e for e in range(-15, int(round(np.log10(cap))) + 1)]:
        try:
            return np.linalg.cholesky(cov + jitter * np.eye(len(cov))), jitter
        except np.linalg.LinAlgError:
            continue
    raise FactorizationError(f"Cholesky failed with jitter up to {cap:g} * max(diag)")


def covariance_matrix(field: HurstField, grid, max_points: int = MAX_POINTS) -> CovarianceMatrix:
    pts = as_points(grid)
    P = len(pts)
    if P > max_points:
        raise ValueError(f"{P} grid points exceeds the cap of {max_points}")
    if not isinstance(grid, (Grid, PointSet)):
        grid = PointSet(pts)
    cov = covariance_block(field, pts)
    active = np.all(pts > 0, axis=1)
    chol = np.zeros_like(cov)
    jitter = 0.0
    if active.any():
        sub = cov[np.ix_(active, active)]
        L, jitter = factorize(sub)
        chol[np.ix_(active, active)] = L
    return CovarianceMatrix(grid, cov, chol, jitter, active)


def _gaussians(seed, tag, reps, size):
    out = np.empty((reps, size))
    for r in range(reps):
        out[r] = stream_generator(seed, r, tag).standard_normal(size)
    return out


def sample_exact_array(cm: CovarianceMatrix, seed: int, reps: int) -> np.ndarray:
    """``reps`` exact draws of the field on ``cm.grid``, shape ``(reps, P)``."""
    if cm.chol is None:
        raise ValueError("covariance matrix is not factorized")
    if reps < 0:
        raise ValueError("reps must be non-negative")
    idx = np.flatnonzero(cm.active)
    out = np.zeros((reps, cm.cov.shape[0]))
    if reps and idx.size:
        L = cm.chol[np.ix_(idx, idx)]
        out[:, idx] = _gaussians(seed, TAG_EXACT, reps, idx.size) @ L.T
    return out


def sample_exact(cm: CovarianceMatrix, seed: int, reps: int) -> list:
    arr = sample_exact_array(cm, seed, reps)
    return [
        SheetSample(cm.grid, row, {"source": "exact_cholesky", "seed": seed, "stream": r,
                                   "jitter": cm.jitter_used})
        for r, row in enumerate(arr)
    ]


def _axis_factors(field: HurstField, grid: Grid):
    if not isinstance(grid, Grid):
        raise ValueError("the product oracle needs a tensor grid")
    if not field.separable:
        raise SpecIncompatibilityError(
            f"{field.spec.kind} Hurst field is not per-axis; H_i must depend on t_i only")
    factors = []
    for i, axis in enumerate(grid.axes):
        h = field.axis(i, axis)
        cov = np.array([[covariance_1d(x, y, hx, hy) for y, hy in zip(axis, h)]
                        for x, hx in zip(axis, h)])
        active = axis > 0
        L = np.zeros_like(cov)
        if active.any():
            L[np.ix_(active, active)], _ = factorize(cov[np.ix_(active, active)])
        factors.append(L)
    return factors


def sample_product_array(field: HurstField, grid: Grid, seed: int, reps: int) -> np.ndarray:
    """Products of independent per-axis paths, shape ``(reps, P)``.

    Axis ``i`` of replicate ``r`` uses stream ``r * d + i``.
    """
    factors = _axis_factors(field, grid)
    d = field.d
    out = np.empty((reps, grid.size))
    for r in range(reps):
        paths = [
            factors[i] @ stream_generator(seed, r * d + i, TAG_PRODUCT).standard_normal(len(a))
            for i, a in enumerate(grid.axes)
        ]
        prod = paths[0]
        for p in paths[1:]:
            prod = np.multiply.outer(prod, p)
        out[r] = prod.ravel()
    return out


def sample_product_oracle(field: HurstField, grid: Grid, seed: int, stream: int = 0) -> SheetSample:
    """``Y(t) = Y_1(t_1) ... Y_d(t_d)`` from independent 1D multifractional paths.

    Has the covariance of the limit sheet but, for ``d >= 2``, not its law.
    """
    factors = _axis_factors(field, grid)
    d = field.d
    prod = None
    for i, a in enumerate(grid.axes):
        y = factors[i] @ stream_generator(seed, stream * d + i, TAG_PRODUCT).standard_normal(len(a))
        prod = y if prod is None else np.multiply.outer(prod, y)
    prov = {"source": "product_oracle", "seed": seed, "stream": stream,
            "warning": "matches the limit sheet in covariance only, not in law for d >= 2"}
    return SheetSample(grid, prod.ravel(), prov)
