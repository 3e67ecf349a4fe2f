"""Donsker-type approximation of the sheet.

The approximating field is

    X_n(t) = int prod_i (t_i - u_i)_+^(H_i(t) - 1/2) theta_n(u) du,
    theta_n(u) = n^(d/2) sum_k Z_k 1[k-1, k)(n u),

with i.i.d. centred unit-variance ``Z_k``. Because ``theta_n`` is constant
on cells and the kernel factorizes over axes,

    X_n(t) = n^(d/2) sum_k Z_k prod_i F_i(t, k_i),

where ``F_i`` are the exact cell integrals from :mod:`mfrl.kernel`. The
second moment needs no sampling at all:

    E[X_n(t) X_n(s)] = prod_i n sum_k F_i(t, k) F_i(s, k).
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from ._rng import TAG_NOISE, default_threads, stream_generator
from .grid import Grid, PointSet, SheetSample, as_points
from .hurst import HurstField, eval_hurst
from .kernel import CellIntegralTable, build_cell_table, cell_weights

DISTRIBUTIONS = ("rademacher", "gaussian", "uniform")
MAX_NOISE_VALUES = 10**8
BLOCK = 256

_LETTERS = "abcdefghijklmnopq"


class BudgetError(ValueError):
    """Requested noise array exceeds the memory budget."""


@dataclass(frozen=True)
class NoiseField:
    """Realized noise ``Z_k`` for ``k`` in ``{1..n}^d``; ``z`` has shape ``(n,)*d``."""

    n: int
    d: int
    dist: str
    seed: int
    z: np.ndarray
    stream: int = 0

    def __add__(self, other: "NoiseField") -> "NoiseField":
        if (self.n, self.d) != (other.n, other.d):
            raise ValueError("noise fields must share n and d")
        return NoiseField(self.n, self.d, "sum", -1, self.z + other.z)

    @classmethod
    def from_array(cls, z, dist="custom"):
        z = np.asarray(z, dtype=float)
        n = z.shape[0]
        if any(s != n for s in z.shape):
            raise ValueError("noise array must be a cube (n,)*d")
        return cls(n, z.ndim, dist, -1, z)


def _draw(gen, dist, size):
    if dist == "rademacher":
        return gen.integers(0, 2, size=size).astype(float) * 2.0 - 1.0
    if dist == "gaussian":
        return gen.standard_normal(size)
    if dist == "uniform":
        return gen.uniform(-np.sqrt(3.0), np.sqrt(3.0), size)
    raise ValueError(f"unknown distribution {dist!r}; expected one of {DISTRIBUTIONS}")


def _check_budget(n, d, cap):
    if n < 1 or d < 1:
        raise ValueError("n and d must be >= 1")
    total = n**d
    if total > cap:
        raise BudgetError(f"n^d = {total} noise values exceeds the cap of {cap}")


def generate_noise(n: int, d: int, dist: str = "rademacher", seed: int = 0, *,
                   stream: int = 0, max_values: int = MAX_NOISE_VALUES) -> NoiseField:
    """Draw ``n**d`` i.i.d. noise values in row-major cell order.

    ``stream`` selects an independent replicate for the same seed; replicate
    ``r`` of a Monte Carlo run is exactly ``generate_noise(..., stream=r)``.
    """
    _check_budget(n, d, max_values)
    gen = stream_generator(seed, stream, TAG_NOISE)
    z = _draw(gen, dist, n**d).reshape((n,) * d)
    return NoiseField(n, d, dist, int(seed), z, int(stream))


def _support(table: CellIntegralTable) -> list:
    """Number of cells per axis whose lower edge lies below the largest ``t_i``."""
    n = table.n
    return [min(n, int(np.ceil(np.max(a) * n - 1e-12))) for a in table.t_axis]


def _contract(z, table: CellIntegralTable) -> np.ndarray:
    """``n^(d/2) sum_k z[r, k] prod_i F_i`` for a batch ``z`` of shape ``(R, n, ..., n)``."""
    d = z.ndim - 1
    n = table.n
    keep = _support(table)
    scale = float(n) ** (d / 2.0)
    R = z.shape[0]
    if table.layout == "separable":
        P = int(np.prod([len(a) for a in table.t_axis]))
    else:
        P = table.values.shape[0]
    if min(keep) == 0:
        return np.zeros((R, P))
    zs = z[(slice(None),) + tuple(slice(0, k) for k in keep)]
    cells = _LETTERS[:d]
    if table.layout == "separable":
        outs = _LETTERS[d:2 * d]
        operands = [table.values[i][:, :keep[i]] for i in range(d)]
        subs = "z" + cells + "," + ",".join(outs[i] + cells[i] for i in range(d)) + "->z" + outs
        res = np.einsum(subs, zs, *operands, optimize=True)
    else:
        operands = [table.values[:, i, :keep[i]] for i in range(d)]
        subs = "z" + cells + "," + ",".join("p" + cells[i] for i in range(d)) + "->zp"
        res = np.einsum(subs, zs, *operands, optimize=True)
    return scale * res.reshape(R, P)


def sample_donsker_sheet(field: HurstField, noise: NoiseField, grid) -> SheetSample:
    if noise.d != field.d:
        raise ValueError(f"noise has d={noise.d}, field has d={field.d}")
    if not isinstance(grid, (Grid, PointSet)):
        grid = PointSet(grid)
    if grid.d != field.d:
        raise ValueError(f"grid has d={grid.d}, field has d={field.d}")
    table = build_cell_table(field, noise.n, grid)
    values = _contract(noise.z[None, ...], table)[0]
    prov = {"source": "donsker", "n": noise.n, "seed": noise.seed,
            "stream": noise.stream, "dist": noise.dist}
    return SheetSample(grid, values, prov)


def map_noise_blocks(fn, n: int, d: int, reps: int, seed: int = 0, dist: str = "rademacher",
                     threads=None, *, max_values: int = MAX_NOISE_VALUES) -> np.ndarray:
    """Apply ``fn`` to noise blocks of shape ``(R, n, ..., n)`` and stack the results.

    Row ``r`` of the stacked output comes from noise stream ``r``, so the
    result does not depend on the thread count or the block size.
    """
    _check_budget(n, d, max_values)
    threads = default_threads() if threads is None else max(1, int(threads))
    size = n**d

    def block(start):
        stop = min(reps, start + BLOCK)
        z = np.empty((stop - start, size))
        for j, r in enumerate(range(start, stop)):
            z[j] = _draw(stream_generator(seed, r, TAG_NOISE), dist, size)
        return fn(z.reshape((stop - start,) + (n,) * d))

    starts = list(range(0, reps, BLOCK))
    if not starts:
        return fn(np.zeros((0,) + (n,) * d))
    if threads == 1 or len(starts) == 1:
        parts = [block(s) for s in starts]
    else:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            parts = list(pool.map(block, starts))
    return np.concatenate(parts, axis=0)


def sample_donsker_batch(field: HurstField, grid, n: int, reps: int, seed: int = 0,
                         dist: str = "rademacher", threads=None, *,
                         max_values: int = MAX_NOISE_VALUES) -> np.ndarray:
    """Monte Carlo replicates of ``X_n`` on ``grid``; returns shape ``(reps, P)``.

    Row ``r`` equals ``sample_donsker_sheet(field, generate_noise(n, d, dist,
    seed, stream=r), grid).values``.
    """
    if not isinstance(grid, (Grid, PointSet)):
        grid = PointSet(grid)
    if grid.d != field.d:
        raise ValueError(f"grid has d={grid.d}, field has d={field.d}")
    _check_budget(n, field.d, max_values)
    table = build_cell_table(field, n, grid)
    return map_noise_blocks(lambda z: _contract(z, table), n, field.d, reps, seed, dist,
                            threads, max_values=max_values)


def wiener_donsker(noise: NoiseField, t) -> float:
    """Box integral ``int_[0,t] theta_n``, the Wichura approximation of the Brownian sheet."""
    t = np.atleast_1d(np.asarray(t, dtype=float))
    if t.size != noise.d:
        raise ValueError(f"point has dimension {t.size}, noise has d={noise.d}")
    field = HurstField.constant(0.5, d=noise.d)
    return float(sample_donsker_sheet(field, noise, PointSet(t[None, :])).values[0])


def _axis_gram(ft, fs, n):
    # ft: (P, d, n), fs: (Q, d, n) -> (d, P, Q)
    return n * np.einsum("pik,qik->ipq", ft, fs)


def point_cell_weights(field: HurstField, n: int, pts) -> np.ndarray:
    pts = as_points(pts)
    if pts.shape[1] != field.d:
        raise ValueError(f"point has dimension {pts.shape[1]}, field has d={field.d}")
    return cell_weights(pts, eval_hurst(field, pts), n)


def donsker_covariance_matrix(field: HurstField, n: int, grid, other=None) -> np.ndarray:
    """``E[X_n(t_a) X_n(s_b)]`` for all pairs of points, exactly."""
    ft = point_cell_weights(field, n, grid)
    fs = ft if other is None else point_cell_weights(field, n, other)
    return np.prod(_axis_gram(ft, fs, n), axis=0)


def donsker_covariance(field: HurstField, n: int, t, s) -> float:
    t = np.atleast_1d(np.asarray(t, dtype=float))
    s = np.atleast_1d(np.asarray(s, dtype=float))
    if t.size != field.d or s.size != field.d:
        raise ValueError(f"points must have dimension d={field.d}")
    return float(donsker_covariance_matrix(field, n, t[None, :], s[None, :])[0, 0])
