"""Riemann-Liouville kernel and its exact cell integrals.

The kernel is ``k_h(t, u) = prod_i (t_i - u_i)_+^(h_i - 1/2)``. Against the
piecewise-constant Donsker noise only the cell integrals

    F(t, a, b; h) = int_a^b (t - u)_+^(h - 1/2) du

are ever needed, and these have the closed form
``[(t - a)^p - (t - min(b, t))^p] / p`` with ``p = h + 1/2`` (zero when
``t <= a``). The singularity at ``u = t`` for ``h < 1/2`` is therefore
integrated exactly and never evaluated.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .grid import as_points
from .hurst import HurstField, eval_hurst


class KernelSingularityError(ValueError):
    """Raised when the kernel is evaluated exactly at its singular point."""


def kernel_eval(t, u, h) -> float:
    t, u, h = (np.atleast_1d(np.asarray(x, dtype=float)) for x in (t, u, h))
    if not (t.shape == u.shape == h.shape):
        raise ValueError("t, u and h must have the same length")
    if np.any(h <= 0) or np.any(h >= 1):
        raise ValueError("Hurst exponents must lie in (0, 1)")
    gap = t - u
    if np.any(gap <= 0):
        if np.any((gap == 0) & (h < 0.5)):
            raise KernelSingularityError(
                "kernel is infinite at u_i = t_i when h_i < 1/2; integrate instead")
        return 0.0
    return float(np.prod(gap ** (h - 0.5)))


def cell_integral_1d(t, a, b, h):
    """Exact ``int_a^b (t - u)_+^(h - 1/2) du``; broadcasts over its arguments."""
    t, a, b, h = np.broadcast_arrays(*(np.asarray(x, dtype=float) for x in (t, a, b, h)))
    if np.any(a >= b):
        raise ValueError("cell integral needs a < b")
    if np.any(h <= 0) or np.any(h >= 1):
        raise ValueError("Hurst exponent must lie in (0, 1)")
    p = h + 0.5
    c = np.minimum(b, t)
    upper = np.where(t > a, t - a, 0.0)
    lower = np.where(t > a, t - c, 0.0)
    out = (upper ** p - lower ** p) / p
    return out if out.ndim else float(out)


def cell_weights(t, h, n):
    """All ``n`` cell integrals of ``[0, 1]`` for coordinates ``t`` and exponents ``h``.

    ``t`` and ``h`` broadcast together; the result has shape
    ``broadcast(t, h).shape + (n,)``. Cells are ``[(k-1)/n, k/n)`` for
    ``k = 1..n``.
    """
    t = np.asarray(t, dtype=float)[..., None]
    h = np.asarray(h, dtype=float)[..., None]
    edges = np.arange(n + 1, dtype=float) / n
    p = h + 0.5
    # (t - edge)_+^p evaluated once per edge; F_k is a difference of neighbours
    g = np.where(t > edges, t - edges, 0.0) ** p
    return (g[..., :-1] - g[..., 1:]) / p


@dataclass(frozen=True)
class CellIntegralTable:
    """Cell integrals of the kernel for every evaluation point and axis.

    ``layout == "separable"``: ``values[i]`` has shape ``(len(t_axis[i]), n)``
    and is indexed by axis coordinate only, valid because ``H_i`` depends on
    ``t_i`` alone.

    ``layout == "per_point"``: ``values`` has shape ``(P, d, n)`` for the
    ``P`` points of the grid in row-major order.
    """

    n: int
    t_axis: tuple
    values: object
    layout: str

    def point_weights(self) -> np.ndarray:
        """Per-point weights, shape ``(P, d, n)``, whatever the layout."""
        if self.layout == "per_point":
            return self.values
        mesh = np.meshgrid(*[np.arange(len(a)) for a in self.t_axis], indexing="ij")
        idx = [m.ravel() for m in mesh]
        return np.stack([self.values[i][idx[i]] for i in range(len(self.t_axis))], axis=1)


def build_cell_table(field: HurstField, n: int, grid, layout: str = "auto") -> CellIntegralTable:
    if n < 1:
        raise ValueError("n must be >= 1")
    axes = getattr(grid, "axes", None)
    if layout == "auto":
        layout = "separable" if (axes is not None and field.separable) else "per_point"
    if layout == "separable":
        if axes is None or not field.separable:
            raise ValueError("separable layout needs a tensor grid and a per-axis Hurst field")
        values = tuple(cell_weights(a, field.axis(i, a), n) for i, a in enumerate(axes))
        return CellIntegralTable(n, axes, values, "separable")
    pts = as_points(grid)
    if pts.shape[1] != field.d:
        raise ValueError(f"grid has dimension {pts.shape[1]}, field has d={field.d}")
    h = eval_hurst(field, pts)
    t_axis = tuple(axes) if axes is not None else tuple(pts.T.copy())
    return CellIntegralTable(n, t_axis, cell_weights(pts, h, n), "per_point")
