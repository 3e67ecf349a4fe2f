"""Evaluation grids and field realizations."""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field
from typing import Optional

import numpy as np


@dataclass(frozen=True)
class Grid:
    """Tensor grid in ``[0, 1]^d`` given by sorted per-axis coordinates.

    Points are enumerated in row-major (C) order of the axes.
    """

    axes: tuple

    def __post_init__(self):
        axes = tuple(np.atleast_1d(np.asarray(a, dtype=float)) for a in self.axes)
        for a in axes:
            if a.ndim != 1 or a.size == 0:
                raise ValueError("each grid axis must be a non-empty vector")
            if np.any(a < 0) or np.any(a > 1):
                raise ValueError("grid coordinates must lie in [0, 1]")
            if np.any(np.diff(a) < 0):
                raise ValueError("grid axes must be sorted")
        object.__setattr__(self, "axes", axes)

    @classmethod
    def uniform(cls, resolution, d, lo=0.0, hi=1.0):
        res = np.broadcast_to(np.atleast_1d(resolution), (d,))
        lo = np.broadcast_to(np.atleast_1d(np.asarray(lo, dtype=float)), (d,))
        hi = np.broadcast_to(np.atleast_1d(np.asarray(hi, dtype=float)), (d,))
        return cls(tuple(np.linspace(lo[i], hi[i], int(res[i])) for i in range(d)))

    @property
    def d(self) -> int:
        return len(self.axes)

    @property
    def shape(self) -> tuple:
        return tuple(a.size for a in self.axes)

    @property
    def size(self) -> int:
        return int(np.prod(self.shape))

    def points(self) -> np.ndarray:
        mesh = np.meshgrid(*self.axes, indexing="ij")
        return np.stack([m.ravel() for m in mesh], axis=-1)

    def describe(self):
        return {"axes": [a.tolist() for a in self.axes]}


@dataclass(frozen=True)
class PointSet:
    """An arbitrary finite set of points, shape ``(P, d)``."""

    pts: np.ndarray

    def __post_init__(self):
        pts = np.atleast_2d(np.asarray(self.pts, dtype=float))
        if np.any(pts < 0) or np.any(pts > 1):
            raise ValueError("points must lie in [0, 1]^d")
        object.__setattr__(self, "pts", pts)

    @property
    def d(self) -> int:
        return self.pts.shape[1]

    @property
    def shape(self) -> tuple:
        return (self.pts.shape[0],)

    @property
    def size(self) -> int:
        return self.pts.shape[0]

    def points(self) -> np.ndarray:
        return self.pts

    def describe(self):
        return {"points": self.pts.tolist()}


def as_points(grid_or_points) -> np.ndarray:
    if isinstance(grid_or_points, (Grid, PointSet)):
        return grid_or_points.points()
    return np.atleast_2d(np.asarray(grid_or_points, dtype=float))


@dataclass
class SheetSample:
    """One realization of a field on a grid.

    ``provenance`` is a small dict, e.g. ``{"source": "donsker", "n": 64,
    "seed": 7, "dist": "rademacher"}``.
    """

    grid: object
    values: np.ndarray
    provenance: dict = field(default_factory=dict)

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float).ravel()
        if self.values.size != self.grid.size:
            raise ValueError(f"{self.values.size} values for a grid of {self.grid.size} points")

    def as_array(self) -> np.ndarray:
        return self.values.reshape(self.grid.shape)

    def to_csv(self) -> str:
        pts = self.grid.points()
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow([f"t{i + 1}" for i in range(pts.shape[1])] + ["value"])
        for p, v in zip(pts, self.values):
            w.writerow([f"{x:.17g}" for x in p] + [f"{v:.17g}"])
        return buf.getvalue()


def read_sample_csv(text: str, provenance: Optional[dict] = None) -> SheetSample:
    """Parse the output of :meth:`SheetSample.to_csv`.

    The grid is rebuilt as a tensor grid when the points form one in
    row-major order, otherwise as a :class:`PointSet`.
    """
    rows = list(csv.reader(io.StringIO(text)))
    header, body = rows[0], rows[1:]
    d = len(header) - 1
    arr = np.array([[float(x) for x in r] for r in body], dtype=float).reshape(-1, d + 1)
    pts, values = arr[:, :d], arr[:, d]
    axes = tuple(np.unique(pts[:, i]) for i in range(d))
    grid = Grid(axes)
    if grid.size != len(pts) or not np.array_equal(grid.points(), pts):
        grid = PointSet(pts)
    return SheetSample(grid, values, dict(provenance or {}))
