"""Donsker approximation of the Brownian sheet.

With H = 1/2 the kernel is the indicator of the box [0, t], so X_n(t) is a
scaled sum of the noise in the cells below t. Its covariance is known in
closed form and should approach min(t1, s1) * min(t2, s2).
"""
import numpy as np

from mfrl import Grid, HurstField, PointSet
from mfrl import donsker_covariance_matrix, generate_noise, sample_donsker_sheet, wiener_donsker

field = HurstField.constant(0.5, d=2)

# one realization on a coarse grid
noise = generate_noise(8, 2, "rademacher", seed=3)
grid = Grid.uniform(5, 2, 0.2, 1.0)
sheet = sample_donsker_sheet(field, noise, grid)
print("X_8 on a 5x5 grid:")
print(np.round(sheet.as_array(), 3))

# the full-box value is the normalized noise sum
print("X_8(1, 1) =", wiener_donsker(noise, (1, 1)), " sum(Z)/8 =", noise.z.sum() / 8)

# covariance against the product of minima
pts = grid.points()
target = np.prod(np.minimum(pts[:, None], pts[None, :]), axis=-1)
for n in (4, 16, 64, 256):
    gap = np.abs(donsker_covariance_matrix(field, n, grid) - target).max()
    print(f"n={n:4d}  max covariance gap {gap:.5f}")

# on lattice points the Riemann sum is exact
lattice = PointSet([[0.25, 0.5], [0.75, 1.0]])
print("lattice covariance:", donsker_covariance_matrix(field, 8, lattice).round(15).tolist())
