"""How fast does X_n approach the limit sheet?

The covariance gap is deterministic, so no sampling is needed. Where H is
small the kernel is singular at u = t and the piecewise-constant noise
resolves it slowly: the gap shrinks roughly like n^(-2 min H).
"""
import numpy as np

from mfrl import FddSpec, Grid, HurstField, covariance_block, donsker_covariance_matrix
from mfrl import fdd_gap_table

field = HurstField.sinusoidal(0.5, 0.2, 1.0, d=2)
grid = Grid.uniform(4, 2, 0.25, 1.0)
exact = covariance_block(field, grid.points())

prev, prev_n = None, None
for n in (8, 16, 32, 64, 256, 1024):
    gap = np.abs(donsker_covariance_matrix(field, n, grid) - exact)
    worst = grid.points()[np.unravel_index(gap.argmax(), gap.shape)[0]]
    rate = "" if prev is None else f"  local rate {np.log(prev / gap.max()) / np.log(n / prev_n):.2f}"
    print(f"n={n:5d}  max gap {gap.max():.5f} at t={worst}{rate}")
    prev, prev_n = gap.max(), n

# a linear combination of three points
spec = FddSpec([[0.9, 0.8], [0.5, 0.7], [0.3, 0.95]], [1.0, -1.0, 0.5])
for n, var, target, gap in fdd_gap_table(field, spec, [16, 64, 256, 1024, 4096]):
    print(f"n={n:5d}  Var S_n={var:.5f}  Var S={target:.5f}  relative gap {gap / target:.2%}")
