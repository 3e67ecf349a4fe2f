"""Multifractional Riemann-Liouville Brownian sheets: exact and Donsker-type sampling."""

from .diagnostics import (
    DonskerCov,
    ExactCov,
    FddSpec,
    Power,
    Step,
    check_moment_bound,
    check_moment_trend,
    empirical_covariance,
    fdd_convergence,
    fdd_gap_table,
    holder_slope,
    increment_moment,
    ks_normality,
)
from .donsker import (
    NoiseField,
    donsker_covariance,
    donsker_covariance_matrix,
    generate_noise,
    sample_donsker_batch,
    sample_donsker_sheet,
    wiener_donsker,
)
from .exact import (
    CovarianceMatrix,
    covariance_1d,
    covariance_block,
    covariance_matrix,
    covariance_sheet,
    sample_exact,
    sample_exact_array,
    sample_product_array,
    sample_product_oracle,
)
from .grid import Grid, PointSet, SheetSample, read_sample_csv
from .hurst import HurstField, eval_hurst, validate_hurst
from .kernel import CellIntegralTable, build_cell_table, cell_integral_1d, kernel_eval
from .report import DiagnosticsReport

__version__ = "0.1.0"
