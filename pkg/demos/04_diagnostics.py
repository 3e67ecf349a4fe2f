"""Running the diagnostics suite from Python.

The same checks back the `mfrl check` subcommand. Reports serialize to a
tab-separated text file that reads back exactly.
"""
import numpy as np

from mfrl import DiagnosticsReport, ExactCov, HurstField, Power
from mfrl import check_moment_bound, holder_slope, ks_normality, validate_hurst

field = HurstField.sinusoidal(0.5, 0.2, 1.0, d=2)

report = DiagnosticsReport()
report.extend(validate_hurst(field, 64))
report.extend(check_moment_bound([Power(0.0), Power(1.0)], 32, 4, 5000, seed=2))
for axis in range(2):
    slope, r = holder_slope(field, ExactCov(), [0.9, 0.9], np.geomspace(1e-2, 1e-5, 10), axis=axis)
    report.extend(r)
report.extend(ks_normality(field, 64, [0.9, 0.9], 5000, seed=20261014))

# the two-point law of a single Rademacher cell is the designed failure
ctrl = ks_normality(HurstField.constant(0.5), 1, [1.0], 2000, seed=1)
report.extend(ctrl, prefix="negative_control_")

print(report.summary())
text = report.to_text()
assert DiagnosticsReport.from_text(text) == report
print("\nfailed:", [c.name for c in report.failed()])
