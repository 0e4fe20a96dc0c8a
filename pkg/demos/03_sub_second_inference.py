"""Extrapolating a 0.3 s pulse to a full 6 s transient.

The pulse is fitted with k = u + v / t in closed form and the model fills in
the rest of the grid. Comparing against the measured 6 s baseline shows how
far the inverse law drifts from the 1/sqrt(t) Cottrell decay.
"""

from chronoinfer import (CellParams, NoiseSpec, fit_pulse, infer_full_sequence,
                         r_squared_vs, reduced_tdc_constant, simulate_transient, truncate)

cell = CellParams()
noise = NoiseSpec(sigma_a=0.01 * reduced_tdc_constant(cell), seed=0)
baseline = simulate_transient(cell, 6.0, 100, noise)

for window in (0.3, 1.0, 5.0):
    pulse = truncate(baseline, window)
    report = fit_pulse(pulse, baseline)
    full = infer_full_sequence(report.model, pulse, 6.0)
    print(f"window {window:>3} s: u={report.model.u:.4e} A  v={report.model.v:.4e} A*s  "
          f"fit R2={report.r_squared:.4f}  R2 vs baseline={r_squared_vs(baseline, full):.4f}  "
          f"TDC {full.terminal_current * 1e9:.2f} nA vs {baseline.terminal_current * 1e9:.2f} nA")
