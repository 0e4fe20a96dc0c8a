"""Simulating Cottrell transients.

A potential step on a planar electrode produces a diffusion-limited current
that decays as 1/sqrt(t). This script builds the reference sensor cell,
samples it at 10 Hz and 100 Hz, and shows that truncating a long run gives
the same samples as a short run.
"""

import numpy as np

from chronoinfer import (CellParams, NoiseSpec, cottrell_current, reduced_tdc_constant,
                         simulate_transient, truncate)

# 2.25 cm2 electrode, one electron, 1e-9 mol/cm3 analyte, D = 1e-6 cm2/s
cell = CellParams(n_e=1, conc_mol_per_cm3=1e-9, diff_cm2_per_s=1e-6)

print("current at 1.5 s      :", cottrell_current(cell, 1.5), "A")
print("sensor constant       :", reduced_tdc_constant(cell), "A")
print("prefactor / (n c sqrtD):",
      reduced_tdc_constant(cell) / (cell.conc_mol_per_cm3 * np.sqrt(cell.diff_cm2_per_s)))

# %% Sampling grids start one period after the step, never at t = 0.
for rate in (10, 100):
    tr = simulate_transient(cell, 6.0, rate)
    print(f"{rate:>4} Hz: {len(tr)} samples, first t = {tr.times[0]}, last t = {tr.end_time}")

# %% Seeded noise is reproducible.
noise = NoiseSpec(sigma_a=0.01 * reduced_tdc_constant(cell), seed=42)
a = simulate_transient(cell, 6.0, 100, noise)
b = simulate_transient(cell, 6.0, 100, noise)
print("same seed, same data:", a == b)

# %% An inference sequence is just the first few samples of a run.
pulse = truncate(simulate_transient(cell, 6.0, 100), 0.3)
print("0.3 s pulse at 100 Hz has", len(pulse), "samples ending at", pulse.end_time, "s")
