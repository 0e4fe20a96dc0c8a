"""The full window x rate experiment.

Seven pulse windows, two sampling rates, five averaged repeats. The report
and the plot-data CSVs land in ./experiment_out (override with argv[1]).
"""

import sys

from chronoinfer import ExperimentConfig, run_experiment
from chronoinfer.fileio import write_experiment

out_dir = sys.argv[1] if len(sys.argv) > 1 else "experiment_out"
result = run_experiment(ExperimentConfig())

print(f"{'rate':>6} {'window':>7} {'R2 vs base':>11} {'dTDC nA':>9}")
for row in result.window_results:
    print(f"{row.rate_hz:>6g} {row.window_s:>7g} {row.r2_vs_baseline:>11.4f} {row.tdc_delta_na:>9.3f}")

for rate, stats in result.stats.items():
    print(f"\n{rate:g} Hz  inter-seq mu/sigma {stats.inter_seq_mu_na:.3f}/{stats.inter_seq_sigma_na:.3f} nA"
          f"  delta mu/sigma {stats.delta_mu_na:.3f}/{stats.delta_sigma_na:.3f} nA"
          f"  avg R2 {stats.avg_r2:.4f}  best window {result.best[rate].window_s:g} s")

for path in write_experiment(result, out_dir):
    print("wrote", path)
