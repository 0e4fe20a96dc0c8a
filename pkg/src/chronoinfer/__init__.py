"""Sub-second chronoamperometry: infer a full transient from a short pulse."""

__version__ = "0.1.0"

from .correction import (CorrectionCoeffs, EnvironmentReading, correct,  # noqa: E402
                         correct_humidity, correct_temperature)
from .errors import (ChronoError, DomainError, EmptyGridError, FormatError,  # noqa: E402
                     GridMismatchError, SingularDesignError)
from .harness import (CellFailure, ExperimentConfig, ExperimentResult,  # noqa: E402
                      VariabilityStats, WindowResult, average_sequences, run_experiment,
                      select_best_window, variability_stats)
from .inference import (Basis, FitReport, RegressionModel, fit_inverse,  # noqa: E402
                        fit_pulse, infer_full_sequence, predict, r_squared_vs)
from .transient import (CellParams, NoiseSpec, Transient, cottrell_current,  # noqa: E402
                        reduced_tdc_constant, simulate_transient, truncate)

__all__ = [
    "Basis", "CellFailure", "CellParams", "ChronoError", "CorrectionCoeffs",
    "DomainError", "EmptyGridError", "EnvironmentReading", "ExperimentConfig",
    "ExperimentResult", "FitReport", "FormatError", "GridMismatchError", "NoiseSpec",
    "RegressionModel", "SingularDesignError", "Transient", "VariabilityStats",
    "WindowResult", "average_sequences", "correct", "correct_humidity",
    "correct_temperature", "cottrell_current", "fit_inverse", "fit_pulse",
    "infer_full_sequence", "predict", "r_squared_vs", "reduced_tdc_constant",
    "run_experiment", "select_best_window", "simulate_transient", "truncate",
    "variability_stats",
]
