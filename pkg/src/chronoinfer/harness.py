"""Window x sampling-rate experiment grid with repeat averaging and variability statistics."""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np

from .correction import CorrectionCoeffs, EnvironmentReading, correct
from .errors import ChronoError, DomainError
from .inference import (Basis, FitReport, RegressionModel, fit_inverse, fit_pulse,
                        infer_full_sequence, r_squared_vs)
from .transient import (CellParams, NoiseSpec, Transient, check_same_grid,
                        reduced_tdc_constant, simulate_transient, truncate)

NA_PER_A = 1e9
DEFAULT_WINDOWS_S = (0.3, 0.5, 1.0, 2.0, 3.0, 4.0, 5.0)
DEFAULT_RATES_HZ = (10.0, 100.0)
CORRECTION_MODES = ("off", "per_sample", "terminal")
AVERAGING_MODES = ("average_then_fit", "fit_then_average")
# Physical rest between repeats; carried into reports only.
RELAXATION_PERIOD_S = 300.0
R2_TIE_TOL = 1e-9


@dataclass(frozen=True)
class ExperimentConfig:
    """Everything needed to run the grid deterministically.

    ``sigma_a`` sets the absolute noise level. When it is ``None``, the noise
    is ``sigma_rel`` times the 1.5 s Cottrell current of ``cell``. Corrections
    are applied only when ``env`` is given and ``correction_mode`` is not ``"off"``.
    """

    duration_s: float = 6.0
    windows_s: tuple = DEFAULT_WINDOWS_S
    rates_hz: tuple = DEFAULT_RATES_HZ
    repeats: int = 5
    seed: int = 0
    sigma_a: float | None = None
    sigma_rel: float = 0.01
    cell: CellParams = field(default_factory=CellParams)
    coeffs: CorrectionCoeffs = field(default_factory=CorrectionCoeffs)
    env: EnvironmentReading | None = None
    correction_mode: str = "per_sample"
    basis: Basis = Basis.TIME
    averaging: str = "average_then_fit"
    workers: int = 1

    def __post_init__(self):
        object.__setattr__(self, "windows_s", tuple(float(w) for w in self.windows_s))
        object.__setattr__(self, "rates_hz", tuple(float(r) for r in self.rates_hz))
        object.__setattr__(self, "basis", Basis.parse(self.basis))
        if not (math.isfinite(self.duration_s) and self.duration_s > 0):
            raise DomainError(f"duration_s must be > 0, got {self.duration_s!r}")
        if not self.windows_s:
            raise DomainError("at least one window is required")
        if any(not (0 < w < self.duration_s) for w in self.windows_s):
            raise DomainError("every window must lie in (0, duration_s)")
        if not self.rates_hz or any(not (math.isfinite(r) and r > 0) for r in self.rates_hz):
            raise DomainError("rates must be positive")
        if int(self.repeats) != self.repeats or self.repeats < 1:
            raise DomainError(f"repeats must be a positive integer, got {self.repeats!r}")
        if self.sigma_a is None and not (math.isfinite(self.sigma_rel) and self.sigma_rel >= 0):
            raise DomainError("sigma_rel must be finite and >= 0")
        if self.correction_mode not in CORRECTION_MODES:
            raise DomainError(f"correction_mode must be one of {CORRECTION_MODES}")
        if self.averaging not in AVERAGING_MODES:
            raise DomainError(f"averaging must be one of {AVERAGING_MODES}")
        if int(self.workers) != self.workers or self.workers < 1:
            raise DomainError("workers must be a positive integer")
        self.noise  # validates sigma and seed

    @property
    def noise(self) -> NoiseSpec:
        sigma = self.sigma_a
        if sigma is None:
            sigma = self.sigma_rel * reduced_tdc_constant(self.cell)
        return NoiseSpec(sigma_a=sigma, seed=self.seed)

    @property
    def correction_active(self) -> bool:
        return self.env is not None and self.correction_mode != "off"


@dataclass(frozen=True)
class VariabilityStats:
    inter_seq_mu_na: float
    inter_seq_sigma_na: float
    delta_mu_na: float
    delta_sigma_na: float
    avg_r2: float

    def as_tuple(self) -> tuple:
        return (self.inter_seq_mu_na, self.inter_seq_sigma_na,
                self.delta_mu_na, self.delta_sigma_na, self.avg_r2)


@dataclass(frozen=True)
class WindowResult:
    rate_hz: float
    window_s: float
    fit: FitReport | None
    inferred: Transient
    r2_vs_baseline: float
    tdc_delta_na: float


@dataclass(frozen=True)
class CellFailure:
    """A grid cell that raised; recorded instead of aborting the run."""

    rate_hz: float
    window_s: float
    error: str


@dataclass
class ExperimentResult:
    config: ExperimentConfig
    baselines: dict
    cells: list
    stats: dict
    best: dict

    @property
    def window_results(self) -> list[WindowResult]:
        return [c for c in self.cells if isinstance(c, WindowResult)]

    @property
    def failures(self) -> list[CellFailure]:
        return [c for c in self.cells if isinstance(c, CellFailure)]

    def results_for(self, rate_hz: float) -> list[WindowResult]:
        return [c for c in self.window_results if c.rate_hz == rate_hz]


def average_sequences(seqs) -> Transient:
    """Pointwise mean of transients sharing one grid."""
    seqs = list(seqs)
    if not seqs:
        raise DomainError("cannot average an empty list of sequences")
    first = seqs[0]
    for other in seqs[1:]:
        check_same_grid(first, other, "averaged sequences")
    if len(seqs) == 1:
        return first
    stacked = np.vstack([s.currents for s in seqs])
    return first.with_currents(stacked.mean(axis=0))


def _population_stats(values) -> tuple[float, float]:
    arr = np.asarray(values, dtype=float)
    return float(arr.mean()), float(arr.std())


def variability_stats(results, baseline: Transient) -> VariabilityStats:
    """Table-style variability of inferred sequences against one baseline.

    Inter-sequence statistics pool ``|inferred - baseline|`` over every sample of
    every result. Delta statistics use each result's terminal-current delta.
    All standard deviations are population (ddof=0) values, in nA.
    """
    results = list(results)
    if not results:
        raise DomainError("variability statistics need at least one result")
    deviations = []
    for r in results:
        check_same_grid(baseline, r.inferred, "baseline and inferred sequence")
        deviations.append(np.abs(r.inferred.currents - baseline.currents) * NA_PER_A)
    inter_mu, inter_sigma = _population_stats(np.concatenate(deviations))
    delta_mu, delta_sigma = _population_stats([r.tdc_delta_na for r in results])
    avg_r2 = float(np.mean([r.r2_vs_baseline for r in results]))
    return VariabilityStats(inter_mu, inter_sigma, delta_mu, delta_sigma, avg_r2)


def select_best_window(results) -> WindowResult:
    """Highest R² vs baseline; near-ties go to the smaller TDC delta, then the shorter window."""
    results = list(results)
    if not results:
        raise DomainError("no window results to select from")
    top = max(r.r2_vs_baseline for r in results)
    contenders = [r for r in results if r.r2_vs_baseline >= top - R2_TIE_TOL]
    return min(contenders, key=lambda r: (r.tdc_delta_na, r.window_s))


def _repeat_seed(seed: int, rate_hz: float, repeat: int) -> int:
    # Keyed by the rate value so adding or reordering rates leaves other streams intact.
    ss = np.random.SeedSequence(seed, spawn_key=(int(round(rate_hz * 1_000_000)), repeat))
    return int(ss.generate_state(1, np.uint64)[0])


def simulate_repeats(cfg: ExperimentConfig, rate_hz: float) -> list[Transient]:
    """Raw (plus per-sample corrected, if configured) baseline runs for one rate."""
    noise = cfg.noise
    runs = []
    for j in range(cfg.repeats):
        spec = replace(noise, seed=_repeat_seed(noise.seed, rate_hz, j))
        tr = simulate_transient(cfg.cell, cfg.duration_s, rate_hz, spec)
        if cfg.correction_active and cfg.correction_mode == "per_sample":
            tr = tr.with_currents(correct(tr.currents, cfg.env, cfg.coeffs))
        runs.append(tr)
    return runs


def _terminal(cfg: ExperimentConfig, value: float) -> float:
    if cfg.correction_active and cfg.correction_mode == "terminal":
        return correct(value, cfg.env, cfg.coeffs)
    return value


def _fit_then_average(cfg, runs, baseline, window_s) -> FitReport:
    models = [fit_pulse(truncate(run, window_s), baseline, cfg.basis).model for run in runs]
    u = float(np.mean([m.u for m in models]))
    v = float(np.mean([m.v for m in models]))
    pulse = truncate(baseline, window_s)
    xs = pulse.times if cfg.basis is Basis.TIME else pulse.currents
    # Re-score the averaged model on the averaged pulse.
    ref = fit_inverse(xs, pulse.currents, cfg.basis)
    resid = pulse.currents - (u + v / np.asarray(xs))
    rss = float(np.dot(resid, resid))
    r2 = 1.0 - rss / ref.total_ss if ref.total_ss > 0 else float(rss == 0)
    return FitReport(RegressionModel(u, v, cfg.basis), r2, ref.n_points, rss, ref.total_ss)


def run_window(cfg: ExperimentConfig, rate_hz: float, window_s: float,
               baseline: Transient, runs=None) -> WindowResult:
    """Truncate, fit, extrapolate and score one (rate, window) cell."""
    pulse = truncate(baseline, window_s)
    if cfg.averaging == "fit_then_average" and runs is not None:
        fit = _fit_then_average(cfg, runs, baseline, window_s)
    else:
        fit = fit_pulse(pulse, baseline, cfg.basis)
    if len(pulse) == len(baseline):
        inferred = pulse
    else:
        inferred = infer_full_sequence(fit.model, pulse, cfg.duration_s)
    r2 = r_squared_vs(baseline, inferred)
    delta = abs(_terminal(cfg, inferred.terminal_current)
                - _terminal(cfg, baseline.terminal_current)) * NA_PER_A
    return WindowResult(rate_hz, window_s, fit, inferred, r2, delta)


def _run_cell(args):
    cfg, rate, window, baseline, runs = args
    try:
        return run_window(cfg, rate, window, baseline, runs)
    except ChronoError as exc:
        return CellFailure(rate, window, f"{type(exc).__name__}: {exc}")


def run_experiment(cfg: ExperimentConfig) -> ExperimentResult:
    """Run every (rate, window) cell of the grid.

    For each rate, ``cfg.repeats`` noisy baselines are simulated and averaged.
    Each window truncates the averaged baseline into a pulse, fits it, and
    extrapolates to ``cfg.duration_s``. Cells that raise are recorded as
    ``CellFailure`` entries. Output order is always (rate, window) as configured.
    """
    baselines, jobs = {}, []
    for rate in cfg.rates_hz:
        runs = simulate_repeats(cfg, rate)
        baselines[rate] = average_sequences(runs)
        for window in cfg.windows_s:
            jobs.append((cfg, rate, window, baselines[rate], runs))

    if cfg.workers > 1:
        with ThreadPoolExecutor(max_workers=cfg.workers) as pool:
            cells = list(pool.map(_run_cell, jobs))
    else:
        cells = [_run_cell(job) for job in jobs]

    stats, best = {}, {}
    for rate in cfg.rates_hz:
        ok = [c for c in cells if isinstance(c, WindowResult) and c.rate_hz == rate]
        stats[rate] = variability_stats(ok, baselines[rate]) if ok else None
        best[rate] = select_best_window(ok) if ok else None
    return ExperimentResult(cfg, baselines, cells, stats, best)
