"""Cottrell current model and the uniformly sampled ``Transient`` signal type.

Sample grids start one period after the potential step (``t_i = i / rate``
for ``i = 1..N``) so the Cottrell singularity at ``t = 0`` is never hit.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError, EmptyGridError, GridMismatchError

FARADAY = 96485.0
# Electrode area and evaluation time baked into the reduced sensor constant.
SENSOR_AREA_CM2 = 2.25
REDUCED_EVAL_TIME_S = 1.5

# Absolute tolerance on sample spacing; loose enough for 17-digit CSV times.
SPACING_TOL_S = 1e-9
# Slack used when counting grid points that fit inside a duration.
_COUNT_EPS = 1e-9


@dataclass(frozen=True)
class CellParams:
    """Physical parameters of the electrochemical cell.

    Attributes:
        n_e: Electrons transferred per analyte molecule.
        conc_mol_per_cm3: Bulk analyte concentration c_k.
        diff_cm2_per_s: Diffusion coefficient D_k.
        area_cm2: Planar electrode area.
        faraday: Faraday constant in C/mol.
    """

    n_e: int = 1
    conc_mol_per_cm3: float = 1e-9
    diff_cm2_per_s: float = 1e-6
    area_cm2: float = SENSOR_AREA_CM2
    faraday: float = FARADAY

    def __post_init__(self):
        if int(self.n_e) != self.n_e or self.n_e < 1:
            raise DomainError(f"n_e must be a positive integer, got {self.n_e!r}")
        if not self.area_cm2 > 0:
            raise DomainError(f"area_cm2 must be > 0, got {self.area_cm2!r}")
        if not self.conc_mol_per_cm3 >= 0:
            raise DomainError(f"conc_mol_per_cm3 must be >= 0, got {self.conc_mol_per_cm3!r}")
        if not self.diff_cm2_per_s > 0:
            raise DomainError(f"diff_cm2_per_s must be > 0, got {self.diff_cm2_per_s!r}")
        if not (math.isfinite(self.faraday) and self.faraday > 0):
            raise DomainError(f"faraday must be finite and > 0, got {self.faraday!r}")

    @property
    def prefactor(self) -> float:
        """n_e * F * A * c_k * sqrt(D_k), the time-independent Cottrell numerator."""
        return (self.n_e * self.faraday * self.area_cm2 * self.conc_mol_per_cm3
                * math.sqrt(self.diff_cm2_per_s))


@dataclass(frozen=True)
class NoiseSpec:
    """Additive i.i.d. Gaussian noise with a fixed seed."""

    sigma_a: float = 0.0
    seed: int = 0

    def __post_init__(self):
        if not (math.isfinite(self.sigma_a) and self.sigma_a >= 0):
            raise DomainError(f"sigma_a must be finite and >= 0, got {self.sigma_a!r}")
        if not 0 <= int(self.seed) < 2**64:
            raise DomainError(f"seed must fit in 64 unsigned bits, got {self.seed!r}")

    def draw(self, n: int) -> np.ndarray:
        if self.sigma_a == 0:
            return np.zeros(n)
        rng = np.random.default_rng(int(self.seed))
        return rng.normal(0.0, self.sigma_a, size=n)


@dataclass(frozen=True, eq=False)
class Transient:
    """A current-vs-time series sampled at a fixed rate.

    ``times`` and ``currents`` are stored as read-only float64 arrays.
    """

    rate_hz: float
    times: np.ndarray = field(repr=False)
    currents: np.ndarray = field(repr=False)

    def __post_init__(self):
        if not (math.isfinite(self.rate_hz) and self.rate_hz > 0):
            raise DomainError(f"rate_hz must be finite and > 0, got {self.rate_hz!r}")
        t = np.array(self.times, dtype=float)
        i = np.array(self.currents, dtype=float)
        if t.ndim != 1 or t.shape != i.shape:
            raise DomainError("times and currents must be 1-D arrays of equal length")
        if t.size == 0:
            raise EmptyGridError("a transient needs at least one sample")
        if not (np.all(np.isfinite(t)) and np.all(np.isfinite(i))):
            raise DomainError("times and currents must be finite")
        if t.size > 1:
            dt = np.diff(t)
            if np.any(dt <= 0):
                raise DomainError("timestamps must be strictly increasing")
            if np.max(np.abs(dt - 1.0 / self.rate_hz)) > SPACING_TOL_S:
                raise DomainError(
                    f"sample spacing is inconsistent with rate_hz={self.rate_hz}")
        t.flags.writeable = False
        i.flags.writeable = False
        object.__setattr__(self, "times", t)
        object.__setattr__(self, "currents", i)

    def __len__(self) -> int:
        return self.times.size

    def __eq__(self, other):
        if not isinstance(other, Transient):
            return NotImplemented
        return (self.rate_hz == other.rate_hz
                and np.array_equal(self.times, other.times)
                and np.array_equal(self.currents, other.currents))

    __hash__ = None

    @property
    def samples(self) -> list[tuple[float, float]]:
        return list(zip(self.times.tolist(), self.currents.tolist()))

    @property
    def period_s(self) -> float:
        return 1.0 / self.rate_hz

    @property
    def end_time(self) -> float:
        return float(self.times[-1])

    @property
    def terminal_current(self) -> float:
        """Current at the final grid point (the transient diffusion current)."""
        return float(self.currents[-1])

    def with_currents(self, currents) -> Transient:
        return Transient(self.rate_hz, self.times, currents)


def grid_count(duration_s: float, rate_hz: float) -> int:
    """Number of grid points ``i / rate_hz`` (``i >= 1``) not exceeding ``duration_s``."""
    return int(math.floor(duration_s * rate_hz + _COUNT_EPS))


def sample_grid(n: int, rate_hz: float) -> np.ndarray:
    return np.arange(1, n + 1, dtype=float) / rate_hz


def same_grid(a: Transient, b: Transient) -> bool:
    return (len(a) == len(b) and math.isclose(a.rate_hz, b.rate_hz, rel_tol=1e-12)
            and bool(np.all(np.abs(a.times - b.times) <= SPACING_TOL_S)))


def check_same_grid(a: Transient, b: Transient, what: str = "transients") -> None:
    if not same_grid(a, b):
        raise GridMismatchError(f"{what} do not share a sample grid "
                                f"({len(a)} @ {a.rate_hz} Hz vs {len(b)} @ {b.rate_hz} Hz)")


def cottrell_current(cell: CellParams, t):
    """Diffusion-limited current after a potential step.

    ``I = n_e F A c_k sqrt(D_k) / sqrt(pi t)``. Accepts a scalar or an array of
    times; all times must be strictly positive.
    """
    t_arr = np.asarray(t, dtype=float)
    if np.any(~np.isfinite(t_arr)) or np.any(t_arr <= 0):
        raise DomainError("Cottrell current is only defined for finite t > 0")
    out = cell.prefactor / np.sqrt(np.pi * t_arr)
    if t_arr.ndim == 0:
        return float(out)
    return out


def reduced_tdc_constant(cell: CellParams) -> float:
    """Sensor-specific Cottrell current, n_e * 96485 * 2.25 * c_k * sqrt(D_k) / sqrt(1.5 pi).

    The 2.25 cm2 sensor evaluated at the fixed 1.5 s read time. The numeric
    prefactor is close to 1e5, so the result is roughly ``1e5 n_e c_k sqrt(D_k)``.
    Cell area and Faraday overrides are ignored here on purpose.
    """
    cell = CellParams(n_e=cell.n_e, conc_mol_per_cm3=cell.conc_mol_per_cm3,
                      diff_cm2_per_s=cell.diff_cm2_per_s,
                      area_cm2=SENSOR_AREA_CM2, faraday=FARADAY)
    return cottrell_current(cell, REDUCED_EVAL_TIME_S)


def simulate_transient(cell: CellParams, duration_s: float, rate_hz: float,
                       noise: NoiseSpec | None = None) -> Transient:
    """Sample a noisy Cottrell transient on the grid ``i / rate_hz``, ``i = 1..floor(duration * rate)``."""
    if not (math.isfinite(duration_s) and duration_s > 0):
        raise DomainError(f"duration_s must be > 0, got {duration_s!r}")
    if not (math.isfinite(rate_hz) and rate_hz > 0):
        raise DomainError(f"rate_hz must be > 0, got {rate_hz!r}")
    n = grid_count(duration_s, rate_hz)
    if n < 1:
        raise EmptyGridError(
            f"duration {duration_s} s at {rate_hz} Hz contains no samples")
    t = sample_grid(n, rate_hz)
    current = cottrell_current(cell, t)
    if noise is not None:
        current = current + noise.draw(n)
    return Transient(rate_hz, t, current)


def truncate(tr: Transient, window_s: float) -> Transient:
    """Keep the samples with ``t <= window_s`` (the pulse of an inference sequence)."""
    if not (math.isfinite(window_s) and window_s > 0):
        raise DomainError(f"window_s must be > 0, got {window_s!r}")
    keep = tr.times <= window_s + 1e-12
    if not np.any(keep):
        raise EmptyGridError(
            f"window {window_s} s is shorter than the first sample at {tr.times[0]} s")
    return Transient(tr.rate_hz, tr.times[keep], tr.currents[keep])
