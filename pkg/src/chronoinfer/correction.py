"""Temperature and relative-humidity correction of raw sensor currents.

The raw value is first corrected for humidity-dependent temperature effects,
then the temperature-corrected value is corrected for relative humidity::

    x_temp = 0.148 x_raw + 25.478 exp(2.694e-9 k_rh) - 25.478
    x_rh   = 0.148 x_temp - 0.999 exp(-2.233e-9 k_temp) + 0.999

The typeset source is ambiguous about what sits in the exponent. The default
``"exponent"`` parse above makes each offset vanish at its reference condition.
The ``"product"`` parse reads the small constant as the exponent alone,
``25.478 exp(2.694e-9) k_rh - 25.478``.

Pressure correction is intentionally absent.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError

PARSES = ("exponent", "product")


@dataclass(frozen=True)
class EnvironmentReading:
    """Ambient conditions recorded before a measurement."""

    k_temp: float
    k_rh: float

    def __post_init__(self):
        if not math.isfinite(self.k_temp):
            raise DomainError(f"k_temp must be finite, got {self.k_temp!r}")
        if not (math.isfinite(self.k_rh) and 0 <= self.k_rh <= 100):
            raise DomainError(f"k_rh must lie in [0, 100] %RH, got {self.k_rh!r}")


@dataclass(frozen=True)
class CorrectionCoeffs:
    temp_gain: float = 0.148
    temp_scale: float = 25.478
    temp_exp: float = 2.694e-9
    rh_gain: float = 0.148
    rh_scale: float = 0.999
    rh_exp: float = 2.233e-9
    parse: str = "exponent"

    def __post_init__(self):
        if self.parse not in PARSES:
            raise DomainError(f"parse must be one of {PARSES}, got {self.parse!r}")
        for name in ("temp_gain", "temp_scale", "temp_exp", "rh_gain", "rh_scale", "rh_exp"):
            if not math.isfinite(getattr(self, name)):
                raise DomainError(f"correction coefficient {name} must be finite")


DEFAULT_COEFFS = CorrectionCoeffs()


def _finite(x, name):
    arr = np.asarray(x, dtype=float)
    if not np.all(np.isfinite(arr)):
        raise DomainError(f"{name} must be finite")
    return arr


def _out(arr):
    return float(arr) if arr.ndim == 0 else arr


def correct_temperature(x_raw, k_rh: float, c: CorrectionCoeffs = DEFAULT_COEFFS):
    """Apply the humidity-driven temperature correction to a raw value or array."""
    x = _finite(x_raw, "x_raw")
    _finite(k_rh, "k_rh")
    if c.parse == "exponent":
        # expm1 keeps the small offset accurate; it is exactly 0 at k_rh = 0.
        offset = c.temp_scale * math.expm1(c.temp_exp * k_rh)
    else:
        offset = c.temp_scale * math.exp(c.temp_exp) * k_rh - c.temp_scale
    return _out(c.temp_gain * x + offset)


def correct_humidity(x_temp, k_temp: float, c: CorrectionCoeffs = DEFAULT_COEFFS):
    """Apply the temperature-driven humidity correction to a temperature-corrected value."""
    x = _finite(x_temp, "x_temp")
    _finite(k_temp, "k_temp")
    if c.parse == "exponent":
        offset = -c.rh_scale * math.expm1(-c.rh_exp * k_temp)
    else:
        offset = c.rh_scale - c.rh_scale * math.exp(-c.rh_exp) * k_temp
    return _out(c.rh_gain * x + offset)


def correct(x_raw, env: EnvironmentReading, c: CorrectionCoeffs = DEFAULT_COEFFS):
    """Full correction chain: temperature first, then humidity."""
    return correct_humidity(correct_temperature(x_raw, env.k_rh, c), env.k_temp, c)


def correct_series(currents, temps, rhs, c: CorrectionCoeffs = DEFAULT_COEFFS) -> np.ndarray:
    """Per-sample correction with a separate environment reading for each sample."""
    x = _finite(currents, "currents")
    temps = _finite(temps, "temps")
    rhs = _finite(rhs, "rhs")
    if not (x.shape == temps.shape == rhs.shape):
        raise DomainError("currents and environment columns must have equal length")
    return np.array([correct(xi, EnvironmentReading(ti, hi), c)
                     for xi, ti, hi in zip(x, temps, rhs)], dtype=float)
