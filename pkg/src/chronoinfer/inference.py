"""Inverse-regression extrapolation of short chronoamperometric pulses.

The model is ``k = u + v / b``. It is fitted by ordinary least squares on the
reciprocal predictor ``z = 1 / b``, which is a closed-form two-parameter
linear regression. Two choices of predictor are supported:

* ``Basis.TIME``: ``b`` is the sample time. The fit needs only the pulse and can
  extrapolate past the end of the measurement.
* ``Basis.VALUE``: ``b`` is the baseline current at the same time stamp. This
  maps baseline values to pulse values and cannot extrapolate on its own.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, SingularDesignError
from .transient import Transient, check_same_grid, grid_count, sample_grid


class Basis(str, enum.Enum):
    TIME = "time"
    VALUE = "value"

    @classmethod
    def parse(cls, value) -> Basis:
        if isinstance(value, cls):
            return value
        try:
            return cls(str(value).lower())
        except ValueError:
            raise DomainError(f"unknown fit basis {value!r}; expected 'time' or 'value'") from None


@dataclass(frozen=True)
class RegressionModel:
    u: float
    v: float
    basis: Basis = Basis.TIME

    def __post_init__(self):
        if not (math.isfinite(self.u) and math.isfinite(self.v)):
            raise DomainError("model coefficients must be finite")
        object.__setattr__(self, "basis", Basis.parse(self.basis))


@dataclass(frozen=True)
class FitReport:
    model: RegressionModel
    r_squared: float
    n_points: int
    residual_ss: float
    total_ss: float

    def as_dict(self) -> dict:
        return {
            "u": self.model.u,
            "v": self.model.v,
            "basis": self.model.basis.value,
            "r_squared": self.r_squared,
            "n_points": self.n_points,
            "residual_ss": self.residual_ss,
            "total_ss": self.total_ss,
        }


def fit_inverse(xs, ys, basis: Basis = Basis.TIME) -> FitReport:
    """Least-squares fit of ``y = u + v / x``.

    Raises:
        DomainError: mismatched lengths, fewer than two points, a zero or
            non-finite predictor, or non-finite responses.
        SingularDesignError: all predictors are identical.
    """
    x = np.asarray(xs, dtype=float)
    y = np.asarray(ys, dtype=float)
    if x.ndim != 1 or x.shape != y.shape:
        raise DomainError("xs and ys must be 1-D sequences of equal length")
    if x.size < 2:
        raise DomainError(f"need at least 2 points to fit, got {x.size}")
    if not (np.all(np.isfinite(x)) and np.all(np.isfinite(y))):
        raise DomainError("xs and ys must be finite")
    if np.any(x == 0):
        raise DomainError("predictor values must be nonzero")
    if np.all(x == x[0]):
        raise SingularDesignError("all predictor values are identical")

    z = 1.0 / x
    # Centred sums keep the normal equations well conditioned.
    zc = z - z.mean()
    y_mean = y.mean()
    yc = y - y_mean
    szz = float(np.dot(zc, zc))
    if szz == 0:
        raise SingularDesignError("reciprocal predictor has zero variance")
    v = float(np.dot(zc, yc)) / szz
    u = float(y_mean - v * z.mean())

    resid = y - (u + v * z)
    residual_ss = float(np.dot(resid, resid))
    total_ss = float(np.dot(yc, yc))
    if total_ss > 0:
        r2 = 1.0 - residual_ss / total_ss
    else:
        # Constant response: the flat line is an exact fit.
        r2 = 1.0
    return FitReport(RegressionModel(u, v, basis), r2, int(x.size), residual_ss, total_ss)


def predict(model: RegressionModel, b):
    """Evaluate ``u + v / b`` for a scalar or array predictor."""
    arr = np.asarray(b, dtype=float)
    if np.any(arr == 0) or not np.all(np.isfinite(arr)):
        raise DomainError("predictor must be finite and nonzero")
    out = model.u + model.v / arr
    return float(out) if arr.ndim == 0 else out


def fit_pulse(pulse: Transient, baseline: Transient | None = None,
              basis: Basis = Basis.TIME) -> FitReport:
    """Fit the inverse model to a pulse.

    With ``Basis.TIME`` the baseline is only used to check that the pulse is a
    prefix of its grid. With ``Basis.VALUE`` it supplies the predictor values.
    """
    basis = Basis.parse(basis)
    if baseline is not None:
        if len(pulse) > len(baseline):
            check_same_grid(pulse, baseline, "pulse and baseline")
        head = Transient(baseline.rate_hz, baseline.times[:len(pulse)],
                         baseline.currents[:len(pulse)])
        check_same_grid(pulse, head, "pulse and baseline prefix")
    if basis is Basis.TIME:
        return fit_inverse(pulse.times, pulse.currents, basis)
    if baseline is None:
        raise DomainError("value-mapping fit needs the baseline sequence")
    return fit_inverse(head.currents, pulse.currents, basis)


def infer_full_sequence(model: RegressionModel, pulse: Transient,
                        duration_s: float) -> Transient:
    """Extend a measured pulse to ``duration_s`` with model predictions.

    Samples inside the pulse keep their measured values; later grid points get
    ``u + v / t``.
    """
    if model.basis is not Basis.TIME:
        raise DomainError("only time-basis models can extrapolate a pulse; "
                          "value-mapping models need baseline values past the pulse")
    if not duration_s > pulse.end_time:
        raise DomainError(f"duration {duration_s} s must exceed the pulse end {pulse.end_time} s")
    rate = pulse.rate_hz
    # Shift to the pulse's own origin so file-loaded grids extend seamlessly.
    origin = float(pulse.times[0]) - 1.0 / rate
    n_total = grid_count(duration_s - origin, rate)
    times = origin + sample_grid(n_total, rate)
    times[:len(pulse)] = pulse.times
    tail = times[len(pulse):]
    currents = np.concatenate([pulse.currents, predict(model, tail)])
    return Transient(rate, times, currents)


def r_squared_vs(reference: Transient, candidate: Transient) -> float:
    """Coefficient of determination of ``candidate`` against ``reference``.

    Can be negative. Identical sequences give exactly 1, including when the
    reference is constant.
    """
    check_same_grid(reference, candidate, "reference and candidate")
    ref = reference.currents
    resid = ref - candidate.currents
    ss_res = float(np.dot(resid, resid))
    dev = ref - ref.mean()
    ss_tot = float(np.dot(dev, dev))
    if ss_res == 0:
        return 1.0
    if ss_tot == 0:
        raise DomainError("reference has zero variance; R^2 is undefined")
    return 1.0 - ss_res / ss_tot
