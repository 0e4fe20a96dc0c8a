"""CSV transients, key-value configuration files, JSON run reports and plot data.

Every float is written in its shortest round-trip form (``repr``), so
``parse(emit(x)) == x`` holds bit for bit.
"""

from __future__ import annotations

import json
import math
import os
from dataclasses import dataclass, fields

import numpy as np

from . import __version__
from .correction import CorrectionCoeffs, EnvironmentReading
from .errors import DomainError, FormatError
from .harness import (CellFailure, ExperimentConfig, ExperimentResult, NA_PER_A,
                      RELAXATION_PERIOD_S)
from .inference import Basis
from .transient import CellParams, SPACING_TOL_S, Transient, check_same_grid

BASE_COLUMNS = ("time_s", "current_a")
ENV_COLUMNS = ("temp_c", "rh_pct")


def fmt(x: float) -> str:
    """Shortest decimal string that parses back to exactly ``x``."""
    x = float(x)
    if not math.isfinite(x):
        raise DomainError(f"cannot emit non-finite value {x!r}")
    return repr(x)


# -- transient CSV ---------------------------------------------------------

@dataclass(frozen=True, eq=False)
class TransientRecord:
    """A loaded CSV: the transient plus per-sample environment columns, if any."""

    transient: Transient
    temp_c: np.ndarray | None = None
    rh_pct: np.ndarray | None = None

    @property
    def has_env(self) -> bool:
        return self.temp_c is not None


def _infer_rate(times: np.ndarray) -> float:
    rate = 1.0 / float(np.median(np.diff(times)))
    # Spacing parsed from text rarely inverts to an exact integer rate.
    nearest = round(rate)
    if nearest > 0 and abs(rate - nearest) <= 1e-6 * nearest:
        return float(nearest)
    return rate


def parse_transient_csv(text: str, rate_hz: float | None = None) -> TransientRecord:
    lines = text.splitlines()
    if not lines:
        raise FormatError("line 1: empty file, expected a header row")
    header = tuple(h.strip() for h in lines[0].split(","))
    if header not in (BASE_COLUMNS, BASE_COLUMNS + ENV_COLUMNS):
        raise FormatError(f"line 1: header must be {','.join(BASE_COLUMNS)}"
                          f"[,{','.join(ENV_COLUMNS)}], got {lines[0]!r}")
    rows = []
    for lineno, line in enumerate(lines[1:], start=2):
        if not line.strip():
            continue
        parts = line.split(",")
        if len(parts) != len(header):
            raise FormatError(f"line {lineno}: expected {len(header)} fields, got {len(parts)}")
        try:
            values = [float(p) for p in parts]
        except ValueError:
            raise FormatError(f"line {lineno}: malformed number in {line!r}") from None
        if not all(math.isfinite(v) for v in values):
            raise FormatError(f"line {lineno}: non-finite value in {line!r}")
        if rows and values[0] <= rows[-1][1][0]:
            raise FormatError(f"line {lineno}: time {parts[0]} does not increase "
                              f"past the previous sample")
        rows.append((lineno, values))
    if not rows:
        raise FormatError("file contains no samples")

    data = np.array([v for _, v in rows], dtype=float)
    times = data[:, 0]
    if len(rows) > 1:
        dt = np.diff(times)
        med = float(np.median(dt))
        bad = np.flatnonzero(np.abs(dt - med) > SPACING_TOL_S)
        if bad.size:
            raise FormatError(f"line {rows[bad[0] + 1][0]}: sample spacing "
                              f"{dt[bad[0]]!r} s deviates from the median {med!r} s")
    if rate_hz is None:
        if len(rows) < 2:
            raise FormatError("cannot infer the sampling rate from a single sample; pass a rate")
        rate_hz = _infer_rate(times)
    tr = Transient(float(rate_hz), times, data[:, 1])
    if len(header) == 4:
        for col in data[:, 3]:
            if not 0 <= col <= 100:
                raise FormatError(f"relative humidity {col!r} outside [0, 100]")
        return TransientRecord(tr, data[:, 2].copy(), data[:, 3].copy())
    return TransientRecord(tr)


def load_record(path, rate_hz: float | None = None) -> TransientRecord:
    with open(path, encoding="utf-8", newline="") as fh:
        return parse_transient_csv(fh.read(), rate_hz)


def load_transient(path, rate_hz: float | None = None) -> Transient:
    """Read a ``time_s,current_a[,temp_c,rh_pct]`` CSV.

    The sampling rate comes from the median spacing unless ``rate_hz`` is given.
    """
    return load_record(path, rate_hz).transient


def format_transient_csv(tr: Transient, temp_c=None, rh_pct=None) -> str:
    with_env = temp_c is not None or rh_pct is not None
    if with_env and (temp_c is None or rh_pct is None
                     or len(temp_c) != len(tr) or len(rh_pct) != len(tr)):
        raise DomainError("temp_c and rh_pct must both be given with one value per sample")
    out = [",".join(BASE_COLUMNS + (ENV_COLUMNS if with_env else ()))]
    if with_env:
        for t, i, tc, rh in zip(tr.times, tr.currents, temp_c, rh_pct):
            out.append(f"{fmt(t)},{fmt(i)},{fmt(tc)},{fmt(rh)}")
    else:
        out.extend(f"{fmt(t)},{fmt(i)}" for t, i in zip(tr.times, tr.currents))
    return "\n".join(out) + "\n"


def emit_transient(tr: Transient, path, temp_c=None, rh_pct=None) -> None:
    _write(path, format_transient_csv(tr, temp_c, rh_pct))


def emit_record(rec: TransientRecord, path) -> None:
    emit_transient(rec.transient, path, rec.temp_c, rec.rh_pct)


def _write(path, text: str) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(text)


# -- plot data -------------------------------------------------------------

def _label(key) -> str:
    return fmt(key) if isinstance(key, (int, float)) else str(key)


def format_plot_data(baseline: Transient, inferred) -> str:
    items = list(dict(inferred).items()) if inferred else []
    for _, tr in items:
        check_same_grid(baseline, tr, "baseline and inferred sequence")
    header = ["time_s", "baseline_a"] + [f"inferred_{_label(k)}_a" for k, _ in items]
    cols = [baseline.times, baseline.currents] + [tr.currents for _, tr in items]
    rows = [",".join(header)]
    for values in zip(*cols):
        rows.append(",".join(fmt(v) for v in values))
    return "\n".join(rows) + "\n"


def emit_plot_data(baseline: Transient, inferred, path) -> None:
    """Write a wide CSV of the baseline and each inferred curve.

    ``inferred`` maps a label (usually the window length in seconds) to a
    transient on the baseline grid. Columns are
    ``time_s,baseline_a,inferred_<label>_a,...``.
    """
    _write(path, format_plot_data(baseline, inferred))


# -- configuration ---------------------------------------------------------

_CELL_KEYS = {f.name for f in fields(CellParams)}
_COEFF_KEYS = {f.name for f in fields(CorrectionCoeffs)}


def _floats(value: str) -> tuple:
    return tuple(float(v) for v in value.split(",") if v.strip())


def parse_config(text: str) -> ExperimentConfig:
    """Parse ``key = value`` lines into an :class:`ExperimentConfig`.

    Blank lines and ``#`` comments are ignored. Keys not present keep their
    defaults. See ``DEFAULT_CONFIG_TEXT`` for every recognised key.
    """
    top, cell, coeffs, env = {}, {}, {}, {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise FormatError(f"config line {lineno}: expected 'key = value', got {raw!r}")
        key, value = (s.strip() for s in line.split("=", 1))
        try:
            if key.startswith("cell."):
                name = key[5:]
                if name not in _CELL_KEYS:
                    raise KeyError(key)
                cell[name] = int(value) if name == "n_e" else float(value)
            elif key.startswith("coeff."):
                name = key[6:]
                if name not in _COEFF_KEYS:
                    raise KeyError(key)
                coeffs[name] = value if name == "parse" else float(value)
            elif key in ("env.k_temp", "env.k_rh"):
                env[key[4:]] = float(value)
            elif key in ("duration_s", "sigma_rel"):
                top[key] = float(value)
            elif key == "sigma_a":
                top[key] = None if value.lower() in ("", "auto", "none") else float(value)
            elif key in ("windows_s", "rates_hz"):
                top[key] = _floats(value)
            elif key in ("repeats", "seed", "workers"):
                top[key] = int(value)
            elif key in ("correction_mode", "averaging"):
                top[key] = value
            elif key == "basis":
                top[key] = Basis.parse(value)
            else:
                raise KeyError(key)
        except KeyError:
            raise FormatError(f"config line {lineno}: unknown key {key!r}") from None
        except ValueError as exc:
            raise FormatError(f"config line {lineno}: bad value for {key!r}: {exc}") from None
    if env and set(env) != {"k_temp", "k_rh"}:
        raise FormatError("env.k_temp and env.k_rh must be given together")
    return ExperimentConfig(
        cell=CellParams(**cell),
        coeffs=CorrectionCoeffs(**coeffs),
        env=EnvironmentReading(**env) if env else None,
        **top,
    )


def load_config(path_or_default) -> ExperimentConfig:
    """Load a config file; the literal ``"default"`` yields the built-in defaults."""
    if path_or_default in (None, "default"):
        return ExperimentConfig()
    with open(path_or_default, encoding="utf-8") as fh:
        return parse_config(fh.read())


def config_to_dict(cfg: ExperimentConfig) -> dict:
    """Effective configuration, defaults and derived noise level included."""
    return {
        "duration_s": float(cfg.duration_s),
        "windows_s": list(cfg.windows_s),
        "rates_hz": list(cfg.rates_hz),
        "repeats": int(cfg.repeats),
        "seed": int(cfg.seed),
        "sigma_a": cfg.noise.sigma_a,
        "sigma_rel": None if cfg.sigma_a is not None else float(cfg.sigma_rel),
        "cell": {f.name: getattr(cfg.cell, f.name) for f in fields(CellParams)},
        "coeff": {f.name: getattr(cfg.coeffs, f.name) for f in fields(CorrectionCoeffs)},
        "env": None if cfg.env is None else {"k_temp": cfg.env.k_temp, "k_rh": cfg.env.k_rh},
        "correction_mode": cfg.correction_mode,
        "correction_applied": cfg.correction_active,
        "basis": cfg.basis.value,
        "averaging": cfg.averaging,
        "workers": int(cfg.workers),
    }


def format_config(cfg: ExperimentConfig) -> str:
    """Render ``cfg`` as a config file that parses back to the same settings."""
    lines = [
        f"duration_s = {fmt(cfg.duration_s)}",
        "windows_s = " + ", ".join(fmt(w) for w in cfg.windows_s),
        "rates_hz = " + ", ".join(fmt(r) for r in cfg.rates_hz),
        f"repeats = {cfg.repeats}",
        f"seed = {cfg.seed}",
        "sigma_a = " + ("auto" if cfg.sigma_a is None else fmt(cfg.sigma_a)),
        f"sigma_rel = {fmt(cfg.sigma_rel)}",
        f"basis = {cfg.basis.value}",
        f"averaging = {cfg.averaging}",
        f"correction_mode = {cfg.correction_mode}",
        f"workers = {cfg.workers}",
        f"cell.n_e = {cfg.cell.n_e}",
    ]
    for name in ("conc_mol_per_cm3", "diff_cm2_per_s", "area_cm2", "faraday"):
        lines.append(f"cell.{name} = {fmt(getattr(cfg.cell, name))}")
    for f in fields(CorrectionCoeffs):
        value = getattr(cfg.coeffs, f.name)
        lines.append(f"coeff.{f.name} = {value if f.name == 'parse' else fmt(value)}")
    if cfg.env is not None:
        lines.append(f"env.k_temp = {fmt(cfg.env.k_temp)}")
        lines.append(f"env.k_rh = {fmt(cfg.env.k_rh)}")
    return "\n".join(lines) + "\n"


DEFAULT_CONFIG_TEXT = format_config(ExperimentConfig())


# -- run report ------------------------------------------------------------

STAT_DEFINITIONS = {
    "inter_seq": "mean and population std of |inferred - baseline| pooled over every "
                 "sample of every window, nA",
    "delta": "mean and population std over windows of |inferred TDC - baseline TDC|, "
             "TDC = current at the final grid point, nA",
    "avg_r2": "mean over windows of 1 - SS_res/SS_tot of the inferred sequence "
              "against the averaged baseline",
    "best_window": "max R^2 vs baseline; ties within 1e-9 broken by smaller TDC delta, "
                   "then shorter window",
}


def _stats_dict(stats) -> dict | None:
    if stats is None:
        return None
    d = {
        "inter_seq_mu_na": stats.inter_seq_mu_na,
        "inter_seq_sigma_na": stats.inter_seq_sigma_na,
        "delta_mu_na": stats.delta_mu_na,
        "delta_sigma_na": stats.delta_sigma_na,
        "avg_r2": stats.avg_r2,
    }
    for key in ("inter_seq_mu", "inter_seq_sigma", "delta_mu", "delta_sigma"):
        d[key + "_a"] = d[key + "_na"] / NA_PER_A
    return d


def build_report(result: ExperimentResult) -> dict:
    cfg = result.config
    rates = []
    for rate in cfg.rates_hz:
        baseline = result.baselines[rate]
        windows = []
        for cell in result.cells:
            if cell.rate_hz != rate:
                continue
            if isinstance(cell, CellFailure):
                windows.append({"window_s": cell.window_s, "status": "error",
                                "error": cell.error})
                continue
            windows.append({
                "window_s": cell.window_s,
                "status": "ok",
                "fit": cell.fit.as_dict() if cell.fit is not None else None,
                "r2_vs_baseline": cell.r2_vs_baseline,
                "inferred_tdc_a": cell.inferred.terminal_current,
                "tdc_delta_na": cell.tdc_delta_na,
                "tdc_delta_a": cell.tdc_delta_na / NA_PER_A,
            })
        best = result.best.get(rate)
        rates.append({
            "rate_hz": rate,
            "n_samples": len(baseline),
            "baseline_tdc_a": baseline.terminal_current,
            "baseline_tdc_na": baseline.terminal_current * NA_PER_A,
            "windows": windows,
            "stats": _stats_dict(result.stats.get(rate)),
            "best_window_s": None if best is None else best.window_s,
        })
    return {
        "tool": {"name": "chronoinfer", "version": __version__},
        "config": config_to_dict(cfg),
        "protocol": {
            "relaxation_period_s": RELAXATION_PERIOD_S,
            "repeat_handling": cfg.averaging,
            "terminal_current_definition": "value at the final grid point",
        },
        "definitions": STAT_DEFINITIONS,
        "rates": rates,
    }


def format_report(report: dict) -> str:
    return json.dumps(report, indent=2, allow_nan=False, ensure_ascii=False) + "\n"


def parse_report(text: str) -> dict:
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise FormatError(f"report is not valid JSON: {exc}") from None


def emit_report(report: dict, path) -> None:
    _write(path, format_report(report))


def load_report(path) -> dict:
    with open(path, encoding="utf-8") as fh:
        return parse_report(fh.read())


def write_experiment(result: ExperimentResult, out_dir) -> list[str]:
    """Write ``report.json`` and one ``plot_<rate>hz.csv`` per rate into ``out_dir``."""
    os.makedirs(out_dir, exist_ok=True)
    written = []
    path = os.path.join(out_dir, "report.json")
    emit_report(build_report(result), path)
    written.append(path)
    for rate in result.config.rates_hz:
        inferred = {r.window_s: r.inferred for r in result.results_for(rate)}
        path = os.path.join(out_dir, f"plot_{rate:g}hz.csv")
        emit_plot_data(result.baselines[rate], inferred, path)
        written.append(path)
    return written
