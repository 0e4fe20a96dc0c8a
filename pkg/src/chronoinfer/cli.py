"""Command-line entry point: ``chronoinfer <subcommand> ...``."""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import replace

from . import __version__
from .correction import CorrectionCoeffs, EnvironmentReading, correct, correct_series
from .errors import ChronoError
from .fileio import (format_transient_csv, load_config, load_record, load_transient,
                     write_experiment, fmt)
from .harness import NA_PER_A, WindowResult, variability_stats
from .inference import Basis, fit_pulse, infer_full_sequence, r_squared_vs
from .transient import CellParams, NoiseSpec, simulate_transient, truncate


def _emit(text: str, out: str) -> None:
    if out == "-":
        sys.stdout.write(text)
    else:
        with open(out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)


def cmd_simulate(args) -> int:
    cell = CellParams(n_e=args.n_e, conc_mol_per_cm3=args.conc, diff_cm2_per_s=args.diff,
                      area_cm2=args.area, faraday=args.faraday)
    tr = simulate_transient(cell, args.duration, args.rate, NoiseSpec(args.sigma, args.seed))
    _emit(format_transient_csv(tr), args.out)
    return 0


def cmd_correct(args) -> int:
    rec = load_record(args.input, args.rate)
    coeffs = load_config(args.config).coeffs if args.config else CorrectionCoeffs()
    if args.parse:
        coeffs = replace(coeffs, parse=args.parse)
    tr = rec.transient
    if args.temp is not None or args.rh is not None:
        if args.temp is None or args.rh is None:
            raise ChronoError("--temp and --rh must be given together")
        corrected = correct(tr.currents, EnvironmentReading(args.temp, args.rh), coeffs)
    elif rec.has_env:
        corrected = correct_series(tr.currents, rec.temp_c, rec.rh_pct, coeffs)
    else:
        raise ChronoError("no environment readings: file has no temp_c/rh_pct columns "
                          "and --temp/--rh were not given")
    _emit(format_transient_csv(tr.with_currents(corrected)), args.out)
    return 0


def cmd_fit(args) -> int:
    tr = load_transient(args.input, args.rate)
    baseline = load_transient(args.baseline, args.rate) if args.baseline else None
    pulse = truncate(tr, args.window) if args.window else tr
    report = fit_pulse(pulse, baseline, Basis.parse(args.basis))
    for key, value in report.as_dict().items():
        print(f"{key}={fmt(value) if isinstance(value, float) else value}")
    return 0


def cmd_infer(args) -> int:
    tr = load_transient(args.input, args.rate)
    pulse = truncate(tr, args.window) if args.window else tr
    report = fit_pulse(pulse, basis=Basis.TIME)
    inferred = infer_full_sequence(report.model, pulse, args.duration)
    _emit(format_transient_csv(inferred), args.out)
    return 0


def cmd_stats(args) -> int:
    baseline = load_transient(args.baseline, args.rate)
    results = []
    for path in args.inferred:
        inferred = load_transient(path, args.rate)
        delta = abs(inferred.terminal_current - baseline.terminal_current) * NA_PER_A
        results.append(WindowResult(baseline.rate_hz, float("nan"), None, inferred,
                                    r_squared_vs(baseline, inferred), delta))
    stats = variability_stats(results, baseline)
    print(json.dumps({
        "inter_seq_mu_na": stats.inter_seq_mu_na,
        "inter_seq_sigma_na": stats.inter_seq_sigma_na,
        "delta_mu_na": stats.delta_mu_na,
        "delta_sigma_na": stats.delta_sigma_na,
        "avg_r2": stats.avg_r2,
    }, indent=2))
    return 0


def cmd_experiment(args) -> int:
    cfg = load_config(args.config)
    if args.seed is not None:
        cfg = replace(cfg, seed=args.seed)
    if args.basis is not None:
        cfg = replace(cfg, basis=Basis.parse(args.basis))
    from .harness import run_experiment

    result = run_experiment(cfg)
    for path in write_experiment(result, args.out):
        print(f"wrote {path}")
    for rate in cfg.rates_hz:
        stats, best = result.stats[rate], result.best[rate]
        if stats is None:
            print(f"{rate:g} Hz: no successful windows")
            continue
        print(f"{rate:g} Hz: avg R^2 {stats.avg_r2:.4f}, delta mu {stats.delta_mu_na:.3f} nA, "
              f"best window {best.window_s:g} s")
    for failure in result.failures:
        print(f"cell {failure.rate_hz:g} Hz / {failure.window_s:g} s failed: {failure.error}",
              file=sys.stderr)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="chronoinfer",
        description="Predict full chronoamperometric transients from short pulses.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, metavar="COMMAND")

    p = sub.add_parser("simulate", help="write a synthetic Cottrell transient CSV")
    p.add_argument("--duration", type=float, default=6.0)
    p.add_argument("--rate", type=float, default=100.0)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--sigma", type=float, default=0.0, help="noise std in amperes")
    p.add_argument("--n-e", type=int, default=1)
    p.add_argument("--conc", type=float, default=1e-9, help="mol/cm^3")
    p.add_argument("--diff", type=float, default=1e-6, help="cm^2/s")
    p.add_argument("--area", type=float, default=2.25, help="cm^2")
    p.add_argument("--faraday", type=float, default=96485.0)
    p.add_argument("--out", default="-")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("correct", help="apply temperature/humidity correction to a CSV")
    p.add_argument("input")
    p.add_argument("--temp", type=float, help="ambient temperature, degC")
    p.add_argument("--rh", type=float, help="relative humidity, %%RH")
    p.add_argument("--parse", choices=("exponent", "product"))
    p.add_argument("--config", help="config file supplying coeff.* overrides")
    p.add_argument("--rate", type=float)
    p.add_argument("--out", default="-")
    p.set_defaults(func=cmd_correct)

    p = sub.add_parser("fit", help="fit the inverse model to a transient CSV")
    p.add_argument("input")
    p.add_argument("--window", type=float, help="only use samples up to this time")
    p.add_argument("--basis", choices=("time", "value"), default="time")
    p.add_argument("--baseline", help="baseline CSV (required for --basis value)")
    p.add_argument("--rate", type=float)
    p.set_defaults(func=cmd_fit)

    p = sub.add_parser("infer", help="extend a pulse CSV to a full-length transient")
    p.add_argument("input")
    p.add_argument("--duration", type=float, default=6.0)
    p.add_argument("--window", type=float)
    p.add_argument("--rate", type=float)
    p.add_argument("--out", default="-")
    p.set_defaults(func=cmd_infer)

    p = sub.add_parser("stats", help="variability statistics of inferred CSVs vs a baseline")
    p.add_argument("inferred", nargs="+")
    p.add_argument("--baseline", required=True)
    p.add_argument("--rate", type=float)
    p.set_defaults(func=cmd_stats)

    p = sub.add_parser("experiment", help="run the full window x rate grid")
    p.add_argument("--config", default="default", help="config file, or 'default'")
    p.add_argument("--seed", type=int)
    p.add_argument("--basis", choices=("time", "value"))
    p.add_argument("--out", default=".", help="output directory")
    p.set_defaults(func=cmd_experiment)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ChronoError, OSError) as exc:
        print(f"chronoinfer {args.command}: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
