"""Command-line surface tying the pipeline together.

Subcommands: simulate, fft, peaks, reconstruct, jsa, tuning-curve, verify.
Exit codes: 0 success, 1 validation/configuration error, 2
numerical-consistency failure. Diagnostics go to stderr; data only ever goes
to files under the output directory.
"""

from __future__ import annotations

import argparse
import os
import sys

import numpy as np

from . import analysis, gridio, oracle, source, tpa
from .config import ConfigError, RunConfig, load_config
from .core import DomainError, ResonanceError

EXIT_OK = 0
EXIT_VALIDATION = 1
EXIT_NUMERICAL = 2


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="etpa",
        description="Simulate temperature-tuned entangled-pair absorption and recover level structure",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--config", required=True, help="JSON run configuration")
        p.add_argument("--out", default=None, help="output directory (default: from config)")
        p.add_argument(
            "--formats",
            default=None,
            help="comma-separated list of grid formats: csv,bin,pgm,png (default: from config)",
        )
        p.add_argument(
            "--threads",
            type=int,
            default=None,
            help="worker threads for grid rows; 0 = auto (env ETPA_THREADS as fallback)",
        )
        return p

    common(sub.add_parser("simulate", help="compute the signal grid"))
    p = common(sub.add_parser("fft", help="Fourier-transform a simulated grid along the delay"))
    p.add_argument("--window", choices=["hann", "none"], default=None)
    p = common(sub.add_parser("peaks", help="detect per-temperature spectral peaks"))
    p.add_argument("--threshold", type=float, default=None, help="peak threshold as a fraction of row max")
    p = common(sub.add_parser("reconstruct", help="track lines and reconstruct intermediate levels"))
    p.add_argument("--window", choices=["hann", "none"], default=None)
    p.add_argument("--threshold", type=float, default=None)
    p = common(sub.add_parser("jsa", help="export the pulse-pumped joint spectrum"))
    p.add_argument("--temperature", type=float, default=None, help="crystal temperature (default: degenerate)")
    common(sub.add_parser("tuning-curve", help="export the two-branch tuning curve"))
    p = common(sub.add_parser("verify", help="certify the closed form against the time-domain quadrature"))
    p.add_argument("--tolerance", type=float, default=1e-3)
    return parser


def _resolve_threads(value: int | None) -> int:
    if value is None:
        env = os.environ.get("ETPA_THREADS")
        if env is not None:
            try:
                value = int(env)
            except ValueError:
                raise ConfigError(f"ETPA_THREADS must be an integer, got {env!r}") from None
    if value is None:
        return 1
    if value == 0:
        return os.cpu_count() or 1
    if value < 0:
        raise ConfigError("--threads must be >= 0")
    return value


def _out_dir(args, cfg: RunConfig) -> str:
    out = args.out if args.out is not None else cfg.output_directory
    os.makedirs(out, exist_ok=True)
    return out


def _formats(args, cfg: RunConfig) -> tuple[str, ...]:
    if args.formats is None:
        return cfg.formats
    formats = tuple(f.strip() for f in args.formats.split(",") if f.strip())
    for fmt in formats:
        if fmt not in ("csv", "bin", "pgm", "png"):
            raise ConfigError(f"unknown format {fmt!r} in --formats")
    if not formats:
        raise ConfigError("--formats must name at least one format")
    return formats


def _spectrum_from_out(out: str) -> analysis.SpectrumMap:
    path = os.path.join(out, "spectrum_map.csv")
    if not os.path.exists(path):
        raise ConfigError(f"no spectrum map at {path}; run the fft subcommand first")
    return gridio.load_spectrum_map(path)


def _cmd_simulate(args, cfg: RunConfig) -> int:
    out = _out_dir(args, cfg)
    workers = _resolve_threads(args.threads)
    grid = tpa.tpa_grid(
        cfg.levels,
        cfg.source,
        tau_range=cfg.tau_range,
        n_tau=cfg.n_tau,
        temp_range=cfg.temp_range,
        n_temp=cfg.n_temp,
        workers=workers,
    )
    written = gridio.save_grid(grid, os.path.join(out, "signal_grid"), _formats(args, cfg), cfg.digest)
    print("\n".join(written))
    return EXIT_OK


def _cmd_fft(args, cfg: RunConfig) -> int:
    out = _out_dir(args, cfg)
    path = os.path.join(out, "signal_grid.csv")
    if not os.path.exists(path):
        raise ConfigError(f"no signal grid at {path}; run the simulate subcommand first")
    grid = gridio.load_grid(path)
    window = args.window if args.window is not None else cfg.window
    spectrum = analysis.delay_spectrum(grid, window=window)
    written = gridio.save_spectrum_map(spectrum, os.path.join(out, "spectrum_map"), _formats(args, cfg), cfg.digest)
    print("\n".join(written))
    return EXIT_OK


def _peaks_report(cfg: RunConfig, peaks: analysis.RowPeaks, threshold: float) -> tuple[dict, str]:
    rows = [
        {
            "temperature_c": float(t),
            "peaks": [{"frequency_rad_per_ps": f, "magnitude": m} for f, m in row],
        }
        for t, row in zip(peaks.temp_axis, peaks.rows)
    ]
    report = {
        "config_digest": cfg.digest,
        "threshold": threshold,
        "bin_width_rad_per_ps": peaks.bin_width,
        "rows": rows,
    }
    lines = [f"spectral peaks (threshold {threshold:g} of row max, bin width {peaks.bin_width:.6g} rad/ps)"]
    for row in rows:
        peaks_str = "  ".join(f"{p['frequency_rad_per_ps']:9.3f}" for p in row["peaks"]) or "-"
        lines.append(f"T = {row['temperature_c']:9.3f} C : {peaks_str}")
    return report, "\n".join(lines)


def _cmd_peaks(args, cfg: RunConfig) -> int:
    out = _out_dir(args, cfg)
    spectrum = _spectrum_from_out(out)
    threshold = args.threshold if args.threshold is not None else cfg.peak_threshold
    peaks = analysis.detect_peaks(spectrum, threshold=threshold)
    report, text = _peaks_report(cfg, peaks, threshold)
    written = gridio.write_report(report, os.path.join(out, "peaks"), text)
    print("\n".join(written))
    return EXIT_OK


def _cmd_reconstruct(args, cfg: RunConfig) -> int:
    out = _out_dir(args, cfg)
    spectrum = _spectrum_from_out(out)
    threshold = args.threshold if args.threshold is not None else cfg.peak_threshold
    peaks = analysis.detect_peaks(spectrum, threshold=threshold)
    lines = analysis.track_lines(
        peaks,
        cfg.source.tuning,
        gate_bins=cfg.gate_bins,
        straight_slope_fraction=cfg.straight_slope_fraction,
        min_span_fraction=cfg.min_span_fraction,
    )
    levels = analysis.reconstruct_levels(lines, cfg.source.omega0, pair_gate_bins=cfg.pair_gate_bins)
    report = {
        "config_digest": cfg.digest,
        "degenerate_frequency_rad_per_ps": cfg.source.omega0,
        "levels": [
            {
                "offset_frequency_rad_per_ps": lev.offset_frequency,
                "energy_rad_per_ps": lev.energy,
                "wavelength_nm": lev.wavelength_nm,
                "uncertainty_rad_per_ps": lev.uncertainty,
            }
            for lev in levels.levels
        ],
        "combined_lines_rad_per_ps": list(levels.combined_lines),
        "warnings": list(levels.warnings),
        "trajectories": [
            {
                "classification": tr.classification,
                "slope_rad_per_ps_per_c": tr.slope,
                "intercept_rad_per_ps": tr.intercept,
                "span_rows": tr.span,
            }
            for tr in lines.trajectories
        ],
    }
    text_lines = ["reconstructed intermediate levels:"]
    for lev in levels.levels:
        text_lines.append(
            f"  {lev.wavelength_nm:9.3f} nm   energy {lev.energy:10.3f} rad/ps   "
            f"offset {lev.offset_frequency:+9.3f} rad/ps   +- {lev.uncertainty:.3f}"
        )
    text_lines.append("combination lines (rad/ps): " + (
        "  ".join(f"{v:9.3f}" for v in levels.combined_lines) or "-"))
    for warning in levels.warnings:
        text_lines.append("warning: " + warning)
    written = gridio.write_report(report, os.path.join(out, "reconstruction"), "\n".join(text_lines))
    print("\n".join(written))
    return EXIT_OK


def _cmd_jsa(args, cfg: RunConfig) -> int:
    out = _out_dir(args, cfg)
    if cfg.source.is_cw:
        raise ConfigError(
            "the jsa subcommand needs a pulsed pump ('pump_duration_ps'); a CW "
            "pair's joint spectrum is a line along the anti-diagonal"
        )
    temp = args.temperature if args.temperature is not None else cfg.source.tuning.degenerate_temperature
    s_ax, i_ax = source.display_axes(cfg.source, temp)
    js = source.joint_spectrum(cfg.source, temp, s_ax, i_ax)
    base = os.path.join(out, "jsa")
    written = []
    for fmt in _formats(args, cfg):
        path = f"{base}.{fmt}"
        if fmt == "csv":
            gridio.save_matrix_csv(path, js.values, js.signal_axis, js.idler_axis, corner="omega_s\\omega_i")
        elif fmt == "bin":
            gridio._save_binary(path, js.values)
        elif fmt == "pgm":
            gridio._save_pgm(path, js.values)
        elif fmt == "png":
            gridio._save_png(path, js.values)
        written.append(path)
    meta = {
        "kind": "joint_spectrum",
        "temperature_c": temp,
        "pump_duration_ps": cfg.source.pump_duration,
        "entanglement_time_ps": cfg.source.entanglement_time,
        "regime": source.correlation_regime(cfg.source.pump_duration, cfg.source.entanglement_time),
        "config_digest": cfg.digest,
    }
    gridio._write_meta(base, meta)
    written.append(gridio._meta_path(base))
    print("\n".join(written))
    return EXIT_OK


def _cmd_tuning_curve(args, cfg: RunConfig) -> int:
    out = _out_dir(args, cfg)
    from .tuning import tuning_curve

    curve = tuning_curve(cfg.source.tuning, cfg.source.omega0, cfg.temp_range, cfg.n_temp)
    path = os.path.join(out, "tuning_curve.csv")
    with open(path, "w", newline="") as fh:
        fh.write("temperature_c,signal_wavelength_nm,idler_wavelength_nm\n")
        for temp, lam_s, lam_i in curve:
            fh.write(f"{temp:.17g},{lam_s:.17g},{lam_i:.17g}\n")
    print(path)
    return EXIT_OK


def _cmd_verify(args, cfg: RunConfig) -> int:
    out = _out_dir(args, cfg)
    report = oracle.certify_against_closed_form(cfg.levels, cfg.source, tolerance=args.tolerance)
    report["config_digest"] = cfg.digest
    status = "PASS" if report["passed"] else "FAIL"
    text = (
        f"{status}: time-domain quadrature vs closed form\n"
        f"  fitted scale            : {report['scale']:.9e}\n"
        f"  max relative deviation  : {report['max_relative_deviation']:.3e}"
        f" (tolerance {report['tolerance']:g})\n"
        f"  max deviation/probe max : {report['max_deviation_of_probe_max']:.3e}\n"
        f"  probe grid              : {len(report['temperatures_c'])} temperatures x"
        f" {len(report['delays_ps'])} delays\n"
        f"  elapsed                 : {report['elapsed_s']:.2f} s"
    )
    written = gridio.write_report(report, os.path.join(out, "verify"), text)
    print("\n".join(written))
    print(text)
    return EXIT_OK if report["passed"] else EXIT_NUMERICAL


_COMMANDS = {
    "simulate": _cmd_simulate,
    "fft": _cmd_fft,
    "peaks": _cmd_peaks,
    "reconstruct": _cmd_reconstruct,
    "jsa": _cmd_jsa,
    "tuning-curve": _cmd_tuning_curve,
    "verify": _cmd_verify,
}


def cli_main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = load_config(args.config)
        return _COMMANDS[args.command](args, cfg)
    except (ConfigError, DomainError, ResonanceError, gridio.GridFormatError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except (oracle.ResolutionError, ArithmeticError) as exc:
        print(f"numerical-consistency error: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL


def main() -> None:
    raise SystemExit(cli_main())
