"""Run configuration: a versioned JSON document validated into package objects.

One format, exhaustive validation: unknown keys are rejected with the
offending key named, defaults are filled in, and the fully resolved document
is echoed into every output's metadata together with its SHA-256 digest so
results stay traceable to the exact configuration that produced them.
"""

from __future__ import annotations

import hashlib
import json
import math
import os
from dataclasses import dataclass, field

from .core import LevelSystem, wavelength_to_omega
from .source import SourceConfig, entanglement_time
from .tuning import TuningModel, load_tuning_table_csv
from .tpa import RESONANCE_TOL

__all__ = ["ConfigError", "RunConfig", "load_config", "config_digest"]

CONFIG_VERSION = 1


class ConfigError(ValueError):
    """A configuration document is malformed or inconsistent."""


def _require_keys(section: dict, allowed: set, where: str) -> None:
    for key in section:
        if key not in allowed:
            raise ConfigError(f"unknown key {key!r} in {where}")


def _get_number(section: dict, key: str, where: str, default=None, required=False):
    if key not in section:
        if required:
            raise ConfigError(f"missing key {key!r} in {where}")
        return default
    value = section[key]
    if not isinstance(value, (int, float)) or isinstance(value, bool) or not math.isfinite(value):
        raise ConfigError(f"key {key!r} in {where} must be a finite number")
    return float(value)


def _parse_dipole(value, where: str) -> complex:
    if isinstance(value, (int, float)) and not isinstance(value, bool):
        return complex(value)
    if isinstance(value, (list, tuple)) and len(value) == 2 and all(
        isinstance(x, (int, float)) and not isinstance(x, bool) for x in value
    ):
        return complex(value[0], value[1])
    raise ConfigError(f"dipoles in {where} must be numbers or [re, im] pairs")


@dataclass(frozen=True)
class RunConfig:
    """Validated run parameters plus the resolved document they came from."""

    levels: LevelSystem
    source: SourceConfig
    tau_range: tuple[float, float]
    n_tau: int
    temp_range: tuple[float, float]
    n_temp: int
    window: str
    peak_threshold: float
    gate_bins: float
    straight_slope_fraction: float
    min_span_fraction: float
    pair_gate_bins: float
    output_directory: str
    formats: tuple[str, ...]
    resolved: dict = field(repr=False)

    @property
    def digest(self) -> str:
        return config_digest(self.resolved)


def config_digest(resolved: dict) -> str:
    blob = json.dumps(resolved, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(blob.encode()).hexdigest()


def _parse_levels(doc: dict, pump_frequency: float) -> tuple[LevelSystem, dict]:
    where = "levels"
    section = doc.get("levels")
    if not isinstance(section, dict):
        raise ConfigError("missing or malformed 'levels' section")
    _require_keys(
        section,
        {
            "intermediate_wavelengths_nm",
            "intermediate_energies_rad_per_ps",
            "dipoles",
            "final_wavelength_nm",
            "final_energy_rad_per_ps",
        },
        where,
    )
    lam_list = section.get("intermediate_wavelengths_nm")
    en_list = section.get("intermediate_energies_rad_per_ps")
    if (lam_list is None) == (en_list is None):
        raise ConfigError(
            "levels: exactly one of 'intermediate_wavelengths_nm' or "
            "'intermediate_energies_rad_per_ps' is required"
        )
    if lam_list is not None:
        if not isinstance(lam_list, list) or not lam_list:
            raise ConfigError("levels: 'intermediate_wavelengths_nm' must be a non-empty list")
        energies = [wavelength_to_omega(float(x)) for x in lam_list]
    else:
        if not isinstance(en_list, list) or not en_list:
            raise ConfigError("levels: 'intermediate_energies_rad_per_ps' must be a non-empty list")
        energies = [float(x) for x in en_list]
    dip_raw = section.get("dipoles")
    if dip_raw is None:
        dipoles = [complex(1.0)] * len(energies)
    else:
        if not isinstance(dip_raw, list) or len(dip_raw) != len(energies):
            raise ConfigError("levels: 'dipoles' must list one entry per intermediate level")
        dipoles = [_parse_dipole(v, where) for v in dip_raw]
    if "final_wavelength_nm" in section and "final_energy_rad_per_ps" in section:
        raise ConfigError("levels: give only one of 'final_wavelength_nm' / 'final_energy_rad_per_ps'")
    if "final_wavelength_nm" in section:
        final = wavelength_to_omega(_get_number(section, "final_wavelength_nm", where, required=True))
    elif "final_energy_rad_per_ps" in section:
        final = _get_number(section, "final_energy_rad_per_ps", where, required=True)
    else:
        final = pump_frequency
    from .core import IntermediateLevel

    system = LevelSystem(
        intermediate=tuple(IntermediateLevel(e, d) for e, d in zip(energies, dipoles)),
        final_energy=final,
    )
    echo = {
        "intermediate_energies_rad_per_ps": energies,
        "dipoles": [[d.real, d.imag] for d in dipoles],
        "final_energy_rad_per_ps": final,
    }
    return system, echo


def _parse_tuning(doc: dict, base_dir: str) -> tuple[TuningModel, dict]:
    section = doc.get("tuning", {})
    if not isinstance(section, dict):
        raise ConfigError("malformed 'tuning' section")
    _require_keys(
        section,
        {"kind", "degenerate_temperature_c", "coefficients_rad_per_ps_per_c", "table_csv", "table"},
        "tuning",
    )
    kind = section.get("kind", "linear")
    if kind in ("linear", "polynomial"):
        t0 = _get_number(section, "degenerate_temperature_c", "tuning", default=25.0)
        coeffs = section.get("coefficients_rad_per_ps_per_c", [2.0])
        if not isinstance(coeffs, list) or not all(
            isinstance(c, (int, float)) and not isinstance(c, bool) for c in coeffs
        ):
            raise ConfigError("tuning: 'coefficients_rad_per_ps_per_c' must be a list of numbers")
        try:
            model = TuningModel(kind=kind, degenerate_temperature=t0, coefficients=tuple(float(c) for c in coeffs))
        except ValueError as exc:
            raise ConfigError(f"tuning: {exc}") from None
    elif kind == "tabulated":
        has_csv = "table_csv" in section
        has_inline = "table" in section
        if has_csv == has_inline:
            raise ConfigError("tuning: tabulated models need exactly one of 'table_csv' or 'table'")
        try:
            if has_csv:
                path = section["table_csv"]
                if not os.path.isabs(path):
                    path = os.path.join(base_dir, path)
                model = load_tuning_table_csv(path)
            else:
                rows = section["table"]
                if (
                    not isinstance(rows, list)
                    or len(rows) < 2
                    or not all(isinstance(r, list) and len(r) == 2 for r in rows)
                ):
                    raise ConfigError("tuning: 'table' must be a list of [temperature_c, delta_rad_per_ps] pairs")
                temps = [float(r[0]) for r in rows]
                deltas = [float(r[1]) for r in rows]
                import numpy as np

                t = np.asarray(temps)
                d = np.asarray(deltas)
                zero_idx = np.nonzero(d == 0.0)[0]
                sign_change = np.nonzero(np.diff(np.signbit(d)))[0]
                if zero_idx.size:
                    t0 = float(t[zero_idx[0]])
                elif sign_change.size:
                    i = int(sign_change[0])
                    t0 = float(t[i] - d[i] * (t[i + 1] - t[i]) / (d[i + 1] - d[i]))
                else:
                    raise ConfigError("tuning: inline table must bracket a zero crossing of the detuning")
                model = TuningModel(
                    kind="tabulated",
                    degenerate_temperature=t0,
                    coefficients=(),
                    table_temperatures=tuple(temps),
                    table_deltas=tuple(deltas),
                )
        except ConfigError:
            raise
        except ValueError as exc:
            raise ConfigError(f"tuning: malformed tuning table: {exc}") from None
    else:
        raise ConfigError(f"tuning: unknown kind {kind!r}")
    echo = {
        "kind": model.kind,
        "degenerate_temperature_c": model.degenerate_temperature,
        "coefficients_rad_per_ps_per_c": list(model.coefficients),
        "table": [list(pair) for pair in zip(model.table_temperatures, model.table_deltas)],
    }
    return model, echo


def _parse_source(doc: dict, tuning: TuningModel) -> tuple[SourceConfig, dict]:
    section = doc.get("source", {})
    if not isinstance(section, dict):
        raise ConfigError("malformed 'source' section")
    _require_keys(
        section,
        {
            "pump_wavelength_nm",
            "entanglement_time_ps",
            "group_delay",
            "pump_duration_ps",
            "degenerate_wavelength_nm",
        },
        "source",
    )
    pump = _get_number(section, "pump_wavelength_nm", "source", default=405.0)
    te = _get_number(section, "entanglement_time_ps", "source")
    gd = section.get("group_delay")
    if (te is None) and (gd is None):
        raise ConfigError("source: give 'entanglement_time_ps' or 'group_delay'")
    if (te is not None) and (gd is not None):
        raise ConfigError("source: give only one of 'entanglement_time_ps' / 'group_delay'")
    if gd is not None:
        if not isinstance(gd, dict):
            raise ConfigError("source: 'group_delay' must be an object")
        _require_keys(
            gd,
            {
                "inverse_group_velocity_signal_ps_per_mm",
                "inverse_group_velocity_idler_ps_per_mm",
                "crystal_length_mm",
            },
            "source.group_delay",
        )
        ns = _get_number(gd, "inverse_group_velocity_signal_ps_per_mm", "source.group_delay", required=True)
        ni = _get_number(gd, "inverse_group_velocity_idler_ps_per_mm", "source.group_delay", required=True)
        length = _get_number(gd, "crystal_length_mm", "source.group_delay", required=True)
        try:
            te = entanglement_time(ns, ni, length)
        except ValueError as exc:
            raise ConfigError(f"source.group_delay: {exc}") from None
    tp = None
    if "pump_duration_ps" in section and section["pump_duration_ps"] is not None:
        tp = _get_number(section, "pump_duration_ps", "source", required=True)
    degenerate = None
    if "degenerate_wavelength_nm" in section:
        degenerate = wavelength_to_omega(_get_number(section, "degenerate_wavelength_nm", "source", required=True))
    try:
        source = SourceConfig(
            pump_wavelength=pump,
            entanglement_time=te,
            pump_duration=tp,
            tuning=tuning,
            degenerate_frequency=degenerate,
        )
    except ValueError as exc:
        raise ConfigError(f"source: {exc}") from None
    echo = {
        "pump_wavelength_nm": pump,
        "entanglement_time_ps": te,
        "pump_duration_ps": tp,
        "degenerate_frequency_rad_per_ps": source.omega0,
    }
    return source, echo


def load_config(path) -> RunConfig:
    """Load, validate and resolve a JSON run configuration."""
    try:
        with open(path) as fh:
            doc = json.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from None
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config {path} is not valid JSON: {exc}") from None
    if not isinstance(doc, dict):
        raise ConfigError("config document must be a JSON object")
    _require_keys(doc, {"version", "levels", "source", "tuning", "grid", "analysis", "output"}, "config")
    version = doc.get("version", CONFIG_VERSION)
    if version != CONFIG_VERSION:
        raise ConfigError(f"unsupported config version {version!r}; this build reads version {CONFIG_VERSION}")

    base_dir = os.path.dirname(os.path.abspath(path))
    tuning, tuning_echo = _parse_tuning(doc, base_dir)
    source, source_echo = _parse_source(doc, tuning)
    levels, levels_echo = _parse_levels(doc, source.pump_frequency)

    if source.is_cw and abs(levels.final_energy - source.pump_frequency) > RESONANCE_TOL:
        raise ConfigError(
            f"non-resonant configuration: final level {levels.final_energy} rad/ps "
            f"differs from the pump frequency {source.pump_frequency} rad/ps; a CW "
            "pump drives the two-photon transition only at exact resonance"
        )
    if abs(levels.final_energy - 2.0 * source.omega0) > RESONANCE_TOL:
        raise ConfigError(
            f"non-resonant configuration: final level {levels.final_energy} rad/ps "
            f"differs from the pair sum frequency {2.0 * source.omega0} rad/ps"
        )

    grid = doc.get("grid", {})
    if not isinstance(grid, dict):
        raise ConfigError("malformed 'grid' section")
    _require_keys(grid, {"tau_min_ps", "tau_max_ps", "n_tau", "temp_min_c", "temp_max_c", "n_temp"}, "grid")
    te = source.entanglement_time
    tau_min = _get_number(grid, "tau_min_ps", "grid", default=-2.0 * te)
    tau_max = _get_number(grid, "tau_max_ps", "grid", default=2.0 * te)
    n_tau = grid.get("n_tau", 4096)
    dom = tuning.domain
    temp_min = _get_number(grid, "temp_min_c", "grid", default=dom[0])
    temp_max = _get_number(grid, "temp_max_c", "grid", default=dom[1])
    n_temp = grid.get("n_temp", 101)
    if not (isinstance(n_tau, int) and not isinstance(n_tau, bool) and n_tau >= 2):
        raise ConfigError("grid: 'n_tau' must be an integer >= 2")
    if not (isinstance(n_temp, int) and not isinstance(n_temp, bool) and n_temp >= 2):
        raise ConfigError("grid: 'n_temp' must be an integer >= 2")
    if not tau_min < tau_max:
        raise ConfigError("grid: 'tau_min_ps' must be below 'tau_max_ps'")
    if not temp_min < temp_max:
        raise ConfigError("grid: 'temp_min_c' must be below 'temp_max_c'")
    if tuning.kind == "tabulated":
        lo, hi = tuning.domain
        if temp_min < lo or temp_max > hi:
            raise ConfigError(
                f"grid: temperature range [{temp_min}, {temp_max}] leaves the "
                f"tabulated tuning range [{lo}, {hi}]; extrapolation is refused"
            )

    analysis = doc.get("analysis", {})
    if not isinstance(analysis, dict):
        raise ConfigError("malformed 'analysis' section")
    _require_keys(
        analysis,
        {"window", "peak_threshold", "gate_bins", "straight_slope_fraction", "min_span_fraction", "pair_gate_bins"},
        "analysis",
    )
    window = analysis.get("window", "hann")
    if window not in ("hann", "none"):
        raise ConfigError(f"analysis: unknown window {window!r}; expected 'hann' or 'none'")
    threshold = _get_number(analysis, "peak_threshold", "analysis", default=0.05)
    if not 0.0 < threshold < 1.0:
        raise ConfigError("analysis: 'peak_threshold' must lie strictly between 0 and 1")
    gate_bins = _get_number(analysis, "gate_bins", "analysis", default=3.0)
    straight_frac = _get_number(analysis, "straight_slope_fraction", "analysis", default=0.2)
    min_span = _get_number(analysis, "min_span_fraction", "analysis", default=0.6)
    pair_gate = _get_number(analysis, "pair_gate_bins", "analysis", default=4.0)

    output = doc.get("output", {})
    if not isinstance(output, dict):
        raise ConfigError("malformed 'output' section")
    _require_keys(output, {"directory", "formats"}, "output")
    out_dir = output.get("directory", "etpa-out")
    formats = output.get("formats", ["csv"])
    if not isinstance(formats, list) or not formats:
        raise ConfigError("output: 'formats' must be a non-empty list")
    for fmt in formats:
        if fmt not in ("csv", "bin", "pgm", "png"):
            raise ConfigError(f"output: unknown format {fmt!r}; expected csv, bin, pgm or png")

    resolved = {
        "version": CONFIG_VERSION,
        "levels": levels_echo,
        "source": source_echo,
        "tuning": tuning_echo,
        "grid": {
            "tau_min_ps": tau_min,
            "tau_max_ps": tau_max,
            "n_tau": n_tau,
            "temp_min_c": temp_min,
            "temp_max_c": temp_max,
            "n_temp": n_temp,
        },
        "analysis": {
            "window": window,
            "peak_threshold": threshold,
            "gate_bins": gate_bins,
            "straight_slope_fraction": straight_frac,
            "min_span_fraction": min_span,
            "pair_gate_bins": pair_gate,
        },
        "output": {"directory": out_dir, "formats": list(formats)},
    }
    return RunConfig(
        levels=levels,
        source=source,
        tau_range=(tau_min, tau_max),
        n_tau=n_tau,
        temp_range=(temp_min, temp_max),
        n_temp=n_temp,
        window=window,
        peak_threshold=threshold,
        gate_bins=gate_bins,
        straight_slope_fraction=straight_frac,
        min_span_fraction=min_span,
        pair_gate_bins=pair_gate,
        output_directory=out_dir,
        formats=tuple(formats),
        resolved=resolved,
    )
