"""Temperature dependence of the photon-pair central frequencies.

The source emits a pair whose central frequencies sit symmetrically about the
degenerate frequency: signal at omega0 + delta(T), idler at omega0 - delta(T).
The detuning delta(T) vanishes at the degenerate temperature and is supplied
either as a polynomial in (T - T0) with no constant term or as a tabulated
curve. Real crystals realize this through phase matching; here the curve is a
configurable model because the artifact targets the spectroscopy, not a
specific crystal cut.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass

import numpy as np

from .core import DomainError

__all__ = [
    "TuningModel",
    "CentralFrequencies",
    "delta_at",
    "central_frequencies",
    "tuning_curve",
    "load_tuning_table_csv",
]

#: Tolerance for the "detuning vanishes at the degenerate temperature" check.
_ZERO_TOL = 1e-9


@dataclass(frozen=True)
class TuningModel:
    """Detuning-vs-temperature model.

    kind "linear"/"polynomial": delta(T) = sum_k c_k (T - T0)^k with k >= 1,
    coefficients in rad/ps per degC^k. kind "tabulated": strictly increasing
    temperature samples with piecewise-linear interpolation and no
    extrapolation. In every case delta(T0) = 0.
    """

    kind: str = "linear"
    degenerate_temperature: float = 25.0
    coefficients: tuple[float, ...] = (2.0,)
    table_temperatures: tuple[float, ...] = ()
    table_deltas: tuple[float, ...] = ()

    def __post_init__(self) -> None:
        if self.kind not in ("linear", "polynomial", "tabulated"):
            raise DomainError(f"unknown tuning model kind {self.kind!r}")
        if not math.isfinite(self.degenerate_temperature):
            raise DomainError("degenerate temperature must be finite")
        if self.kind == "tabulated":
            t = np.asarray(self.table_temperatures, dtype=float)
            d = np.asarray(self.table_deltas, dtype=float)
            if t.size < 2 or t.size != d.size:
                raise DomainError("tabulated model needs >= 2 (temperature, delta) pairs")
            if not np.all(np.diff(t) > 0):
                raise DomainError("tabulated temperatures must be strictly increasing")
            if not (t[0] <= self.degenerate_temperature <= t[-1]):
                raise DomainError("tabulated model must bracket the degenerate temperature")
            at_t0 = float(np.interp(self.degenerate_temperature, t, d))
            if abs(at_t0) > _ZERO_TOL:
                raise DomainError(
                    f"tabulated detuning is {at_t0} rad/ps at the degenerate "
                    f"temperature; it must pass through zero within {_ZERO_TOL}"
                )
        else:
            if len(self.coefficients) == 0:
                raise DomainError("polynomial tuning needs at least one coefficient")
            if self.kind == "linear" and len(self.coefficients) != 1:
                raise DomainError("linear tuning takes exactly one coefficient")
            if not all(math.isfinite(c) for c in self.coefficients):
                raise DomainError("tuning coefficients must be finite")

    @property
    def domain(self) -> tuple[float, float]:
        """Temperature range the model is considered valid on.

        Tabulated models are valid on their table span. Parametric models are
        formally unbounded; a +-50 degC window about the degenerate
        temperature is used as the working default.
        """
        if self.kind == "tabulated":
            return (self.table_temperatures[0], self.table_temperatures[-1])
        t0 = self.degenerate_temperature
        return (t0 - 50.0, t0 + 50.0)

    def derivative_at(self, temperature: float) -> float:
        """d(delta)/dT in rad/ps per degC at the given temperature."""
        if self.kind == "tabulated":
            t = np.asarray(self.table_temperatures, dtype=float)
            d = np.asarray(self.table_deltas, dtype=float)
            self._check_range(temperature)
            i = int(np.clip(np.searchsorted(t, temperature) - 1, 0, t.size - 2))
            return float((d[i + 1] - d[i]) / (t[i + 1] - t[i]))
        dt = temperature - self.degenerate_temperature
        return float(
            sum((k + 1) * c * dt**k for k, c in enumerate(self.coefficients))
        )

    def _check_range(self, temperature) -> None:
        lo, hi = self.table_temperatures[0], self.table_temperatures[-1]
        temps = np.asarray(temperature, dtype=float)
        if np.any(temps < lo) or np.any(temps > hi):
            raise DomainError(
                f"temperature {temperature} outside the tabulated range "
                f"[{lo}, {hi}]; extrapolation is refused"
            )


@dataclass(frozen=True)
class CentralFrequencies:
    """Signal/idler central frequencies at one temperature.

    Stored as (degenerate frequency, detuning) so that the symmetric-detuning
    identity signal + idler = 2 * degenerate holds by construction.
    """

    degenerate: float
    detuning: float

    @property
    def signal(self) -> float:
        return self.degenerate + self.detuning

    @property
    def idler(self) -> float:
        return self.degenerate - self.detuning

    @property
    def total(self) -> float:
        return 2.0 * self.degenerate


def delta_at(model: TuningModel, temperature):
    """Detuning delta(T) in rad/ps. Accepts a scalar or an array of T."""
    temps = np.asarray(temperature, dtype=float)
    if model.kind == "tabulated":
        model._check_range(temps)
        out = np.interp(temps, model.table_temperatures, model.table_deltas)
    else:
        dt = temps - model.degenerate_temperature
        out = np.zeros_like(dt)
        for k, c in enumerate(model.coefficients):
            out = out + c * dt ** (k + 1)
    return out if out.ndim else float(out)


def central_frequencies(model: TuningModel, omega0: float, temperature: float) -> CentralFrequencies:
    """Central frequencies (omega0 + delta, omega0 - delta) at one temperature."""
    if not omega0 > 0:
        raise DomainError("degenerate frequency must be positive")
    return CentralFrequencies(degenerate=omega0, detuning=delta_at(model, temperature))


def tuning_curve(
    model: TuningModel,
    omega0: float,
    temperature_range: tuple[float, float] | None = None,
    n_points: int = 101,
) -> np.ndarray:
    """Sampled tuning curve as an (n, 3) array: T, signal nm, idler nm."""
    if n_points < 2:
        raise DomainError("tuning curve needs at least two samples")
    lo, hi = temperature_range if temperature_range is not None else model.domain
    temps = np.linspace(lo, hi, n_points)
    deltas = np.asarray(delta_at(model, temps), dtype=float)
    from .core import omega_to_wavelength

    lam_s = np.array([omega_to_wavelength(omega0 + d) for d in deltas])
    lam_i = np.array([omega_to_wavelength(omega0 - d) for d in deltas])
    return np.column_stack([temps, lam_s, lam_i])


def load_tuning_table_csv(path) -> TuningModel:
    """Load a tabulated model from a two-column CSV (temperature_C, delta_rad_per_ps).

    A header row is required; the degenerate temperature is taken from the
    table's zero crossing.
    """
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    if not rows:
        raise DomainError(f"tuning table {path} is empty")
    header = rows[0]
    try:
        float(header[0])
    except (ValueError, IndexError):
        pass  # non-numeric first row: the required header
    else:
        raise DomainError(f"tuning table {path} must start with a header row")
    temps, deltas = [], []
    for i, row in enumerate(rows[1:], start=2):
        if not row:
            continue
        if len(row) < 2:
            raise DomainError(f"tuning table {path} line {i}: expected two columns")
        try:
            temps.append(float(row[0]))
            deltas.append(float(row[1]))
        except ValueError as exc:
            raise DomainError(f"tuning table {path} line {i}: {exc}") from None
    t = np.asarray(temps)
    d = np.asarray(deltas)
    if t.size < 2:
        raise DomainError(f"tuning table {path} needs at least two data rows")
    if not np.all(np.diff(t) > 0):
        raise DomainError(f"tuning table {path}: temperatures must be strictly increasing")
    sign_change = np.nonzero(np.diff(np.signbit(d)))[0]
    if d[0] == 0.0:
        t0 = float(t[0])
    elif sign_change.size == 0 and not np.any(d == 0.0):
        raise DomainError(f"tuning table {path} must bracket a zero crossing of the detuning")
    else:
        zero_idx = np.nonzero(d == 0.0)[0]
        if zero_idx.size:
            t0 = float(t[zero_idx[0]])
        else:
            i = int(sign_change[0])
            t0 = float(t[i] - d[i] * (t[i + 1] - t[i]) / (d[i + 1] - d[i]))
    return TuningModel(
        kind="tabulated",
        degenerate_temperature=t0,
        coefficients=(),
        table_temperatures=tuple(float(x) for x in t),
        table_deltas=tuple(float(x) for x in d),
    )
