"""Fourier analysis of the signal grid and recovery of the level structure.

Per temperature row, the signal is Fourier transformed along the delay. Peak
trajectories across temperature split into two families: branches whose
position follows the tuning detuning (an X centered on each intermediate
level's offset from the degenerate frequency) and temperature-independent
straight lines at level-pair combination frequencies. Pairing the X branches
and averaging their intercepts at the degenerate temperature recovers the
intermediate levels; adding the degenerate frequency converts the offsets to
absolute energies.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.signal import find_peaks

from .core import DomainError, omega_to_wavelength
from .tpa import SignalGrid
from .tuning import TuningModel

__all__ = [
    "SpectrumMap",
    "RowPeaks",
    "Trajectory",
    "LineSet",
    "ReconstructedLevel",
    "ReconstructedLevels",
    "delay_spectrum",
    "windowed_delay_transform",
    "detect_peaks",
    "track_lines",
    "reconstruct_levels",
]

#: How many bins on each side of DC are zeroed before normalization. A raised
#: cosine window confines a constant row to exactly these bins.
_DC_GUARD = 1


@dataclass(frozen=True)
class SpectrumMap:
    """Fourier magnitudes over (frequency, temperature).

    magnitudes[k, i] is the magnitude at freq_axis[k], temp_axis[i]. The
    frequency axis is the raw transform axis (level offsets from the
    degenerate frequency land here); reporting adds the degenerate frequency
    back at reconstruction time. The axis is symmetric about zero.
    """

    magnitudes: np.ndarray
    freq_axis: np.ndarray
    temp_axis: np.ndarray
    window: str = "hann"

    @property
    def bin_width(self) -> float:
        return float(self.freq_axis[1] - self.freq_axis[0])


def windowed_delay_transform(rows: np.ndarray, tau_axis: np.ndarray, window: str = "hann") -> tuple[np.ndarray, np.ndarray]:
    """Complex delay transform of signal rows with DC suppression.

    Returns (freq_axis, transform) where transform[i, k] is row i's complex
    spectrum at freq_axis[k]. The DC bin and its +-1 neighbors are zeroed; the
    unmatched most-negative bin is dropped so the axis is symmetric. Linear in
    the rows by construction.
    """
    rows = np.atleast_2d(np.asarray(rows, dtype=float))
    tau = np.asarray(tau_axis, dtype=float)
    n = tau.size
    if rows.shape[1] != n:
        raise DomainError("rows and delay axis disagree in length")
    steps = np.diff(tau)
    if not np.allclose(steps, steps[0], rtol=1e-9, atol=0.0):
        raise DomainError("delay axis must be uniformly sampled")
    if window == "hann":
        # periodic form: confines a constant row to exactly the DC +-1 bins
        w = 0.5 - 0.5 * np.cos(2.0 * np.pi * np.arange(n) / n)
    elif window == "none":
        w = np.ones(n)
    else:
        raise DomainError(f"unknown window {window!r}; expected 'hann' or 'none'")
    spec = np.fft.fftshift(np.fft.fft(rows * w[None, :], axis=1), axes=1)[:, 1:]
    freqs = 2.0 * math.pi * np.fft.fftshift(np.fft.fftfreq(n, steps[0]))[1:]
    k0 = int(np.argmin(np.abs(freqs)))
    spec[:, k0 - _DC_GUARD : k0 + _DC_GUARD + 1] = 0.0
    return freqs, spec


def delay_spectrum(grid: SignalGrid, window: str = "hann") -> SpectrumMap:
    """Per-temperature Fourier magnitude map, normalized to global max 1."""
    if grid.n_tau < 256:
        raise DomainError("delay spectrum needs >= 256 delay samples")
    w = 0.5 - 0.5 * np.cos(2.0 * np.pi * np.arange(grid.n_tau) / grid.n_tau) if window == "hann" else 1.0
    scale = float(np.max(np.abs(np.sum(grid.values * w, axis=1))))  # DC magnitude before suppression
    freqs, spec = windowed_delay_transform(grid.values, grid.tau_axis, window)
    mags = np.abs(spec).T
    top = mags.max()
    # a map that is pure transform-rounding residue stays zero instead of
    # being normalized up to 1
    if top > 1e-12 * max(scale, 1e-300):
        mags = mags / top
    else:
        mags = np.zeros_like(mags)
    return SpectrumMap(magnitudes=mags, freq_axis=freqs, temp_axis=grid.temp_axis.copy(), window=window)


@dataclass(frozen=True)
class RowPeaks:
    """Detected peaks per temperature row: lists of (frequency, magnitude)."""

    rows: tuple
    temp_axis: np.ndarray
    bin_width: float


def detect_peaks(spectrum: SpectrumMap, threshold: float = 0.05) -> RowPeaks:
    """Local maxima above threshold x row max, on the positive-frequency half.

    Peak positions are refined by three-point parabolic interpolation of the
    magnitudes, good to well under a tenth of a bin for windowed cosines.
    """
    if not 0.0 < threshold < 1.0:
        raise DomainError("threshold must lie strictly between 0 and 1")
    freqs = spectrum.freq_axis
    binw = spectrum.bin_width
    positive = freqs > 0
    rows = []
    for i in range(spectrum.temp_axis.size):
        row = spectrum.magnitudes[:, i]
        rmax = row.max()
        found = []
        if rmax > 0:
            idx, _ = find_peaks(row, height=threshold * rmax)
            for k in idx:
                if not positive[k] or k == 0 or k == row.size - 1:
                    continue
                lo, mid, hi = row[k - 1], row[k], row[k + 1]
                den = lo - 2.0 * mid + hi
                shift = 0.5 * (lo - hi) / den if den != 0 else 0.0
                found.append((float(freqs[k] + shift * binw), float(mid)))
        rows.append(tuple(found))
    return RowPeaks(rows=tuple(rows), temp_axis=spectrum.temp_axis.copy(), bin_width=binw)


@dataclass(frozen=True)
class Trajectory:
    """One tracked peak line with its linear fit across temperature."""

    temperatures: np.ndarray
    frequencies: np.ndarray
    magnitudes: np.ndarray
    slope: float
    intercept: float
    slope_stderr: float
    classification: str  # "x-branch-plus" | "x-branch-minus" | "straight"

    @property
    def span(self) -> int:
        return self.temperatures.size

    def frequency_at(self, temperature: float, t0: float) -> float:
        return self.intercept + self.slope * (temperature - t0)


@dataclass(frozen=True)
class LineSet:
    """Classified trajectories plus the context needed to interpret them."""

    trajectories: tuple
    degenerate_temperature: float
    detuning_slope: float
    bin_width: float
    n_rows: int

    def by_class(self, classification: str) -> list:
        return [t for t in self.trajectories if t.classification == classification]


def _fit_line(temps: np.ndarray, freqs: np.ndarray, t0: float) -> tuple[float, float, float]:
    x = temps - t0
    if temps.size == 1:
        return 0.0, float(freqs[0]), float("inf")
    design = np.column_stack([x, np.ones_like(x)])
    (slope, intercept), *_ = np.linalg.lstsq(design, freqs, rcond=None)
    resid = freqs - (slope * x + intercept)
    dof = max(temps.size - 2, 1)
    sxx = float(np.sum((x - x.mean()) ** 2))
    stderr = math.sqrt(float(np.sum(resid**2)) / dof / sxx) if sxx > 0 else float("inf")
    return float(slope), float(intercept), stderr


def track_lines(
    peaks: RowPeaks,
    tuning: TuningModel,
    gate_bins: float = 3.0,
    straight_slope_fraction: float = 0.2,
    min_span_fraction: float = 0.6,
) -> LineSet:
    """Associate per-row peaks into trajectories and classify them.

    Row-to-row association is nearest-neighbor against a constant-velocity
    prediction, gated by gate_bins bins plus the expected per-row detuning
    motion. Several trajectories may share one peak, which is what lets the
    two arms of an X pass through their merged vertex. Trajectories spanning
    fewer than min_span_fraction of the rows are dropped; duplicates whose
    fits coincide are merged. A trajectory is straight when its fitted slope
    is below straight_slope_fraction of the detuning slope at the degenerate
    temperature, otherwise it is an X branch with the slope's sign.
    """
    temps = peaks.temp_axis
    if temps.size < 5:
        raise DomainError("tracking needs at least 5 temperature rows")
    t0 = tuning.degenerate_temperature
    dslope = abs(tuning.derivative_at(t0))
    step = float(temps[1] - temps[0])
    gate = gate_bins * peaks.bin_width + dslope * step

    active: list[dict] = []
    closed: list[dict] = []
    for i, temp in enumerate(temps):
        row = peaks.rows[i]
        freqs = np.array([p[0] for p in row]) if row else np.empty(0)
        mags = np.array([p[1] for p in row]) if row else np.empty(0)
        claimed = np.zeros(freqs.size, dtype=bool)
        still = []
        for tr in active:
            if len(tr["f"]) >= 2:
                vel = (tr["f"][-1] - tr["f"][-2]) / (tr["t"][-1] - tr["t"][-2])
            else:
                vel = 0.0
            pred = tr["f"][-1] + vel * (temp - tr["t"][-1])
            if freqs.size:
                j = int(np.argmin(np.abs(freqs - pred)))
                if abs(freqs[j] - pred) <= gate:
                    tr["t"].append(temp)
                    tr["f"].append(float(freqs[j]))
                    tr["m"].append(float(mags[j]))
                    claimed[j] = True
                    still.append(tr)
                    continue
            closed.append(tr)
        active = still
        for j in range(freqs.size):
            if not claimed[j]:
                active.append({"t": [temp], "f": [float(freqs[j])], "m": [float(mags[j])]})
    closed.extend(active)

    min_span = min_span_fraction * temps.size
    fitted = []
    for tr in closed:
        if len(tr["t"]) < min_span:
            continue
        t = np.asarray(tr["t"])
        f = np.asarray(tr["f"])
        slope, intercept, stderr = _fit_line(t, f, t0)
        if abs(slope) < straight_slope_fraction * dslope:
            cls = "straight"
        elif slope > 0:
            cls = "x-branch-plus"
        else:
            cls = "x-branch-minus"
        fitted.append(
            Trajectory(
                temperatures=t,
                frequencies=f,
                magnitudes=np.asarray(tr["m"]),
                slope=slope,
                intercept=intercept,
                slope_stderr=stderr,
                classification=cls,
            )
        )

    # merge duplicates: same class, coincident fits (vertex sharing can fork a branch)
    fitted.sort(key=lambda tr: (-tr.span, -float(np.max(tr.magnitudes))))
    kept: list[Trajectory] = []
    for tr in fitted:
        dup = any(
            tr.classification == other.classification
            and abs(tr.intercept - other.intercept) < 2.0 * peaks.bin_width
            and abs(tr.slope - other.slope) < max(0.15 * dslope, 0.05)
            for other in kept
        )
        if not dup:
            kept.append(tr)
    kept.sort(key=lambda tr: tr.intercept)
    return LineSet(
        trajectories=tuple(kept),
        degenerate_temperature=t0,
        detuning_slope=dslope,
        bin_width=peaks.bin_width,
        n_rows=temps.size,
    )


@dataclass(frozen=True)
class ReconstructedLevel:
    """One recovered intermediate level."""

    offset_frequency: float  # relative to the degenerate frequency, rad/ps
    energy: float  # absolute, rad/ps
    wavelength_nm: float
    uncertainty: float  # rad/ps


@dataclass(frozen=True)
class ReconstructedLevels:
    """Levels from paired X branches plus leftover combination frequencies."""

    levels: tuple
    combined_lines: tuple  # frequencies of straight lines, rad/ps
    warnings: tuple = ()


def reconstruct_levels(lines: LineSet, omega0: float, pair_gate_bins: float = 4.0) -> ReconstructedLevels:
    """Pair X branches by intercept, average them into levels, report the rest.

    Each rising branch is paired with the nearest falling branch whose
    intercept lies within pair_gate_bins bins. The level offset is the mean of
    the two intercepts; its uncertainty is half their discrepancy, floored at
    half a bin. Unpairable branches are appended to the combination-line list
    with a warning rather than dropped.
    """
    plus = sorted(lines.by_class("x-branch-plus"), key=lambda tr: tr.intercept)
    minus = list(lines.by_class("x-branch-minus"))
    if not plus or not minus:
        raise DomainError("level reconstruction needs at least one X branch pair")
    gate = pair_gate_bins * lines.bin_width
    levels = []
    warnings_out = []
    unmatched_minus = set(range(len(minus)))
    for tr in plus:
        best, best_d = None, math.inf
        for j in unmatched_minus:
            d = abs(tr.intercept - minus[j].intercept)
            if d < best_d:
                best, best_d = j, d
        if best is not None and best_d < gate:
            unmatched_minus.remove(best)
            other = minus[best]
            offset = 0.5 * (tr.intercept + other.intercept)
            unc = max(0.5 * best_d, 0.5 * lines.bin_width)
            energy = offset + omega0
            levels.append(
                ReconstructedLevel(
                    offset_frequency=offset,
                    energy=energy,
                    wavelength_nm=omega_to_wavelength(energy),
                    uncertainty=unc,
                )
            )
        else:
            warnings_out.append(
                f"rising branch at offset {tr.intercept:.3f} rad/ps has no "
                "falling partner; reported as a combination line"
            )
    combined = [tr.intercept for tr in lines.by_class("straight")]
    for tr in plus:
        if not any(abs(lev.offset_frequency - tr.intercept) <= gate for lev in levels):
            combined.append(tr.intercept)
    for j in sorted(unmatched_minus):
        warnings_out.append(
            f"falling branch at offset {minus[j].intercept:.3f} rad/ps has no "
            "rising partner; reported as a combination line"
        )
        combined.append(minus[j].intercept)
    levels.sort(key=lambda lev: lev.offset_frequency)
    return ReconstructedLevels(
        levels=tuple(levels),
        combined_lines=tuple(sorted(combined)),
        warnings=tuple(warnings_out),
    )
