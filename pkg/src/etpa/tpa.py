"""Two-photon absorption signal of a temperature-tuned photon pair.

The CW closed form is a coherent sum over the intermediate levels of two
window integrals, one per photon ordering, with window lengths 2*T_e -+ tau.
Each window integral is an entanglement-time resonance kernel

    K(x, a) = (1 - exp(-i x a)) / x = i a exp(-i x a / 2) sinc(x a / 2),

where x is the level detuning from a photon's central frequency and a the
window length. The product form on the right is used everywhere: it is finite
at x = 0 and needs no small-argument branch.

A literally expanded quadratic form of the same probability (grouped into the
term families that generate the X-shaped and straight Fourier lines) is kept
as an independent second implementation for cross-checking, and a pulse-pumped
variant rescales the closed form by the pump envelope.
"""

from __future__ import annotations

import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .core import DomainError, LevelSystem, ResonanceError, SignalNormalization
from .source import SourceConfig, sinc

__all__ = [
    "resonance_kernel",
    "tpa_amplitude",
    "tpa_probability",
    "tpa_probability_expanded",
    "tpa_probability_pulsed",
    "tpa_grid",
    "SignalGrid",
    "RESONANCE_TOL",
]

#: Largest allowed |final energy - pair sum frequency| in rad/ps.
RESONANCE_TOL = 1e-9


def resonance_kernel(detuning, window):
    """Window kernel K(x, a), stable for all arguments including x = 0."""
    x = np.asarray(detuning, dtype=float)
    a = np.asarray(window, dtype=float)
    half = 0.5 * x * a
    return 1j * a * np.exp(-1j * half) * sinc(half)


def _check_resonance(levels: LevelSystem, pair_sum: float) -> None:
    if abs(levels.final_energy - pair_sum) > RESONANCE_TOL:
        raise ResonanceError(
            f"final level at {levels.final_energy} rad/ps is not resonant with "
            f"the pair sum frequency {pair_sum} rad/ps (tolerance {RESONANCE_TOL}); "
            "adjust the final level or the degenerate frequency"
        )


def tpa_amplitude(levels: LevelSystem, omega_s0: float, omega_i0: float,
                  entanglement_time: float, tau):
    """Coherent two-pathway amplitude at central frequencies (omega_s0, omega_i0).

    tau may be a scalar or an array of delays.
    """
    _check_resonance(levels, omega_s0 + omega_i0)
    te = entanglement_time
    tau = np.asarray(tau, dtype=float)
    amp = np.zeros(tau.shape, dtype=complex)
    for lev in levels.intermediate:
        amp += lev.dipole * (
            resonance_kernel(lev.energy - omega_i0, 2.0 * te - tau)
            + resonance_kernel(lev.energy - omega_s0, 2.0 * te + tau)
        )
    return amp if amp.ndim else complex(amp)


def tpa_probability(
    levels: LevelSystem,
    config: SourceConfig,
    temperature: float,
    tau,
    normalization: SignalNormalization | None = None,
):
    """CW signal (omega_i0 * omega_s0 / T_e) |amplitude|^2 at one temperature.

    grid-max normalization is meaningless for a pointwise value and is treated
    as prefactor-only here; the grid evaluator applies the grid rescaling.
    """
    if normalization is None:
        normalization = SignalNormalization()
    if config.is_cw and abs(levels.final_energy - config.pump_frequency) > RESONANCE_TOL:
        raise ResonanceError(
            f"CW pumping requires the final level ({levels.final_energy} rad/ps) "
            f"to match the pump frequency ({config.pump_frequency} rad/ps)"
        )
    cf = config.central_frequencies(temperature)
    amp = tpa_amplitude(levels, cf.signal, cf.idler, config.entanglement_time, tau)
    pref = cf.signal * cf.idler / config.entanglement_time
    return normalization.constant_factor() * pref * np.abs(amp) ** 2


def _expanded_complex(
    levels: LevelSystem,
    omega0: float,
    delta: float,
    entanglement_time: float,
    tau,
):
    """Complex-accumulated expansion of |amplitude|^2; see tpa_probability_expanded."""
    te = entanglement_time
    tau = np.asarray(tau, dtype=float)
    es = levels.energies
    ds = levels.dipoles
    x = es - (omega0 - delta)  # detunings from the idler central frequency
    y = es - (omega0 + delta)  # detunings from the signal central frequency
    if np.any(x == 0.0) or np.any(y == 0.0):
        raise DomainError(
            "the expanded form divides by the level detunings and cannot be "
            "evaluated when a level coincides with a photon central frequency"
        )
    off = es - omega0
    s_const = 1.0 / x + 1.0 / y
    a = 2.0 * te - tau
    b = 2.0 * te + tau
    total = np.zeros(tau.shape, dtype=complex)
    n = es.size
    for j in range(n):
        for k in range(n):
            dd = ds[j] * np.conj(ds[k])
            pedestal = s_const[j] * s_const[k]
            cross_k = -s_const[j] * (np.exp(1j * x[k] * a) / x[k] + np.exp(1j * y[k] * b) / y[k])
            cross_j = -(np.exp(-1j * x[j] * a) / x[j] + np.exp(-1j * y[j] * b) / y[j]) * s_const[k]
            diff_line = (
                np.exp(-1j * (es[j] - es[k]) * a) / (x[j] * x[k])
                + np.exp(-1j * (es[j] - es[k]) * b) / (y[j] * y[k])
            )
            sum_line = (
                np.exp(-1j * (es[j] - es[k] + 2.0 * delta) * 2.0 * te)
                * np.exp(1j * (off[j] + off[k]) * tau) / (x[j] * y[k])
                + np.exp(-1j * (es[j] - es[k] - 2.0 * delta) * 2.0 * te)
                * np.exp(-1j * (off[j] + off[k]) * tau) / (y[j] * x[k])
            )
            total += dd * (pedestal + cross_k + cross_j + diff_line + sum_line)
    return total


def tpa_probability_expanded(
    levels: LevelSystem,
    omega0: float,
    delta: float,
    entanglement_time: float,
    tau,
):
    """Literal expansion of |amplitude|^2 over level pairs (no prefactor).

    The five term families are kept separate: a constant pedestal, two
    conjugate single-window families oscillating at the temperature-shifted
    level offsets (the X lines), a family at level-energy differences and a
    family at summed level offsets (the straight lines). Equal to
    |tpa_amplitude|^2. Unlike the kernel form, the expansion divides by the
    detunings, so it is singular when a level crosses a photon's central
    frequency.
    """
    result = _expanded_complex(levels, omega0, delta, entanglement_time, tau).real
    return result if result.ndim else float(result)


def tpa_probability_pulsed(
    levels: LevelSystem,
    config: SourceConfig,
    temperature: float,
    tau,
    normalization: SignalNormalization | None = None,
):
    """Pulse-pumped signal: pump-envelope prefactor times the CW bracket.

    At a pair sum resonant with the pump this is the CW result rescaled by
    sqrt(2 pi) * T_p; a pump detuned by dw from the pair sum is suppressed by
    exp(-2 T_p^2 dw^2).
    """
    if config.is_cw:
        raise DomainError("tpa_probability_pulsed needs a finite pump duration")
    if normalization is None:
        normalization = SignalNormalization()
    cf = config.central_frequencies(temperature)
    _check_resonance(levels, cf.total)
    amp = tpa_amplitude(levels, cf.signal, cf.idler, config.entanglement_time, tau)
    tp = config.pump_duration
    detune = config.pump_frequency - cf.total
    pref = (
        math.sqrt(2.0 * math.pi)
        * tp
        * math.exp(-2.0 * tp * tp * detune * detune)
        * cf.signal * cf.idler / config.entanglement_time
    )
    return normalization.constant_factor() * pref * np.abs(amp) ** 2


@dataclass(frozen=True)
class SignalGrid:
    """Signal over a (temperature, delay) grid with axis and provenance metadata.

    values[i, j] is the signal at temp_axis[i], tau_axis[j]. When grid-max
    normalized the raw maximum before rescaling is recorded.
    """

    values: np.ndarray
    tau_axis: np.ndarray
    temp_axis: np.ndarray
    normalization: SignalNormalization
    raw_max: float
    provenance: dict = field(default_factory=dict)

    @property
    def n_tau(self) -> int:
        return self.tau_axis.size

    @property
    def n_temp(self) -> int:
        return self.temp_axis.size


def _default_tau_range(config: SourceConfig) -> tuple[float, float]:
    te = config.entanglement_time
    return (-2.0 * te, 2.0 * te)


def _row_values(levels, config, temperature, taus, constant_factor):
    cf = config.central_frequencies(temperature)
    amp = tpa_amplitude(levels, cf.signal, cf.idler, config.entanglement_time, taus)
    return constant_factor * (cf.signal * cf.idler / config.entanglement_time) * np.abs(amp) ** 2


def tpa_grid(
    levels: LevelSystem,
    config: SourceConfig,
    tau_range: tuple[float, float] | None = None,
    n_tau: int = 4096,
    temp_range: tuple[float, float] | None = None,
    n_temp: int = 101,
    normalization: SignalNormalization | None = None,
    workers: int = 1,
) -> SignalGrid:
    """Dense signal grid over delays and temperatures.

    Rows (temperatures) are independent; with workers > 1 they are computed in
    a thread pool and reassembled in index order, so any worker count yields a
    bit-identical grid. Defaults: delays spanning +-2 T_e with 4096 samples
    (keeps all level-pair beat frequencies below Nyquist for level offsets up
    to roughly twice the validation examples), temperatures spanning the
    tuning model's domain with 101 samples.
    """
    if normalization is None:
        normalization = SignalNormalization()
    if n_tau < 2 or n_temp < 2:
        raise DomainError("grid needs at least 2 samples per axis")
    if tau_range is None:
        tau_range = _default_tau_range(config)
    if temp_range is None:
        temp_range = config.tuning.domain
    if not all(math.isfinite(v) for v in (*tau_range, *temp_range)):
        raise DomainError("grid ranges must be finite")
    if config.is_cw and abs(levels.final_energy - config.pump_frequency) > RESONANCE_TOL:
        raise ResonanceError(
            f"CW pumping requires the final level ({levels.final_energy} rad/ps) "
            f"to match the pump frequency ({config.pump_frequency} rad/ps)"
        )
    _check_resonance(levels, 2.0 * config.omega0)

    taus = np.linspace(tau_range[0], tau_range[1], n_tau)
    temps = np.linspace(temp_range[0], temp_range[1], n_temp)
    cfac = normalization.constant_factor()

    values = np.empty((n_temp, n_tau), dtype=float)
    if workers <= 1:
        for i, temp in enumerate(temps):
            values[i] = _row_values(levels, config, temp, taus, cfac)
    else:
        def run(i):
            return i, _row_values(levels, config, temps[i], taus, cfac)

        with ThreadPoolExecutor(max_workers=workers) as pool:
            for i, row in pool.map(run, range(n_temp)):
                values[i] = row

    if not np.all(np.isfinite(values)):
        raise ArithmeticError("signal grid contains non-finite values")
    raw_max = float(values.max())
    if normalization.mode == "grid-max":
        if raw_max > 0:
            values = values / raw_max
    provenance = {
        "levels": levels.digest_dict(),
        "source": config.digest_dict(),
        "tau_range_ps": [float(taus[0]), float(taus[-1])],
        "n_tau": int(n_tau),
        "temp_range_c": [float(temps[0]), float(temps[-1])],
        "n_temp": int(n_temp),
    }
    return SignalGrid(
        values=values,
        tau_axis=taus,
        temp_axis=temps,
        normalization=normalization,
        raw_max=raw_max,
        provenance=provenance,
    )
