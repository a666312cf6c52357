"""The entangled photon-pair source.

Covers the pair correlation time, the joint spectrum of a pulse-pumped pair,
and the classification of its frequency-correlation regime. A CW-pumped pair
has a singular joint spectrum supported on the anti-diagonal
omega_s + omega_i = omega_p; it is handled analytically by the signal
evaluators and only pulse-pumped states are sampled on grids here.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from .core import DomainError, wavelength_to_omega
from .tuning import TuningModel, central_frequencies

__all__ = [
    "SourceConfig",
    "JointSpectrum",
    "entanglement_time",
    "correlation_regime",
    "joint_spectrum",
    "integration_axes",
    "display_axes",
    "sinc",
]

#: Normalization constant the joint spectrum integrates to, independent of
#: pump duration and correlation time: 1/(4*sqrt(2)).
JOINT_SPECTRUM_INTEGRAL = 1.0 / (4.0 * math.sqrt(2.0))


def sinc(z):
    """Unnormalized sinc: sin(z)/z with sinc(0) = 1."""
    return np.sinc(np.asarray(z) / np.pi)


def entanglement_time(
    inverse_group_velocity_signal: float,
    inverse_group_velocity_idler: float,
    crystal_length: float,
) -> float:
    """Pair correlation time (N_s - N_i) * L / 4 in ps.

    Group indices are given as inverse group velocities in ps/mm, the crystal
    length in mm. A negative result means the signal/idler labels are swapped;
    the magnitude is returned with a warning in that case.
    """
    if not crystal_length > 0:
        raise DomainError("crystal length must be positive")
    if inverse_group_velocity_signal == inverse_group_velocity_idler:
        raise DomainError(
            "equal group velocities give zero correlation time; "
            "a birefringent (type-II) source is required"
        )
    te = (inverse_group_velocity_signal - inverse_group_velocity_idler) * crystal_length / 4.0
    if te < 0:
        warnings.warn(
            "signal/idler group velocities give a negative correlation time; "
            "swapping the labels and using its magnitude",
            stacklevel=2,
        )
        te = -te
    return te


@dataclass(frozen=True)
class SourceConfig:
    """Source parameters: pump, correlation time, pump duration, tuning model.

    pump_duration_ps is None for a CW pump. The degenerate frequency defaults
    to half the pump frequency (pair resonant with the pump); it may be
    overridden to model a pump detuned from the tuning curve's degeneracy
    point, which only the pulse-pumped evaluator accepts.
    """

    pump_wavelength: float = 405.0
    entanglement_time: float = 0.87
    pump_duration: float | None = None
    tuning: TuningModel = field(default_factory=TuningModel)
    degenerate_frequency: float | None = None

    def __post_init__(self) -> None:
        if not self.pump_wavelength > 0:
            raise DomainError("pump wavelength must be positive")
        if not self.entanglement_time > 0:
            raise DomainError("entanglement time must be positive")
        if self.pump_duration is not None and not self.pump_duration > 0:
            raise DomainError("pump duration must be positive when pulsed")
        if self.degenerate_frequency is not None and not self.degenerate_frequency > 0:
            raise DomainError("degenerate frequency must be positive")

    @property
    def pump_frequency(self) -> float:
        return wavelength_to_omega(self.pump_wavelength)

    @property
    def omega0(self) -> float:
        """Degenerate central frequency of the pair."""
        if self.degenerate_frequency is not None:
            return self.degenerate_frequency
        return 0.5 * self.pump_frequency

    @property
    def is_cw(self) -> bool:
        return self.pump_duration is None

    def central_frequencies(self, temperature: float):
        return central_frequencies(self.tuning, self.omega0, temperature)

    def digest_dict(self) -> dict:
        return {
            "pump_wavelength_nm": self.pump_wavelength,
            "entanglement_time_ps": self.entanglement_time,
            "pump_duration_ps": self.pump_duration,
            "degenerate_frequency_rad_per_ps": self.omega0,
            "tuning": {
                "kind": self.tuning.kind,
                "degenerate_temperature_c": self.tuning.degenerate_temperature,
                "coefficients": list(self.tuning.coefficients),
                "table_temperatures": list(self.tuning.table_temperatures),
                "table_deltas": list(self.tuning.table_deltas),
            },
        }


def correlation_regime(pump_duration: float | None, entanglement_time: float) -> str:
    """Classify the pair's frequency correlations.

    Long pumps (T_p > 2 T_e, CW included) give anti-correlated pairs, short
    pumps (T_p < T_e/4) correlated ones, and the band in between (exemplar
    T_p = T_e/2) quasi-uncorrelated ones. The boundaries are classifier
    choices; the physics varies continuously.
    """
    if not entanglement_time > 0:
        raise DomainError("entanglement time must be positive")
    if pump_duration is None:
        return "anti-correlated"
    if not pump_duration > 0:
        raise DomainError("pump duration must be positive")
    if pump_duration > 2.0 * entanglement_time:
        return "anti-correlated"
    if pump_duration < 0.25 * entanglement_time:
        return "correlated"
    return "quasi-uncorrelated"


@dataclass(frozen=True)
class JointSpectrum:
    """Sampled joint spectral intensity S(omega_s, omega_i).

    values[i, j] = S(signal_axis[i], idler_axis[j]), a probability density per
    (rad/ps)^2. Axes need not share a step: precision integration uses a fine
    signal axis and a coarse idler axis.
    """

    signal_axis: np.ndarray
    idler_axis: np.ndarray
    values: np.ndarray
    pump_duration: float
    entanglement_time: float
    temperature: float

    def peak(self) -> float:
        return float(self.values.max())


def _jsi_prefactor(pump_duration: float, entanglement_time: float) -> float:
    return pump_duration * entanglement_time / (2.0 * math.pi * math.sqrt(math.pi))


def joint_spectrum(
    config: SourceConfig,
    temperature: float,
    signal_axis: np.ndarray,
    idler_axis: np.ndarray,
    *,
    _check_coverage: bool = True,
) -> JointSpectrum:
    """Joint spectral intensity of a pulse-pumped pair on the given axes.

    S = prefactor * exp(-2 T_p^2 (w_p - w_s - w_i)^2)
                  * sinc^2(T_e * ((w_i - w_s) - mu(T)))
    where mu(T) = idler - signal central-frequency difference. The axes must
    jointly cover at least 5/T_p along the pump-sum direction and 5/T_e along
    the difference direction.
    """
    if config.is_cw:
        raise DomainError(
            "a CW-pumped pair has a singular joint spectrum confined to the "
            "anti-diagonal omega_s + omega_i = omega_p; use the closed-form "
            "signal evaluators instead of a sampled grid"
        )
    s_ax = np.asarray(signal_axis, dtype=float)
    i_ax = np.asarray(idler_axis, dtype=float)
    if s_ax.ndim != 1 or i_ax.ndim != 1 or s_ax.size < 2 or i_ax.size < 2:
        raise DomainError("axes must be 1-D with at least two samples")
    tp, te = config.pump_duration, config.entanglement_time
    if _check_coverage:
        reach = (s_ax[-1] - s_ax[0]) / 2.0 + (i_ax[-1] - i_ax[0]) / 2.0
        need = max(5.0 / tp, 5.0 / te)
        if reach < need:
            raise DomainError(
                f"axes span {reach:.3g} rad/ps of joint support but "
                f"{need:.3g} is required (5/T_p and 5/T_e half-widths)"
            )
    cf = config.central_frequencies(temperature)
    mu = cf.idler - cf.signal
    wp = config.pump_frequency
    pref = _jsi_prefactor(tp, te)
    values = np.empty((s_ax.size, i_ax.size), dtype=float)
    block = max(1, int(4e6 / max(i_ax.size, 1)))
    for lo in range(0, s_ax.size, block):
        hi = min(lo + block, s_ax.size)
        ws = s_ax[lo:hi, None]
        u = wp - ws - i_ax[None, :]
        v = (i_ax[None, :] - ws) - mu
        values[lo:hi] = pref * np.exp(-2.0 * tp * tp * u * u) * sinc(te * v) ** 2
    return JointSpectrum(
        signal_axis=s_ax,
        idler_axis=i_ax,
        values=values,
        pump_duration=tp,
        entanglement_time=te,
        temperature=temperature,
    )


def integration_axes(
    config: SourceConfig,
    temperature: float,
    target_abs_error: float = 1.0e-4,
) -> tuple[np.ndarray, np.ndarray]:
    """Axes sized so the trapezoid integral of the joint spectrum meets a tolerance.

    The slowly decaying sinc^2 tail truncates with a smooth deficit of
    (integral) / (pi * Z) where Z is the covered half-range of the sinc
    argument; the half-widths are chosen to keep that deficit at half the
    target. The signal axis resolves the pump envelope across the
    anti-diagonal; the idler axis only needs to resolve the envelope of the
    inner integral, whose bandwidth is set by the correlation time, so it can
    be coarse. This keeps the grid small enough to hold in memory.
    """
    if config.is_cw:
        raise DomainError("integration axes are only defined for pulsed pumps")
    tp, te = config.pump_duration, config.entanglement_time
    z_needed = JOINT_SPECTRUM_INTEGRAL / (math.pi * 0.5 * target_abs_error)
    half_width = 0.5 * z_needed / te
    half_width = max(half_width, 10.0 / tp, 10.0 / te)
    h_fine = 0.8 * math.pi / (2.0 * te + 13.0 * tp)
    h_coarse = 0.8 * math.pi / (4.0 * te)
    h_fine = min(h_fine, h_coarse)
    cf = config.central_frequencies(temperature)
    n_s = int(2 * half_width / h_fine) + 1
    n_i = int(2 * half_width / h_coarse) + 1
    s_ax = np.linspace(cf.signal - half_width, cf.signal + half_width, n_s)
    i_ax = np.linspace(cf.idler - half_width, cf.idler + half_width, n_i)
    return s_ax, i_ax


def display_axes(
    config: SourceConfig,
    temperature: float,
    n_points: int = 512,
    n_halfwidths: float = 6.0,
) -> tuple[np.ndarray, np.ndarray]:
    """Square axes sized to render the joint spectrum, not to integrate it."""
    if config.is_cw:
        raise DomainError("display axes are only defined for pulsed pumps")
    tp, te = config.pump_duration, config.entanglement_time
    half = n_halfwidths * max(1.0 / tp, 1.0 / te) / 2.0 + 2.5 / te + 2.5 / tp
    cf = config.central_frequencies(temperature)
    s_ax = np.linspace(cf.signal - half, cf.signal + half, n_points)
    i_ax = np.linspace(cf.idler - half, cf.idler + half, n_points)
    return s_ax, i_ax
