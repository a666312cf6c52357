"""Unit conventions, physical constants and the shared domain types.

Conventions used throughout the package:

* angular frequencies and level energies in rad/ps (energies are angular
  frequencies, i.e. hbar = 1),
* times and delays in ps,
* wavelengths in nm,
* temperatures in degrees Celsius.

With these units every exponent in the signal formulas is a plain
(rad/ps) x (ps) product and no hidden conversion constants appear.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "SPEED_OF_LIGHT_NM_PER_PS",
    "DomainError",
    "ResonanceError",
    "wavelength_to_omega",
    "omega_to_wavelength",
    "IntermediateLevel",
    "LevelSystem",
    "SignalNormalization",
]

#: Speed of light in nm/ps (exact CODATA value scaled).
SPEED_OF_LIGHT_NM_PER_PS = 299792.458


class DomainError(ValueError):
    """An input lies outside the physical domain of an operation."""


class ResonanceError(ValueError):
    """The two-photon resonance condition is violated."""


def wavelength_to_omega(wavelength_nm: float) -> float:
    """Convert a vacuum wavelength in nm to angular frequency in rad/ps."""
    if not wavelength_nm > 0:
        raise DomainError(f"wavelength must be positive, got {wavelength_nm}")
    return 2.0 * math.pi * SPEED_OF_LIGHT_NM_PER_PS / wavelength_nm


def omega_to_wavelength(omega_rad_per_ps: float) -> float:
    """Convert an angular frequency in rad/ps to a vacuum wavelength in nm."""
    if not omega_rad_per_ps > 0:
        raise DomainError(f"angular frequency must be positive, got {omega_rad_per_ps}")
    return 2.0 * math.pi * SPEED_OF_LIGHT_NM_PER_PS / omega_rad_per_ps


@dataclass(frozen=True)
class IntermediateLevel:
    """One intermediate level: energy (rad/ps) and complex transition weight.

    The weight is the product of the two transition dipole matrix elements
    that route the two-photon excitation through this level; only relative
    magnitudes and phases matter for normalized signals.
    """

    energy: float
    dipole: complex = 1.0 + 0.0j

    def __post_init__(self) -> None:
        if not math.isfinite(self.energy):
            raise DomainError("intermediate level energy must be finite")
        if not (math.isfinite(self.dipole.real) and math.isfinite(self.dipole.imag)):
            raise DomainError("dipole weight must be finite")


@dataclass(frozen=True)
class LevelSystem:
    """Three-band absorber: ground state at 0, intermediate levels, final level.

    Energies are measured from the ground state (which is pinned to zero by
    convention, so it is not a field). Intermediate energies must be distinct;
    the physically intended ordering 0 < energy < final_energy is only warned
    about when violated, not rejected.
    """

    intermediate: tuple[IntermediateLevel, ...]
    final_energy: float

    def __post_init__(self) -> None:
        if len(self.intermediate) == 0:
            raise DomainError("at least one intermediate level is required")
        if not math.isfinite(self.final_energy):
            raise DomainError("final level energy must be finite")
        energies = [lev.energy for lev in self.intermediate]
        if len(set(energies)) != len(energies):
            raise DomainError(f"intermediate level energies must be distinct: {energies}")
        for e in energies:
            if not (0.0 < e < self.final_energy):
                warnings.warn(
                    f"intermediate level at {e} rad/ps lies outside "
                    f"(0, {self.final_energy}); the model is built for levels "
                    "between the ground and final states",
                    stacklevel=2,
                )

    @classmethod
    def from_wavelengths(
        cls,
        intermediate_nm: "list[float] | tuple[float, ...]",
        final_nm: float,
        dipoles: "list[complex] | None" = None,
    ) -> "LevelSystem":
        """Build a level system from transition wavelengths in nm."""
        if dipoles is None:
            dipoles = [1.0 + 0.0j] * len(intermediate_nm)
        if len(dipoles) != len(intermediate_nm):
            raise DomainError("dipoles and intermediate wavelengths must pair up")
        levels = tuple(
            IntermediateLevel(wavelength_to_omega(lam), complex(d))
            for lam, d in zip(intermediate_nm, dipoles)
        )
        return cls(intermediate=levels, final_energy=wavelength_to_omega(final_nm))

    @property
    def energies(self) -> np.ndarray:
        return np.array([lev.energy for lev in self.intermediate], dtype=float)

    @property
    def dipoles(self) -> np.ndarray:
        return np.array([lev.dipole for lev in self.intermediate], dtype=complex)

    def digest_dict(self) -> dict:
        """Plain-data description used in provenance records."""
        return {
            "intermediate": [
                {"energy_rad_per_ps": lev.energy, "dipole": [lev.dipole.real, lev.dipole.imag]}
                for lev in self.intermediate
            ],
            "final_energy_rad_per_ps": self.final_energy,
        }


@dataclass(frozen=True)
class SignalNormalization:
    """How a signal grid is scaled.

    mode "grid-max" rescales so the grid maximum is 1 (the raw maximum is
    recorded alongside). "prefactor-only" keeps the frequency/correlation-time
    prefactor but drops all physical constants. "raw-with-constants" also
    multiplies the recorded constants in; it exists for completeness and the
    default constants are all 1.
    """

    mode: str = "grid-max"
    hbar: float = 1.0
    epsilon0: float = 1.0
    speed_of_light: float = 1.0
    effective_area: float = 1.0

    _MODES = ("grid-max", "prefactor-only", "raw-with-constants")

    def __post_init__(self) -> None:
        if self.mode not in self._MODES:
            raise DomainError(f"unknown normalization mode {self.mode!r}; expected one of {self._MODES}")

    def constant_factor(self) -> float:
        """Multiplier applied in raw-with-constants mode."""
        if self.mode != "raw-with-constants":
            return 1.0
        return 1.0 / (
            4.0
            * math.pi
            * self.hbar**2
            * self.epsilon0**2
            * self.speed_of_light**2
            * self.effective_area**2
        )

    def as_dict(self) -> dict:
        return {
            "mode": self.mode,
            "hbar": self.hbar,
            "epsilon0": self.epsilon0,
            "speed_of_light": self.speed_of_light,
            "effective_area": self.effective_area,
        }
