"""Temperature-tuned entangled-photon-pair absorption.

Simulates the two-photon absorption signal of a model absorber driven by a
temperature-tuned photon-pair source over (delay, temperature) grids, and
recovers the absorber's intermediate levels from the Fourier structure of
that signal. An independent time-domain quadrature certifies the closed-form
evaluator.
"""

from .core import (
    SPEED_OF_LIGHT_NM_PER_PS,
    DomainError,
    IntermediateLevel,
    LevelSystem,
    ResonanceError,
    SignalNormalization,
    omega_to_wavelength,
    wavelength_to_omega,
)
from .tuning import (
    CentralFrequencies,
    TuningModel,
    central_frequencies,
    delta_at,
    load_tuning_table_csv,
    tuning_curve,
)
from .source import (
    JointSpectrum,
    SourceConfig,
    correlation_regime,
    display_axes,
    entanglement_time,
    integration_axes,
    joint_spectrum,
)
from .tpa import (
    SignalGrid,
    resonance_kernel,
    tpa_amplitude,
    tpa_grid,
    tpa_probability,
    tpa_probability_expanded,
    tpa_probability_pulsed,
)
from .oracle import (
    BruteForceEvaluator,
    OracleConfig,
    ResolutionError,
    brute_force_tpa,
    certify_against_closed_form,
    integrate_joint_spectrum,
    temporal_wavefunction,
)
from .analysis import (
    LineSet,
    ReconstructedLevels,
    RowPeaks,
    SpectrumMap,
    delay_spectrum,
    detect_peaks,
    reconstruct_levels,
    track_lines,
)
from .config import ConfigError, RunConfig, load_config

__version__ = "0.1.0"

__all__ = [
    "SPEED_OF_LIGHT_NM_PER_PS",
    "DomainError",
    "ResonanceError",
    "IntermediateLevel",
    "LevelSystem",
    "SignalNormalization",
    "wavelength_to_omega",
    "omega_to_wavelength",
    "TuningModel",
    "CentralFrequencies",
    "delta_at",
    "central_frequencies",
    "tuning_curve",
    "load_tuning_table_csv",
    "SourceConfig",
    "JointSpectrum",
    "entanglement_time",
    "correlation_regime",
    "joint_spectrum",
    "integration_axes",
    "display_axes",
    "resonance_kernel",
    "tpa_amplitude",
    "tpa_probability",
    "tpa_probability_expanded",
    "tpa_probability_pulsed",
    "tpa_grid",
    "SignalGrid",
    "OracleConfig",
    "ResolutionError",
    "BruteForceEvaluator",
    "brute_force_tpa",
    "temporal_wavefunction",
    "integrate_joint_spectrum",
    "certify_against_closed_form",
    "SpectrumMap",
    "RowPeaks",
    "LineSet",
    "ReconstructedLevels",
    "delay_spectrum",
    "detect_peaks",
    "track_lines",
    "reconstruct_levels",
    "ConfigError",
    "RunConfig",
    "load_config",
]
