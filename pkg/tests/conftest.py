import numpy as np
import pytest

from etpa import (
    LevelSystem,
    SourceConfig,
    TuningModel,
    delay_spectrum,
    detect_peaks,
    reconstruct_levels,
    tpa_grid,
    track_lines,
)

# validation example systems: two and four intermediate levels, 405 nm pump,
# 0.87 ps correlation time, linear tuning 2 rad/ps per degC about 25 degC
TWO_LEVEL_NM = (563.0, 612.0)
FOUR_LEVEL_NM = (507.0, 534.0, 576.0, 635.0)


@pytest.fixture(scope="session")
def cw_source():
    return SourceConfig(
        pump_wavelength=405.0,
        entanglement_time=0.87,
        pump_duration=None,
        tuning=TuningModel(kind="linear", degenerate_temperature=25.0, coefficients=(2.0,)),
    )


@pytest.fixture(scope="session")
def two_level_system():
    return LevelSystem.from_wavelengths(TWO_LEVEL_NM, 405.0)


@pytest.fixture(scope="session")
def four_level_system():
    return LevelSystem.from_wavelengths(FOUR_LEVEL_NM, 405.0)


def run_pipeline(levels, config):
    grid = tpa_grid(levels, config)
    spectrum = delay_spectrum(grid)
    peaks = detect_peaks(spectrum)
    lines = track_lines(peaks, config.tuning)
    recon = reconstruct_levels(lines, config.omega0)
    return grid, spectrum, peaks, lines, recon


@pytest.fixture(scope="session")
def two_level_pipeline(two_level_system, cw_source):
    return run_pipeline(two_level_system, cw_source)


@pytest.fixture(scope="session")
def four_level_pipeline(four_level_system, cw_source):
    return run_pipeline(four_level_system, cw_source)
