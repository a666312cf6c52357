import math

import numpy as np
import pytest

from etpa import (
    DomainError,
    IntermediateLevel,
    LevelSystem,
    ResonanceError,
    SourceConfig,
    TuningModel,
    resonance_kernel,
    tpa_amplitude,
    tpa_grid,
    tpa_probability,
    tpa_probability_expanded,
    tpa_probability_pulsed,
    wavelength_to_omega,
)
from etpa.tpa import _expanded_complex

OMEGA_810 = 2325.495762109695
TE = 0.87


def test_kernel_zero_detuning_limit():
    for a in (0.1, 1.74, -2.0):
        assert resonance_kernel(0.0, a) == pytest.approx(1j * a, rel=1e-15)


def test_kernel_zero_window():
    assert resonance_kernel(123.4, 0.0) == 0.0


def test_kernel_full_turn_null():
    for a in (0.5, 1.74, 3.2):
        x = 2.0 * math.pi / a
        assert abs(resonance_kernel(x, a)) < 1e-14 * abs(a)


def test_kernel_bounded_by_window():
    rng = np.random.default_rng(5)
    x = rng.normal(scale=1500.0, size=500)
    a = rng.uniform(-4.0, 4.0, size=500)
    assert np.all(np.abs(resonance_kernel(x, a)) <= np.abs(a) * (1.0 + 1e-12))


def test_kernel_matches_difference_quotient_high_precision():
    # reference (1 - exp(-i x a))/x evaluated at 50 decimal digits
    import mpmath

    mpmath.mp.dps = 50
    rng = np.random.default_rng(17)
    log_xa = rng.uniform(-6, 3, size=60)
    for exponent in log_xa:
        a = 1.74
        x = (10.0**exponent) / a
        ref = (1 - mpmath.e ** (-1j * mpmath.mpf(x) * a)) / mpmath.mpf(x)
        got = resonance_kernel(x, a)
        err = abs(got - complex(ref)) / abs(complex(ref))
        assert err < 1e-12, f"x*a = 10^{exponent}"


def _single(et_offset=1020.2441443003459):
    return LevelSystem(
        intermediate=(IntermediateLevel(OMEGA_810 + et_offset),),
        final_energy=2.0 * OMEGA_810,
    )


def test_amplitude_single_level_degenerate_zero_delay():
    system = _single()
    amp = tpa_amplitude(system, OMEGA_810, OMEGA_810, TE, 0.0)
    x = system.energies[0] - OMEGA_810
    assert amp == pytest.approx(2.0 * resonance_kernel(x, 2.0 * TE), rel=1e-14)


def test_amplitude_first_window_closes_at_twice_te():
    system = _single()
    amp = tpa_amplitude(system, OMEGA_810, OMEGA_810, TE, 2.0 * TE)
    x = system.energies[0] - OMEGA_810
    assert amp == pytest.approx(resonance_kernel(x, 4.0 * TE), rel=1e-13)


def test_amplitude_resonance_gate():
    system = LevelSystem(
        intermediate=(IntermediateLevel(3000.0),),
        final_energy=2.0 * OMEGA_810 + 1.0,
    )
    with pytest.raises(ResonanceError, match=str(system.final_energy)):
        tpa_amplitude(system, OMEGA_810, OMEGA_810, TE, 0.0)


@pytest.fixture
def cw(cw_source):
    return cw_source


def test_probability_nonnegative(two_level_system, cw):
    rng = np.random.default_rng(23)
    for _ in range(50):
        temp = rng.uniform(-25.0, 75.0)
        tau = rng.uniform(-2.0 * TE, 2.0 * TE)
        assert tpa_probability(two_level_system, cw, temp, tau) >= 0.0


def test_probability_even_in_delay_at_degeneracy(two_level_system, cw):
    taus = np.linspace(-2.0 * TE, 2.0 * TE, 801)
    p = tpa_probability(two_level_system, cw, 25.0, taus)
    assert np.max(np.abs(p - p[::-1])) / p.max() < 1e-10


def test_probability_dipole_scaling(two_level_system, cw):
    doubled = LevelSystem(
        intermediate=tuple(
            IntermediateLevel(lev.energy, 2.0 * lev.dipole) for lev in two_level_system.intermediate
        ),
        final_energy=two_level_system.final_energy,
    )
    taus = np.linspace(-1.5, 1.5, 101)
    base = tpa_probability(two_level_system, cw, 40.0, taus)
    scaled = tpa_probability(doubled, cw, 40.0, taus)
    assert np.allclose(scaled, 4.0 * base, rtol=1e-12)
    assert np.argmax(scaled) == np.argmax(base)


def test_zero_delay_is_local_maximum_single_level(cw):
    system = _single()
    taus = np.linspace(-0.05, 0.05, 501)
    p = tpa_probability(system, cw, 25.0, taus)
    mid = len(taus) // 2
    assert p[mid] >= p[mid - 1] and p[mid] >= p[mid + 1]
    assert p[mid] == p.max()


def test_cw_probability_requires_pump_resonance(cw):
    detuned = LevelSystem(
        intermediate=(IntermediateLevel(3000.0),),
        final_energy=2.0 * OMEGA_810 + 5.0,
    )
    with pytest.raises(ResonanceError):
        tpa_probability(detuned, cw, 25.0, 0.0)


def test_grid_normalized_max_is_one(two_level_pipeline):
    grid = two_level_pipeline[0]
    assert grid.values.max() == pytest.approx(1.0, abs=0.0)
    assert grid.raw_max > 0.0
    assert grid.values.shape == (101, 4096)


def test_grid_rejects_nonfinite_ranges(two_level_system, cw):
    with pytest.raises(DomainError):
        tpa_grid(two_level_system, cw, tau_range=(-1.0, float("inf")), n_tau=16, n_temp=4)


def test_grid_worker_determinism(two_level_system, cw):
    grids = [
        tpa_grid(two_level_system, cw, n_tau=512, n_temp=21, workers=w) for w in (1, 2, 8)
    ]
    base = grids[0].values.tobytes()
    assert grids[1].values.tobytes() == base
    assert grids[2].values.tobytes() == base


@pytest.mark.parametrize("wavelengths", [(563.0,), (563.0, 612.0), (507.0, 534.0, 576.0, 635.0)])
def test_expanded_form_matches_closed_form(wavelengths):
    rng = np.random.default_rng(len(wavelengths))
    dipoles = rng.normal(size=len(wavelengths)) + 1j * rng.normal(size=len(wavelengths))
    system = LevelSystem.from_wavelengths(wavelengths, 405.0, dipoles=list(dipoles))
    taus = np.linspace(-2.0 * TE, 2.0 * TE, 64)
    worst = 0.0
    for delta in np.linspace(-100.0, 100.0, 64):
        amp = tpa_amplitude(system, OMEGA_810 + delta, OMEGA_810 - delta, TE, taus)
        closed = np.abs(amp) ** 2
        expanded = tpa_probability_expanded(system, OMEGA_810, delta, TE, taus)
        scale = closed.max()
        worst = max(worst, float(np.max(np.abs(expanded - closed))) / scale)
        mask = closed > 1e-6 * scale
        assert np.allclose(expanded[mask], closed[mask], rtol=1e-9)
    assert worst < 1e-9


def test_expanded_form_single_level_binomial_identity():
    system = _single()
    taus = np.linspace(-1.0, 1.0, 33)
    for delta in (0.0, 37.0):
        amp = tpa_amplitude(system, OMEGA_810 + delta, OMEGA_810 - delta, TE, taus)
        expanded = tpa_probability_expanded(system, OMEGA_810, delta, TE, taus)
        assert np.allclose(expanded, np.abs(amp) ** 2, rtol=1e-9)


def test_expanded_form_imaginary_residue(four_level_system):
    taus = np.linspace(-1.5, 1.5, 64)
    total = _expanded_complex(four_level_system, OMEGA_810, 42.0, TE, taus)
    assert np.max(np.abs(total.imag)) < 1e-10 * np.max(np.abs(total.real))


def test_expanded_form_singular_detuning_refused():
    system = _single(et_offset=50.0)
    with pytest.raises(DomainError):
        tpa_probability_expanded(system, OMEGA_810, 50.0, TE, 0.0)


def _pulsed_source(tp, degenerate_frequency=None):
    return SourceConfig(
        pump_wavelength=405.0,
        entanglement_time=TE,
        pump_duration=tp,
        tuning=TuningModel(kind="linear", degenerate_temperature=25.0, coefficients=(2.0,)),
        degenerate_frequency=degenerate_frequency,
    )


def test_pulsed_ratio_constant_over_grid(two_level_system, cw):
    pulsed = _pulsed_source(4.0)
    taus = np.linspace(-1.7, 1.7, 23)
    ratios = []
    for temp in np.linspace(-20.0, 70.0, 7):
        p_cw = tpa_probability(two_level_system, cw, temp, taus)
        p_pu = tpa_probability_pulsed(two_level_system, pulsed, temp, taus)
        ratios.append(p_pu / p_cw)
    ratios = np.concatenate(ratios)
    assert np.max(np.abs(ratios / ratios[0] - 1.0)) < 1e-12
    assert ratios[0] == pytest.approx(math.sqrt(2.0 * math.pi) * 4.0, rel=1e-12)


def test_pulsed_signal_doubles_with_pump_duration(two_level_system):
    base = tpa_probability_pulsed(two_level_system, _pulsed_source(2.0), 40.0, 0.5)
    doubled = tpa_probability_pulsed(two_level_system, _pulsed_source(4.0), 40.0, 0.5)
    assert doubled == pytest.approx(2.0 * base, rel=1e-12)


def test_pulsed_off_resonant_pump_suppression():
    # the pair stays resonant with the final level in both configurations;
    # only the pump of the second one is detuned from the pair sum by d
    d = 0.35
    tp = 4.0
    offset = 1000.0

    def run(omega0):
        system = LevelSystem(
            intermediate=(IntermediateLevel(omega0 + offset),),
            final_energy=2.0 * omega0,
        )
        config = _pulsed_source(tp, degenerate_frequency=omega0)
        cf = config.central_frequencies(30.0)
        return tpa_probability_pulsed(system, config, 30.0, 0.3), cf.signal * cf.idler

    p_resonant, pref_resonant = run(OMEGA_810)  # pump detuning 0
    p_shifted, pref_shifted = run(OMEGA_810 + d / 2.0)  # pump detuning -d
    suppression = (p_shifted / pref_shifted) / (p_resonant / pref_resonant)
    assert suppression == pytest.approx(math.exp(-2.0 * tp * tp * d * d), rel=1e-9)


def test_pulsed_requires_finite_pump(two_level_system, cw):
    with pytest.raises(DomainError):
        tpa_probability_pulsed(two_level_system, cw, 25.0, 0.0)
