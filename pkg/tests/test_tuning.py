import numpy as np
import pytest

from etpa import (
    DomainError,
    TuningModel,
    central_frequencies,
    delta_at,
    load_tuning_table_csv,
    tuning_curve,
    wavelength_to_omega,
)

OMEGA_810 = 2325.495762109695


@pytest.fixture
def linear():
    return TuningModel(kind="linear", degenerate_temperature=25.0, coefficients=(2.0,))


def test_delta_vanishes_at_degenerate_temperature(linear):
    assert delta_at(linear, 25.0) == 0.0


def test_delta_linear_values(linear):
    assert delta_at(linear, 75.0) == pytest.approx(100.0, rel=1e-14)
    assert delta_at(linear, -25.0) == pytest.approx(-100.0, rel=1e-14)


def test_central_frequencies_at_degeneracy(linear):
    cf = central_frequencies(linear, OMEGA_810, 25.0)
    assert cf.signal == cf.idler == OMEGA_810


def test_central_frequencies_detuned(linear):
    cf = central_frequencies(linear, OMEGA_810, 75.0)
    assert cf.signal == pytest.approx(2425.495762109695, rel=1e-14)
    assert cf.idler == pytest.approx(2225.495762109695, rel=1e-14)
    # frozen from 2 pi c / (omega0 +- 100)
    from etpa import omega_to_wavelength

    assert omega_to_wavelength(cf.signal) == pytest.approx(776.6047653987463, rel=1e-13)
    assert omega_to_wavelength(cf.idler) == pytest.approx(846.396384742254, rel=1e-13)


def test_sum_rule_random_models():
    rng = np.random.default_rng(11)
    for _ in range(200):
        deg = rng.uniform(1000.0, 4000.0)
        coeffs = tuple(c * s for c, s in zip(rng.normal(scale=2.0, size=3), (1.0, 1e-2, 1e-4)))
        coeffs = coeffs[: rng.integers(1, 4)]
        model = TuningModel(kind="polynomial", degenerate_temperature=rng.uniform(0, 60), coefficients=coeffs)
        temp = rng.uniform(-40.0, 120.0)
        cf = central_frequencies(model, deg, temp)
        # structural identity is exact; the derived sum is exact to 1 ulp/side
        assert cf.total == 2.0 * deg
        ulp = np.spacing(max(abs(cf.signal), abs(cf.idler)))
        assert abs(cf.signal + cf.idler - 2.0 * deg) <= 2.0 * ulp


def test_coefficient_sign_swap_exchanges_branches(linear):
    flipped = TuningModel(kind="linear", degenerate_temperature=25.0, coefficients=(-2.0,))
    for temp in (0.0, 40.0, 75.0):
        a = central_frequencies(linear, OMEGA_810, temp)
        b = central_frequencies(flipped, OMEGA_810, temp)
        assert a.signal == pytest.approx(b.idler, rel=1e-15)
        assert a.idler == pytest.approx(b.signal, rel=1e-15)


def test_tabulated_matches_polynomial_at_samples():
    poly = TuningModel(kind="polynomial", degenerate_temperature=25.0, coefficients=(2.0, 0.01))
    temps = np.linspace(-25.0, 75.0, 21)
    deltas = np.asarray(delta_at(poly, temps))
    tab = TuningModel(
        kind="tabulated",
        degenerate_temperature=25.0,
        coefficients=(),
        table_temperatures=tuple(temps),
        table_deltas=tuple(deltas),
    )
    for t, d in zip(temps, deltas):
        assert abs(delta_at(tab, float(t)) - d) < 1e-9


def test_tabulated_refuses_extrapolation():
    tab = TuningModel(
        kind="tabulated",
        degenerate_temperature=25.0,
        coefficients=(),
        table_temperatures=(0.0, 25.0, 50.0),
        table_deltas=(-50.0, 0.0, 50.0),
    )
    with pytest.raises(DomainError):
        delta_at(tab, 60.0)
    with pytest.raises(DomainError):
        delta_at(tab, -1.0)


def test_tabulated_must_pass_through_zero():
    with pytest.raises(DomainError):
        TuningModel(
            kind="tabulated",
            degenerate_temperature=25.0,
            coefficients=(),
            table_temperatures=(0.0, 50.0),
            table_deltas=(10.0, 60.0),
        )


def test_tuning_curve_meets_at_degenerate_wavelength(linear):
    curve = tuning_curve(linear, OMEGA_810, (20.0, 30.0), 11)
    row = curve[np.argmin(np.abs(curve[:, 0] - 25.0))]
    assert row[1] == pytest.approx(810.0, rel=1e-12)
    assert row[2] == pytest.approx(810.0, rel=1e-12)


def test_tuning_curve_signal_branch_monotone(linear):
    curve = tuning_curve(linear, OMEGA_810, (25.0, 125.0), 51)
    assert np.all(np.diff(curve[:, 1]) < 0)  # signal wavelength falls as detuning grows


def test_tuning_curve_frequency_sum(linear):
    curve = tuning_curve(linear, OMEGA_810, (-25.0, 75.0), 31)
    freq_sum = wavelength_to_omega(1.0) / curve[:, 1] + wavelength_to_omega(1.0) / curve[:, 2]
    assert np.allclose(freq_sum, 2.0 * OMEGA_810, rtol=1e-12)


def test_tuning_curve_needs_two_points(linear):
    with pytest.raises(DomainError):
        tuning_curve(linear, OMEGA_810, (0.0, 50.0), 1)


def test_csv_loader_round_trip(tmp_path):
    path = tmp_path / "tuning.csv"
    path.write_text(
        "temperature_C,delta_rad_per_ps\n0.0,-50.0\n25.0,0.0\n50.0,50.0\n"
    )
    model = load_tuning_table_csv(path)
    assert model.kind == "tabulated"
    assert model.degenerate_temperature == pytest.approx(25.0)
    assert delta_at(model, 37.5) == pytest.approx(25.0)


def test_csv_loader_requires_header(tmp_path):
    path = tmp_path / "tuning.csv"
    path.write_text("0.0,-50.0\n25.0,0.0\n50.0,50.0\n")
    with pytest.raises(DomainError):
        load_tuning_table_csv(path)


def test_csv_loader_requires_monotone_temperatures(tmp_path):
    path = tmp_path / "tuning.csv"
    path.write_text("t,d\n0.0,-50.0\n50.0,50.0\n25.0,0.0\n")
    with pytest.raises(DomainError):
        load_tuning_table_csv(path)


def test_csv_loader_requires_zero_crossing(tmp_path):
    path = tmp_path / "tuning.csv"
    path.write_text("t,d\n0.0,10.0\n50.0,60.0\n")
    with pytest.raises(DomainError):
        load_tuning_table_csv(path)
