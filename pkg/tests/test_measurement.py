import math

import numpy as np
import pytest
from hypothesis import given
import hypothesis.strategies as st

from core.errors import BoundaryError, LabError, ObservableError
from core.grid import Grid1D, GridWaveFn, TwoBodyWaveFn, gaussian_packet, plane_wave
from measurement.entanglement import default_pair_grid, entanglement_criterion, squeezed_pair
from measurement.kennard import kennard_check, kennard_suite, random_gaussian_mixture
from measurement.models import Coupling, MeasurementModel, NoiseReport
from measurement.noise import (
    indirect_error_via_q,
    mean_and_variance,
    noise_report,
    prepare,
    rms_disturbance,
    rms_noise,
    unbiased_check,
)
from measurement.observables import ObservableParser, canonical_commutator, parse_observable


@pytest.fixture
def pair():
    grid = Grid1D(256, 32.0)
    return TwoBodyWaveFn.product(gaussian_packet(grid, 0.0, 2.0), gaussian_packet(grid, 0.0, 1.0))


class TestObservableParser:
    def test_single_coordinate(self):
        observable = parse_observable("x2")
        assert observable.kind == "position"
        assert observable.terms == ((1.0, "x2"),)
        assert observable.offset == 0.0

    def test_constants_and_numbers(self):
        assert parse_observable("q + c", {"c": 2.5}).offset == 2.5
        assert parse_observable("x2 + 0.5").offset == 0.5
        assert parse_observable("x2 - 1e-3").offset == pytest.approx(-1e-3)

    def test_coefficients(self):
        observable = parse_observable("2*x1 - x2")
        assert observable.weights() == (2.0, -1.0)
        assert parse_observable("q").weights() == (1.0, -1.0)

    @pytest.mark.parametrize("text", ["absent", "none", "  ", None])
    def test_absent_pointer(self, text):
        assert parse_observable(text) is None

    def test_identity_suffix(self):
        assert parse_observable("x1 identity").terms == ((1.0, "x1"),)

    @pytest.mark.parametrize("text", ["x1 + p1", "x1 + y", "x1 x2", "3", "x1 +* 2"])
    def test_rejects_malformed(self, text):
        with pytest.raises(ObservableError):
            parse_observable(text)

    def test_clean_text(self):
        assert ObservableParser.clean_text("  q   +  c ") == "q + c"

    @given(st.floats(min_value=-1e3, max_value=1e3, allow_nan=False))
    def test_constant_offset(self, value):
        assert parse_observable("x2 + c", {"c": value}).offset == value


@pytest.mark.parametrize("a, b, expected", [
    ("x1", "p1", 1j),
    ("x1", "P", 1j),
    ("x2", "P", 1j),
    ("q", "P", 0j),
    ("x1", "p2", 0j),
    ("p1", "x1", -1j),
    ("x1", "x2", 0j),
])
def test_canonical_commutator(a, b, expected):
    assert canonical_commutator(parse_observable(a), parse_observable(b)) == pytest.approx(expected)


class TestMeasurementModel:
    def test_commuting_pointers(self):
        model = MeasurementModel(pointer_x="q + c", pointer_p="P", target_p="P", constants={"c": 1.0})
        assert model.pointer_x_observable.offset == 1.0
        assert model.describe()['pointer_p'] == "P"

    def test_rejects_non_commuting_pointers(self):
        with pytest.raises(ObservableError):
            MeasurementModel(pointer_x="x1", pointer_p="p1")

    def test_rejects_wrong_kind(self):
        with pytest.raises(ObservableError):
            MeasurementModel(pointer_x="p1")

    def test_missing_pointer(self):
        model = MeasurementModel(pointer_x="x2")
        with pytest.raises(ObservableError):
            model.pointer_for(model.target("p1"))

    def test_prepare_coupling_needs_width(self):
        with pytest.raises(ObservableError):
            Coupling("prepare")


class TestNoiseReport:
    def test_products_and_flags(self):
        report = NoiseReport(epsilon_x=0.0, epsilon_p=None, eta_x=0.0, eta_p=1.0, delta_x=1.0, delta_p=0.5)
        assert report.product_ex_etap == 0.0
        assert report.product_ex_ep is None
        flags = report.evasion_flags
        assert flags['ex_etap'] is True
        assert flags['ex_ep'] is None
        assert flags['ep_etax'] is None
        assert flags['dx_dp'] is False
        assert report.evasion

    def test_vanishing_momentum_rms_uses_resolution(self):
        report = NoiseReport(epsilon_x=1.0, epsilon_p=0.0, eta_x=0.0, eta_p=0.0, delta_x=1.0, delta_p=1.0,
                             momentum_resolution=2.0)
        assert report.product_ex_ep == 0.0
        assert report.evasion_flags['ex_ep'] is False
        assert not report.evasion

    def test_to_dict_has_fixed_fields(self):
        report = NoiseReport(epsilon_x=1.0, epsilon_p=1.0, eta_x=0.0, eta_p=1.0, delta_x=1.0, delta_p=1.0)
        payload = report.to_dict()
        assert payload['product_ex_ep'] == 1.0
        assert payload['evasion'] is False
        assert {'evasion_ex_ep', 'evasion_ex_etap', 'evasion_ep_etax', 'evasion_dx_dp'} <= set(payload)


class TestNoise:
    def test_rms_noise_of_partner_pointer(self, pair):
        model = MeasurementModel(pointer_x="x2")
        assert rms_noise(model, pair, "x1") == pytest.approx(math.sqrt(5.0), rel=1e-6)

    def test_mean_and_variance(self, pair):
        mean, variance = mean_and_variance(parse_observable("x1"), pair)
        assert mean == pytest.approx(0.0, abs=1e-10)
        assert variance == pytest.approx(4.0, rel=1e-6)

    def test_indirect_error(self, pair):
        assert indirect_error_via_q(pair, 0.5) == pytest.approx(math.sqrt(1.25), rel=1e-6)

    def test_unbiased_check(self, pair):
        unbiased, bias = unbiased_check(MeasurementModel(pointer_x="x2"), [pair])
        assert unbiased and bias < 1e-8
        biased, bias = unbiased_check(MeasurementModel(pointer_x="x2 + 1"), [pair])
        assert not biased
        assert bias == pytest.approx(1.0)
        with pytest.raises(LabError):
            unbiased_check(MeasurementModel(pointer_x="x2"), [])

    @given(st.floats(min_value=-3.0, max_value=3.0), st.floats(min_value=0.8, max_value=2.0),
           st.floats(min_value=-3.0, max_value=3.0), st.floats(min_value=0.8, max_value=2.0))
    def test_partner_noise_splits_into_variances_and_offset(self, c1, w1, c2, w2):
        grid = Grid1D(256, 32.0)
        state = TwoBodyWaveFn.product(gaussian_packet(grid, c1, w1), gaussian_packet(grid, c2, w2))
        m1, var1 = mean_and_variance(parse_observable("x1"), state)
        m2, var2 = mean_and_variance(parse_observable("x2"), state)
        noise = rms_noise(MeasurementModel(pointer_x="x2"), state, "x1")
        assert noise ** 2 == pytest.approx(var1 + var2 + (m1 - m2) ** 2, rel=1e-8)

    def test_relative_pointer_is_biased(self):
        grid = Grid1D(256, 32.0)
        state = TwoBodyWaveFn.product(gaussian_packet(grid, 0.0, 2.0), gaussian_packet(grid, 3.0, 1.0))
        unbiased, bias = unbiased_check(MeasurementModel(pointer_x="q"), [state])
        assert not unbiased
        assert bias == pytest.approx(3.0, rel=1e-6)

    def test_target_as_its_own_pointer(self, pair):
        model = MeasurementModel(pointer_x="x1")
        assert rms_noise(model, pair, "x1") == pytest.approx(0.0, abs=1e-12)
        assert unbiased_check(model, [pair])[0]

    def test_no_coupling_no_disturbance(self, pair):
        model = MeasurementModel(pointer_x="x2")
        assert rms_disturbance(model, pair, "p1") == 0.0
        assert prepare(model, pair) is pair

    def test_localization_kick(self, pair):
        width = 1.0
        model = MeasurementModel(pointer_x="x2", coupling=Coupling("prepare", width, "x1", 0.0))
        assert rms_disturbance(model, pair, "x1") == 0.0
        assert rms_disturbance(model, pair, "p1") == pytest.approx(0.5 * pair.hbar / width, rel=1e-6)

    def test_noise_report(self, pair):
        report = noise_report(MeasurementModel(pointer_x="x2"), pair)
        assert report.delta_x == pytest.approx(2.0, rel=1e-6)
        assert report.delta_p == pytest.approx(0.25, rel=1e-6)
        assert report.epsilon_p is None
        assert report.eta_p == 0.0
        assert report.evasion_flags['ex_etap'] is True


class TestKennard:
    def test_minimal_gaussian_saturates(self, grid):
        delta_x, delta_p, product, passed = kennard_check(gaussian_packet(grid, 0.0, 2.0))
        assert passed
        assert delta_x == pytest.approx(2.0, rel=1e-6)
        assert product == pytest.approx(0.5 * grid.hbar, rel=1e-6)

    def test_rejects_seam_support(self, grid):
        with pytest.raises(BoundaryError):
            kennard_check(plane_wave(grid, 0.0))

    def test_rejects_unnormalized(self, grid):
        wf = GridWaveFn(grid, 2.0 * gaussian_packet(grid, 0.0, 2.0).amplitudes, normalized=False)
        with pytest.raises(LabError):
            kennard_check(wf)

    @given(st.integers(min_value=0, max_value=2 ** 32 - 1))
    def test_random_mixtures_satisfy_bound(self, seed):
        grid = Grid1D(1024, 200.0)
        wf = random_gaussian_mixture(grid, np.random.default_rng(seed))
        assert kennard_check(wf)[3]

    def test_suite_is_seeded(self):
        grid = Grid1D(1024, 200.0)
        first = kennard_suite(grid, n_states=20, seed=3)
        second = kennard_suite(grid, n_states=20, seed=3)
        assert first['passed'].all()
        assert list(first.columns) == ['state', 'delta_x', 'delta_p', 'product', 'passed']
        np.testing.assert_array_equal(first['product'].to_numpy(), second['product'].to_numpy())


class TestEntanglement:
    def test_product_state_sits_on_the_bound(self):
        grid = default_pair_grid()
        total, entangled = entanglement_criterion(squeezed_pair(grid, 0.0))
        assert total == pytest.approx(2.0 * grid.hbar, rel=1e-6)
        assert not entangled

    def test_squeezed_state_is_entangled(self):
        grid = default_pair_grid()
        total, entangled = entanglement_criterion(squeezed_pair(grid, 1.0))
        assert total == pytest.approx(2.0 * grid.hbar * math.exp(-2.0), rel=1e-6)
        assert entangled

    @given(st.floats(min_value=0.0, max_value=0.75), st.integers(min_value=-20, max_value=20))
    def test_criterion_ignores_common_translations(self, squeezing, shift):
        state = squeezed_pair(default_pair_grid(), squeezing)
        total, _ = entanglement_criterion(state)
        moved_total, _ = entanglement_criterion(state.translated(shift, shift))
        assert moved_total == pytest.approx(total, abs=1e-10)
