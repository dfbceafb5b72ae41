import logging
import math
import time
from typing import Any, Callable, Dict, List

from config.settings import settings
from config.tolerances import PAPER_BANDS, TOLERANCES
from core.errors import LabError
from core.grid import Grid1D, gaussian_packet, plane_wave, reduce, sector_probability
from experiments import (
    run_box_model,
    run_diffraction,
    run_ozawa_position,
    run_spin_epr,
)
from measurement.entanglement import default_pair_grid, entanglement_criterion, squeezed_pair
from measurement.kennard import kennard_check, kennard_suite
from runner.config import RunConfig
from runner.sweep import run_sweep

logger = logging.getLogger(__name__)


def _result(criterion: int, name: str, failures: List[str], details: Dict[str, Any]) -> Dict[str, Any]:
    return {
        'criterion': criterion,
        'name': name,
        'passed': not failures,
        'details': details,
        'failures': failures,
    }


def _check(failures: List[str], condition: bool, message: str):
    if not condition:
        failures.append(message)


class AcceptanceSuite:
    def __init__(self, jobs: int = None):
        self.jobs = jobs or settings.JOBS
        self.logger = logging.getLogger(__name__)

    @property
    def criteria(self) -> List[Callable[[], Dict[str, Any]]]:
        return [
            self.spin_exactness,
            self.kennard_random_states,
            self.diffraction_scaling,
            self.evasion_probability,
            self.box_model,
            self.preparation_closure,
            self.reduction_consistency,
            self.entanglement,
            self.slit_two_body,
        ]

    def sweep(self, scenario: str, parameter: str, values: List[float], **params):
        cfg = RunConfig(scenario=scenario, params=params, sweep={'parameter': parameter, 'values': values},
                        jobs=self.jobs)
        return run_sweep(cfg)

    def spin_exactness(self) -> Dict[str, Any]:
        r = run_spin_epr().results
        exact = TOLERANCES['exact']
        failures = []
        _check(failures, r['eq_3_4_total_spin_norm'] <= exact, "S_y does not annihilate the singlet")
        _check(failures, abs(r['eq_3_5_correlator'] + 0.25 * settings.HBAR ** 2) <= exact, "y-y correlator is not -hbar^2/4")
        _check(failures, abs(r['eq_3_5_product_of_means']) <= exact, "product of y means is not zero")
        _check(failures, r['eq_3_6_dual_basis_error'] <= exact, "y- and z-basis singlets differ")
        _check(failures, abs(r['eq_3_6_basis_swap_overlap'] - 1.0) <= exact, "singlet changes under the u-v basis swap")
        _check(failures, abs(r['eq_3_5_total_spin_square']) <= exact, "<S_y^2> on the singlet is not zero")
        _check(failures, abs(r['eq_3_9_overlap'] - 0.5) <= exact, "overlap of v-v+ and u-u+ is not 1/2")
        _check(failures, r['eq_3_10_coefficient_error'] <= exact, "v-basis coefficients of u+u- are off")
        details = {key: r[key] for key in ('eq_3_4_total_spin_norm', 'eq_3_5_correlator', 'eq_3_9_overlap')}
        return _result(1, "spin EPR exactness", failures, details)

    def kennard_random_states(self) -> Dict[str, Any]:
        df = kennard_suite(n_states=500, seed=settings.SEED)
        grid = Grid1D(settings.GRID_POINTS, 200.0)
        _, _, product, _ = kennard_check(gaussian_packet(grid, 0.0, 2.0))
        half = 0.5 * grid.hbar
        failures = []
        _check(failures, bool(df['passed'].all()), f"{int((~df['passed']).sum())} random states violate Kennard")
        _check(failures, abs(product - half) <= 1e-6 * half, f"minimal Gaussian product {product} does not saturate")
        return _result(2, "Kennard suite", failures,
                       {'states': len(df), 'min_product': float(df['product'].min()), 'gaussian_product': product})

    def diffraction_scaling(self) -> Dict[str, Any]:
        result = self.sweep("diffraction", "screen_distance", [1e3, 1e4, 1e5, 1e6],
                            detector_position=10.0, simulate_grid=False)
        product_slope = result.fits['eq_2_3_product']['slope']
        ring_slope = result.fits['eq_2_10_ring_probability']['slope']
        far = run_diffraction({'aperture': "gaussian", 'screen_distance': 1000.0}).results
        failures = []
        _check(failures, abs(product_slope + 1.0) <= 0.02, f"product slope {product_slope:.4f} is not -1")
        _check(failures, abs(ring_slope + 2.0) <= 0.05, f"ring probability slope {ring_slope:.4f} is not -2")
        difference = far['paraxial_relative_difference']
        _check(failures, difference is not None and difference <= PAPER_BANDS['farfield_rel'],
               f"paraxial and far-field interval probabilities differ by {difference}")
        return _result(3, "diffraction scaling", failures,
                       {'product_slope': product_slope, 'ring_slope': ring_slope, 'farfield_difference': difference})

    def evasion_probability(self) -> Dict[str, Any]:
        report = run_ozawa_position(box_length=10.0, packet_width=0.1, conditioning="favorable")
        r = report.results
        failures = []
        expected = r['eq_2_16_expected_probability']
        _check(failures, abs(r['eq_2_16_sector_probability'] - expected) <= 1e-6,
               f"sector probability {r['eq_2_16_sector_probability']} is not {expected}")
        _check(failures, abs(r['mc_z_score']) <= 3.0, f"Monte Carlo frequency off by {r['mc_z_score']:.2f} standard errors")
        _check(failures, r['eq_2_13_product_conditioned'] == 0.0 and report.evasion['flag'],
               "conditioned product is not a flagged clear evasion")
        _check(failures, bool(r['square_estimate_within_band']),
               f"unconditioned epsilon(x1) is {r['square_estimate_relative_difference']:.3%} off L/sqrt(3)")
        return _result(4, "evasion probability law", failures,
                       {key: r[key] for key in ('eq_2_16_sector_probability', 'mc_sector_probability',
                                                'mc_z_score', 'eq_2_14_epsilon_x1_unconditioned')})

    def box_model(self) -> Dict[str, Any]:
        box_length, alpha = 100.0, 0.5
        r = run_box_model(box_length=box_length, packet_width=alpha).results
        lo, hi = PAPER_BANDS['box_product']
        hbar = settings.HBAR
        # fixed spacing of 1/16 across the sweep
        sweep = self.sweep("box_model", "box_length", [64.0, 512.0, 8192.0], packet_width=alpha, grid_points=16)
        slope = sweep.fits['eq_2_27_product_conditioned']['slope']
        bound = 2.0 * math.pi * hbar * alpha / box_length
        measured = r['eq_2_27_product_conditioned']
        failures = []
        _check(failures, lo * hbar <= r['eq_2_25_product'] <= hi * hbar,
               f"unconditioned product {r['eq_2_25_product']:.4f} outside the band")
        _check(failures, 0.0 < measured <= bound * (1 + 1e-6),
               f"measured conditioned product {measured:.6f} not within (0, 2 alpha pi hbar / L = {bound:.6f}]")
        _check(failures, measured < 0.5 * hbar, f"measured conditioned product {measured:.6f} is not below hbar/2")
        _check(failures, abs(slope + 1.0) <= 0.02, f"measured conditioned product slope {slope:.4f} is not -1")
        for row in sweep.rows:
            row_bound = 2.0 * math.pi * hbar * alpha / row['box_length']
            _check(failures, row['eq_2_27_product_conditioned'] <= row_bound * (1 + 1e-6),
                   f"measured conditioned product exceeds the bound at L={row['box_length']}")
        return _result(5, "box model", failures,
                       {'product': r['eq_2_25_product'], 'conditioned_product': measured, 'bound': bound,
                        'slope': slope})

    def preparation_closure(self) -> Dict[str, Any]:
        alphas = [0.01, 0.1, 1.0]
        result = self.sweep("preparation", "packet_width", alphas, preparation_width=0.1)
        half = 0.5 * settings.HBAR
        band = PAPER_BANDS['preparation_rel']
        failures = []
        for row in result.rows:
            for key in ('eq_2_36_product', 'eq_2_37_product'):
                _check(failures, abs(row[key] - half) <= band * half,
                       f"{key} = {row[key]:.6f} at alpha={row['packet_width']}")
            _check(failures, not row['evasion'], f"evasion flagged at alpha={row['packet_width']}")
        return _result(6, "preparation loophole closure", failures,
                       {'products': [row['eq_2_36_product'] for row in result.rows]})

    def reduction_consistency(self) -> Dict[str, Any]:
        grid = Grid1D(settings.GRID_POINTS, 400.0)
        wave = plane_wave(grid, 5 * grid.momentum_spacing)
        half = 0.5 * grid.hbar
        failures, products = [], {}
        for spacings in (8, 16, 32, 64, 128):
            width = spacings * grid.spacing
            interval = (0.0, width)
            probability = sector_probability(wave, interval)
            reduced, _ = reduce(wave, interval)
            _, _, product, _ = kennard_check(reduced)
            products[spacings] = product
            _check(failures, product >= half * (1 - TOLERANCES['kennard_slack']),
                   f"post-reduction product {product:.4f} below hbar/2 at {spacings} spacings")
            _check(failures, abs(probability - width / grid.length) <= 1e-9,
                   f"interval probability {probability} is not {width / grid.length}")
        return _result(7, "reduction consistency", failures, {'products': products})

    def entanglement(self) -> Dict[str, Any]:
        grid = default_pair_grid()
        hbar = grid.hbar
        product_total, product_entangled = entanglement_criterion(squeezed_pair(grid, 0.0))
        squeezed_total, squeezed_entangled = entanglement_criterion(squeezed_pair(grid, 1.0))
        failures = []
        _check(failures, abs(product_total - 2.0 * hbar) <= 1e-9, f"product state sum {product_total} is not 2 hbar")
        _check(failures, not product_entangled, "product state flagged entangled")
        _check(failures, abs(squeezed_total - 2.0 * hbar * math.exp(-2.0)) <= 1e-6,
               f"squeezed sum {squeezed_total} is not 2 hbar e^-2")
        _check(failures, squeezed_entangled, "squeezed state not flagged entangled")
        return _result(8, "entanglement criterion", failures,
                       {'product_sum': product_total, 'squeezed_sum': squeezed_total})

    def slit_two_body(self) -> Dict[str, Any]:
        result = self.sweep("slit_two_body", "diffraction.screen_distance", [1e2, 1e3, 1e4])
        fit = result.fits['eq_2_34_sector_probability_vs_eq_2_34_L_tilde']
        failures = []
        for row in result.rows:
            distance = row['diffraction.screen_distance']
            _check(failures, bool(row['momenta_conserved']), f"momenta drift at L={distance}")
            for key in ('P_x_relative_error', 'P_y_relative_error'):
                _check(failures, row[key] <= TOLERANCES['conservation'],
                       f"(P_x, P_y) off (p, 0) by {row[key]:.2e} relative ({key}) at L={distance}")
            _check(failures, row['eq_2_31_product_y'] == 0.0 and row['eq_2_31_product_x'] == 0.0,
                   "conditioned products are not identically zero")
        _check(failures, abs(fit['slope'] + 1.0) <= 0.05, f"sector probability slope {fit['slope']:.4f} is not -1")
        return _result(9, "two-body slit", failures, {'slope': fit['slope']})

    def run_all(self) -> List[Dict[str, Any]]:
        results = []
        for criterion in self.criteria:
            started = time.perf_counter()
            try:
                result = criterion()
            except (LabError, KeyError) as e:
                self.logger.error(f"{criterion.__name__} failed: {str(e)}")
                result = _result(len(results) + 1, criterion.__name__, [str(e)], {})
            result['seconds'] = round(time.perf_counter() - started, 3)
            self.log_result(result)
            results.append(result)
        return results

    def log_result(self, result: Dict[str, Any]):
        status = "PASS" if result['passed'] else "FAIL"
        self.logger.info(f"Criterion {result['criterion']} ({result['name']}): {status}")
        for failure in result['failures']:
            self.logger.warning(f"  - {failure}")
