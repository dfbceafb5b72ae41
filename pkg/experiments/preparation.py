import math
from typing import Any, Dict

from config.settings import settings
from config.tolerances import GRID_DEFAULTS, PAPER_BANDS
from core.grid import Grid1D, GridWaveFn, TwoBodyWaveFn, plane_wave
from experiments.base_experiment import BaseExperiment
from experiments.data_models import ExperimentReport, PreparationParams
from experiments.ozawa import pointer_packet
from measurement.models import Coupling, MeasurementModel, NoiseReport
from measurement.noise import mean_and_variance, prepare, rms_disturbance, rms_noise


def prior_axis(width: float, grid_points: int = None, hbar: float = None) -> GridWaveFn:
    """Zero-momentum plane wave over a box much longer than the preparation width."""
    n_points = grid_points or settings.GRID_POINTS
    grid = Grid1D(n_points, GRID_DEFAULTS['preparation_box_factor'] * width,
                  hbar=settings.HBAR if hbar is None else hbar)
    return plane_wave(grid, 0.0)


def preparation_report(model: MeasurementModel, prior: TwoBodyWaveFn) -> NoiseReport:
    """Noise on the prepared state, disturbance relative to the prior."""
    prepared = prepare(model, prior)
    target_x, target_p = model.target(model.target_x), model.target(model.target_p)
    epsilon_p = rms_noise(model, prepared, target_p) if model.pointer_p_observable is not None else None
    _, var_x = mean_and_variance(target_x, prepared)
    _, var_p = mean_and_variance(target_p, prepared)
    return NoiseReport(
        epsilon_x=rms_noise(model, prepared, target_x),
        epsilon_p=epsilon_p,
        eta_x=rms_disturbance(model, prior, target_x),
        eta_p=rms_disturbance(model, prior, target_p),
        delta_x=math.sqrt(var_x),
        delta_p=math.sqrt(var_p),
        hbar=model.hbar,
    )


class PreparationExperiment(BaseExperiment):
    name = "preparation"
    description = "Prepare-then-measure: sharp position, momentum kick"
    params_model = PreparationParams
    fit_fields = [("eq_2_36_eta_p1", None)]

    def prepare(self) -> Dict[str, Any]:
        p = self.params
        # q localized at width alpha, x2 sharp
        relative_prior = TwoBodyWaveFn.product(
            pointer_packet(p.packet_width, p.hbar),
            prior_axis(p.packet_width, p.grid_points, p.hbar),
            frame="relative",
        )
        # x2 localized at width delta_x2, q sharp
        partner_prior = TwoBodyWaveFn.product(
            prior_axis(p.preparation_width, p.grid_points, p.hbar),
            pointer_packet(p.packet_width, p.hbar),
            frame="relative",
        )
        return {'relative_prior': relative_prior, 'partner_prior': partner_prior}

    def analyze(self, states: Dict[str, Any]) -> ExperimentReport:
        p = self.params
        report = self.new_report()
        half = 0.5 * p.hbar
        band = PAPER_BANDS['preparation_rel']

        relative_model = MeasurementModel(
            pointer_x="x2", target_x="x1", target_p="p1",
            coupling=Coupling("prepare", p.packet_width, "q", 0.0), hbar=p.hbar,
        )
        partner_model = MeasurementModel(
            pointer_x="q", pointer_p="P", target_x="x1", target_p="P",
            coupling=Coupling("prepare", p.preparation_width, "x2", 0.0), hbar=p.hbar,
        )
        relative = preparation_report(relative_model, states['relative_prior'])
        partner = preparation_report(partner_model, states['partner_prior'])
        report.noise = {'relative_preparation': relative, 'partner_preparation': partner}

        first = relative.epsilon_x * relative.eta_p
        second = partner.epsilon_x * partner.eta_p
        report.record('eq_2_36_delta_x1', relative.epsilon_x)
        report.record('eq_2_36_eta_p1', relative.eta_p)
        report.record('eq_2_36_expected_eta_p1', p.hbar / (2.0 * p.packet_width))
        report.record('eq_2_36_product', first)
        report.record('eq_2_37_epsilon_x1', partner.epsilon_x)
        report.record('eq_2_37_delta_P', partner.eta_p)
        report.record('eq_2_37_expected_delta_P', p.hbar / (2.0 * p.preparation_width))
        report.record('eq_2_37_product', second)
        report.record('within_band', all(abs(value - half) <= band * half for value in (first, second)))
        report.record('bounded_below', min(first, second) >= half * (1 - band))

        evades = min(first, second) < half * (1 - band)
        report.set_evasion(evades, 1.0, min(first, second), channel="prepared delta_x1 * eta(p1)")
        report.record('conclusion', "clear evasion" if evades else "no clear evasion")
        return report


def run_preparation(alpha: float = 0.1, delta_x2: float = 0.1, **overrides) -> ExperimentReport:
    params = {'packet_width': alpha, 'preparation_width': delta_x2, **overrides}
    return PreparationExperiment(params).run()
