import math
from typing import Any, Dict

from config.tolerances import PAPER_BANDS
from experiments.base_experiment import BaseExperiment
from experiments.data_models import BoxModelParams, ExperimentReport
from experiments.ozawa import packet_box_state, sector_containing
from measurement.models import MeasurementModel
from measurement.noise import noise_report


class BoxModelExperiment(BaseExperiment):
    name = "box_model"
    description = "Periodic box: total momentum read off to one lattice spacing"
    params_model = BoxModelParams
    fit_fields = [("eq_2_27_product_conditioned", None), ("eq_2_27_sector_probability", None)]

    def prepare(self) -> Dict[str, Any]:
        state, x2_wf, layout = packet_box_state(self.params)
        sector = sector_containing(layout, self.params.c)
        conditioned, probability = state.reduce(0, sector)
        return {'state': state, 'x2_wf': x2_wf, 'layout': layout, 'conditioned': conditioned,
                'probability': probability}

    def analyze(self, states: Dict[str, Any]) -> ExperimentReport:
        p = self.params
        report = self.new_report()
        L, alpha, hbar = p.box_length, p.packet_width, p.hbar
        lattice = states['x2_wf'].grid.momentum_spacing

        model = MeasurementModel(pointer_x="q + c", pointer_p="P", target_x="x1", target_p="P",
                                 constants={'c': p.c}, hbar=hbar)
        unconditioned = noise_report(model, states['state'], 1.0, momentum_resolution=lattice)
        conditioned = noise_report(model, states['conditioned'], states['probability'], momentum_resolution=lattice)
        report.noise = {'unconditioned': unconditioned, 'conditioned': conditioned}

        eps_lo, eps_hi = PAPER_BANDS['box_epsilon_fraction']
        prod_lo, prod_hi = PAPER_BANDS['box_product']
        product = unconditioned.epsilon_x * lattice
        conditioned_product = conditioned.epsilon_x * lattice
        bound = alpha * lattice

        report.record('momentum_lattice_spacing', lattice)
        report.record('eq_2_23_epsilon_P', 2.0 * math.pi * hbar / L)
        report.record('eq_2_24_epsilon_x1', unconditioned.epsilon_x)
        report.record('eq_2_24_uniform_estimate', L / math.sqrt(12.0))
        report.record('eq_2_24_within_band', eps_lo * L <= unconditioned.epsilon_x <= eps_hi * L)
        report.record('eq_2_25_product', product)
        report.record('eq_2_25_within_band', prod_lo * hbar <= product <= prod_hi * hbar)
        report.record('eq_2_26_epsilon_x1_conditioned', conditioned.epsilon_x)
        report.record('eq_2_27_bound', bound)
        report.record('eq_2_27_product_conditioned', conditioned_product)
        report.record('eq_2_27_below_bound', conditioned_product <= bound * (1 + 1e-9))
        report.record('eq_2_27_sector_probability', states['probability'])
        report.record('eq_2_27_expected_probability', alpha / L)

        evades = conditioned_product < 0.5 * hbar
        report.set_evasion(evades, states['probability'], conditioned_product,
                           channel="epsilon(x1) * 2 pi hbar / L")
        return report


def run_box_model(box_length: float = 100.0, packet_width: float = 0.5, c: float = 0.0,
                  **overrides) -> ExperimentReport:
    params = {'box_length': box_length, 'packet_width': packet_width, 'c': c, **overrides}
    return BoxModelExperiment(params).run()
