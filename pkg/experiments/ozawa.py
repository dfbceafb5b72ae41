import math
from typing import Any, Dict, Tuple, Union

import numpy as np

from config.settings import settings
from config.tolerances import GRID_DEFAULTS, PAPER_BANDS
from core.errors import GeometryError, ResolutionError
from core.grid import (
    Grid1D,
    GridWaveFn,
    PacketLayout,
    TwoBodyWaveFn,
    born_sample,
    gaussian_packet,
    next_power_of_two,
    packet_layout,
    packet_superposition,
    reduce,
)
from experiments.base_experiment import BaseExperiment
from experiments.data_models import ExperimentReport, OzawaCommutingParams, OzawaPositionParams
from measurement.kennard import kennard_check
from measurement.models import MeasurementModel
from measurement.noise import indirect_error_via_q, noise_report


def packet_axis(length: float, packet_width: float, grid_points: int = None, hbar: float = None) -> Grid1D:
    needed = next_power_of_two(GRID_DEFAULTS['packet_min_spacings'] * length / packet_width)
    n_points = max(needed, grid_points or settings.GRID_POINTS)
    if n_points * GRID_DEFAULTS['pointer_axis_points'] > GRID_DEFAULTS['max_two_body_points']:
        raise ResolutionError(
            f"Resolving packets of width {packet_width} over length {length} needs {n_points} points per axis"
        )
    return Grid1D(n_points, length, hbar=settings.HBAR if hbar is None else hbar)


def pointer_packet(width: float, hbar: float, center: float = 0.0, momentum: float = 0.0) -> GridWaveFn:
    """Narrow Gaussian on a small axis: width = 5 spacings, axis = 64 spacings."""
    n_points = GRID_DEFAULTS['pointer_axis_points']
    spacing = width / 5.0
    grid = Grid1D(n_points, n_points * spacing, center=center, hbar=hbar)
    return gaussian_packet(grid, center, width, momentum)


def packet_box_state(params: Union[OzawaCommutingParams, Any]) -> Tuple[TwoBodyWaveFn, GridWaveFn, PacketLayout]:
    """Uniform packet superposition in x2 over the box times a narrow q packet, in (x2, q) coordinates."""
    grid = packet_axis(params.box_length, params.packet_width, params.grid_points, params.hbar)
    layout = packet_layout(grid, params.packet_width)
    x2_wf = packet_superposition(grid, params.packet_width, "uniform")
    q_wf = pointer_packet(params.relative_width or params.packet_width, params.hbar)
    return TwoBodyWaveFn.product(x2_wf, q_wf, frame="relative"), x2_wf, layout


def sector_containing(layout: PacketLayout, c: float) -> Tuple[float, float]:
    lo, hi = layout.span
    if not lo <= c < hi:
        raise GeometryError(f"c = {c} lies outside the box [{lo}, {hi})")
    return layout.interval(layout.index_of(c))


class OzawaPositionExperiment(BaseExperiment):
    name = "ozawa_position"
    description = "x1 read off from a partner x2 with q unknown"
    params_model = OzawaPositionParams

    def prepare(self) -> Dict[str, Any]:
        p = self.params
        q_grid = packet_axis(2.0 * p.box_length, p.packet_width, p.grid_points, p.hbar)
        layout = packet_layout(q_grid, p.packet_width)
        q_wf = packet_superposition(q_grid, p.packet_width, "uniform")
        x2_wf = pointer_packet(p.pointer_width or p.packet_width, p.hbar)
        state = TwoBodyWaveFn.product(x2_wf, q_wf, frame="relative")
        favorable = layout.interval(layout.index_of(0.0))
        conditioned, probability = state.reduce(1, favorable)
        self.logger.info(f"Built {layout.count} packets of width {p.packet_width} on {q_grid.n_points} points")
        return {
            'state': state,
            'q_wf': q_wf,
            'layout': layout,
            'favorable': favorable,
            'conditioned': conditioned,
            'probability': probability,
        }

    def analyze(self, states: Dict[str, Any]) -> ExperimentReport:
        p = self.params
        report = self.new_report()
        state, conditioned, probability = states['state'], states['conditioned'], states['probability']
        lo, hi = states['favorable']
        resolution = states['q_wf'].grid.momentum_spacing

        model = MeasurementModel(pointer_x="x2", pointer_p="absent", target_x="x1", target_p="p1", hbar=p.hbar)
        unconditioned = noise_report(model, state, 1.0, momentum_resolution=resolution)
        favorable = noise_report(model, conditioned, probability, momentum_resolution=resolution)
        report.noise = {'unconditioned': unconditioned, 'conditioned': favorable}

        square_estimate = p.box_length / math.sqrt(3.0)
        report.record('packet_count', states['layout'].count)
        report.record('eq_2_12_eta_p1', unconditioned.eta_p)
        report.record('eq_2_13_epsilon_x1_conditioned', favorable.epsilon_x)
        report.record('eq_2_13_product_conditioned', favorable.product_ex_etap)
        report.record('eq_2_14_epsilon_x1_unconditioned', unconditioned.epsilon_x)
        report.record('eq_2_14_product_unconditioned', unconditioned.product_ex_etap)
        report.record('square_estimate', square_estimate)
        report.record('square_estimate_relative_difference',
                      abs(unconditioned.epsilon_x - square_estimate) / square_estimate)
        report.record('square_estimate_within_band',
                      abs(unconditioned.epsilon_x - square_estimate) <= PAPER_BANDS['square_estimate_rel'] * square_estimate)
        report.record('eq_2_16_sector_probability', probability)
        report.record('eq_2_16_expected_probability', p.packet_width / (2.0 * p.box_length))

        if p.mc_samples > 0:
            samples = born_sample(state, p.mc_samples, p.seed, axis=1)
            q_grid = states['q_wf'].grid
            hits = q_grid.interval_mask((lo, hi), samples)
            frequency = float(np.mean(hits))
            stderr = math.sqrt(max(probability * (1 - probability), 0.0) / p.mc_samples)
            report.record('mc_samples', p.mc_samples)
            report.record('mc_sector_probability', frequency)
            report.record('mc_standard_error', stderr)
            report.record('mc_z_score', (frequency - probability) / stderr if stderr > 0 else 0.0)

        reduced_q, _ = reduce(states['q_wf'], (lo, hi))
        delta_q, delta_p1, product, passed = kennard_check(reduced_q)
        report.record('post_reduction_delta_q', delta_q)
        report.record('post_reduction_delta_p1', delta_p1)
        report.record('post_reduction_product', product)
        report.record('post_reduction_kennard_pass', passed)

        headline = favorable if p.conditioning == "favorable" else unconditioned
        report.set_evasion(
            bool(headline.evasion_flags['ex_etap']),
            headline.sector_probability,
            headline.product_ex_etap,
            channel="epsilon(x1) * eta(p1)",
        )
        report.notes.append("packet profile: Gaussian truncated at 3 sigma inside each width-alpha bin")
        return report


class OzawaCommutingExperiment(BaseExperiment):
    name = "ozawa_commuting"
    description = "x1 read off as q + c with total momentum measured"
    params_model = OzawaCommutingParams

    def prepare(self) -> Dict[str, Any]:
        state, x2_wf, layout = packet_box_state(self.params)
        sector = sector_containing(layout, self.params.c)
        conditioned, probability = state.reduce(0, sector)
        return {
            'state': state,
            'x2_wf': x2_wf,
            'layout': layout,
            'sector': sector,
            'conditioned': conditioned,
            'probability': probability,
        }

    def analyze(self, states: Dict[str, Any]) -> ExperimentReport:
        p = self.params
        report = self.new_report()
        state, conditioned, probability = states['state'], states['conditioned'], states['probability']
        resolution = states['x2_wf'].grid.momentum_spacing
        constants = {'c': p.c}

        model = MeasurementModel(pointer_x="q + c", pointer_p="P", target_x="x1", target_p="P",
                                 constants=constants, hbar=p.hbar)
        alternative = MeasurementModel(pointer_x="q + c", pointer_p="P", target_x="x1", target_p="p1",
                                       constants=constants, hbar=p.hbar)
        unconditioned = noise_report(model, state, 1.0, momentum_resolution=resolution)
        favorable = noise_report(model, conditioned, probability, momentum_resolution=resolution)
        alt_unconditioned = noise_report(alternative, state, 1.0)
        alt_conditioned = noise_report(alternative, conditioned, probability)
        report.noise = {
            'unconditioned': unconditioned,
            'conditioned': favorable,
            'alternative_unconditioned': alt_unconditioned,
            'alternative_conditioned': alt_conditioned,
        }

        report.record('packet_count', states['layout'].count)
        report.record('epsilon_P', unconditioned.epsilon_p)
        report.record('eq_2_17_product_conditioned', favorable.product_ex_ep)
        report.record('eq_2_17_product_unconditioned', unconditioned.product_ex_ep)
        report.record('eq_2_17_product_unconditioned_resolved', unconditioned.epsilon_x * resolution)
        report.record('eq_2_18_epsilon_x1_unconditioned', unconditioned.epsilon_x)
        report.record('eq_2_18_epsilon_x1_conditioned', favorable.epsilon_x)
        report.record('eq_2_21_indirect_error', indirect_error_via_q(state, p.c))
        report.record('eq_2_21_indirect_error_conditioned', indirect_error_via_q(conditioned, p.c))
        report.record('eq_2_21_sector_probability', probability)
        report.record('eq_2_21_expected_probability', p.packet_width / p.box_length)
        report.record('alternative_epsilon_p1', alt_unconditioned.epsilon_p)
        report.record('alternative_product_unconditioned', alt_unconditioned.product_ex_ep)
        report.record('alternative_product_conditioned', alt_conditioned.product_ex_ep)
        report.record('alternative_evasion', bool(alt_conditioned.evasion_flags['ex_ep']))

        report.set_evasion(
            bool(favorable.evasion_flags['ex_ep']),
            probability,
            favorable.product_ex_ep,
            channel="epsilon(x1) * epsilon(P)",
        )
        return report


def run_ozawa_position(box_length: float = 10.0, packet_width: float = 0.1,
                       conditioning: str = "favorable", **overrides) -> ExperimentReport:
    params = {'box_length': box_length, 'packet_width': packet_width, 'conditioning': conditioning, **overrides}
    return OzawaPositionExperiment(params).run()


def run_ozawa_commuting(box_length: float = 20.0, packet_width: float = 0.1, c: float = 0.0,
                        **overrides) -> ExperimentReport:
    params = {'box_length': box_length, 'packet_width': packet_width, 'c': c, **overrides}
    return OzawaCommutingExperiment(params).run()
