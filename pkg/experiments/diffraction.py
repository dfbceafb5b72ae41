import math
from typing import Any, Dict, Optional, Tuple, Union

import numpy as np
from scipy import integrate, stats

from config.settings import settings
from config.tolerances import GRID_DEFAULTS, PAPER_BANDS, TOLERANCES
from core.errors import ResolutionError
from core.grid import (
    Grid1D,
    GridWaveFn,
    free_propagate,
    gaussian_packet,
    momentum_stats,
    next_power_of_two,
    reduce,
    sector_probability,
)
from experiments.base_experiment import BaseExperiment
from experiments.data_models import DiffractionConfig, ExperimentReport


def transverse_momentum(cfg: DiffractionConfig) -> float:
    """p_y = p y / sqrt(L^2 + y^2)"""
    y, L = cfg.detector_position, cfg.screen_distance
    return cfg.momentum * y / math.hypot(L, y)


def transverse_momentum_error(cfg: DiffractionConfig) -> float:
    """delta p_y = p (delta y / sqrt(L^2 + y^2)) L^2 / (L^2 + y^2)"""
    y, L = cfg.detector_position, cfg.screen_distance
    r2 = L ** 2 + y ** 2
    return cfg.momentum * (cfg.detector_size / math.sqrt(r2)) * L ** 2 / r2


def rescaled_product(cfg: DiffractionConfig) -> float:
    """hbar (L / reduced wavelength) (delta_y / L)^2"""
    return cfg.hbar * (cfg.screen_distance / cfg.reduced_wavelength) * cfg.relative_detector_size ** 2


def angular_intensity(cfg: DiffractionConfig, theta: float) -> float:
    """|f(theta)|^2 normalized so that its integral over the forward hemisphere is one."""
    if cfg.angular_profile == "isotropic":
        return 1.0 / (2.0 * math.pi)
    shape = lambda t: math.exp(-t ** 2 / (2.0 * cfg.angular_width ** 2))
    norm, _ = integrate.quad(lambda t: shape(t) * 2.0 * math.pi * math.sin(t), 0.0, math.pi / 2)
    return shape(theta) / norm


def ring_probability(cfg: DiffractionConfig) -> Tuple[float, float]:
    """(|f(theta)|^2 2 pi rho delta_rho / r^2, bound delta_rho / r) for the annulus on the screen."""
    rho, L = cfg.detector_position, cfg.screen_distance
    r = math.hypot(L, rho)
    theta = math.asin(rho / r)
    probability = angular_intensity(cfg, theta) * 2.0 * math.pi * rho * cfg.detector_size / r ** 2
    return min(probability, 1.0), cfg.detector_size / r


def aperture_width(cfg: DiffractionConfig) -> float:
    return 0.5 * cfg.slit_width


def aperture_momentum_density(cfg: DiffractionConfig, p_y: np.ndarray) -> np.ndarray:
    if cfg.aperture == "gaussian":
        return stats.norm.pdf(p_y, loc=0.0, scale=cfg.hbar / (2.0 * aperture_width(cfg)))
    # |FT of a top hat|^2 = (delta_l / 2 pi hbar) sinc^2(p delta_l / 2 pi hbar)
    scale = cfg.slit_width / (2.0 * math.pi * cfg.hbar)
    return scale * np.sinc(p_y * scale) ** 2


def detector_interval(cfg: DiffractionConfig) -> Tuple[float, float]:
    half = 0.5 * cfg.detector_size
    return cfg.detector_position - half, cfg.detector_position + half


def far_field_interval_probability(cfg: DiffractionConfig) -> float:
    """Probability of the detector interval from the aperture's momentum distribution.

    A transverse momentum p_y lands at y with sin(theta) = p_y / p = y / sqrt(L^2 + y^2).
    """
    lo, hi = detector_interval(cfg)
    p_lo = cfg.momentum * lo / math.hypot(cfg.screen_distance, lo)
    p_hi = cfg.momentum * hi / math.hypot(cfg.screen_distance, hi)
    if cfg.aperture == "gaussian":
        dist = stats.norm(loc=0.0, scale=cfg.hbar / (2.0 * aperture_width(cfg)))
        return float(dist.cdf(p_hi) - dist.cdf(p_lo))
    value, _ = integrate.quad(lambda p: float(aperture_momentum_density(cfg, p)), p_lo, p_hi, limit=200)
    return float(value)


def far_field_spread(cfg: DiffractionConfig) -> float:
    sigma = aperture_width(cfg)
    return math.hypot(sigma, cfg.hbar * cfg.flight_time / (2.0 * cfg.mass * sigma))


def paraxial_grid(cfg: DiffractionConfig) -> Optional[Grid1D]:
    """Power-of-two grid resolving the slit and the detector and holding the far-field spread.

    Returns None when the required grid exceeds MAX_GRID_POINTS.
    """
    spacing = min(cfg.slit_width, cfg.detector_size) / GRID_DEFAULTS['aperture_min_spacings']
    length = max(GRID_DEFAULTS['farfield_box_factor'] * far_field_spread(cfg),
                 3.0 * (abs(cfg.detector_position) + cfg.detector_size),
                 12.0 * cfg.slit_width)
    n_points = max(next_power_of_two(length / spacing), cfg.grid_points or settings.GRID_POINTS)
    if n_points > settings.MAX_GRID_POINTS:
        return None
    return Grid1D(n_points, n_points * spacing, hbar=cfg.hbar)


def aperture_state(cfg: DiffractionConfig, grid: Grid1D) -> GridWaveFn:
    if cfg.aperture == "gaussian":
        return gaussian_packet(grid, 0.0, aperture_width(cfg))
    if cfg.slit_width < GRID_DEFAULTS['aperture_min_spacings'] * grid.spacing:
        raise ResolutionError(f"Slit width {cfg.slit_width} is not resolved by spacing {grid.spacing}")
    inside = np.abs(grid.positions) <= 0.5 * cfg.slit_width
    return GridWaveFn(grid, inside.astype(complex), normalized=False).with_amplitudes(inside.astype(complex))


class DiffractionExperiment(BaseExperiment):
    name = "diffraction"
    description = "Single-slit diffraction: momentum estimates and far-field ring probability"
    params_model = DiffractionConfig
    fit_fields = [("eq_2_3_product", None), ("eq_2_10_ring_probability", None)]

    def prepare(self) -> Dict[str, Any]:
        cfg = self.params
        if cfg.wide_slit:
            self.logger.warning(
                f"Slit width {cfg.slit_width} exceeds {PAPER_BANDS['slit_width_warning']:g} reduced wavelengths; "
                f"the elastic picture is only qualitative"
            )
        if not cfg.simulate_grid:
            return {'grid': None}
        grid = paraxial_grid(cfg)
        if grid is None:
            self.logger.warning(
                f"Paraxial grid for L={cfg.screen_distance:g} would exceed {settings.MAX_GRID_POINTS} points; "
                f"skipping the grid comparison"
            )
            return {'grid': None}
        initial = aperture_state(cfg, grid)
        screen = free_propagate(initial, cfg.mass, cfg.flight_time)
        return {'grid': grid, 'initial': initial, 'screen': screen}

    def analyze(self, states: Dict[str, Any]) -> ExperimentReport:
        cfg = self.params
        report = self.new_report()
        hbar = cfg.hbar

        p_y = transverse_momentum(cfg)
        delta_p_y = transverse_momentum_error(cfg)
        product = cfg.detector_size * delta_p_y
        ring, ring_bound = ring_probability(cfg)
        analytic = far_field_interval_probability(cfg)
        rescaled = rescaled_product(cfg)

        report.record('reduced_wavelength', cfg.reduced_wavelength)
        report.record('eq_2_1_p_y', p_y)
        report.record('eq_2_2_delta_p_y', delta_p_y)
        report.record('eq_2_3_product', product)
        report.record('eq_2_8_rescaled_product', rescaled)
        report.record('eq_2_8_classical_limit', rescaled >= PAPER_BANDS['classical_factor'] * hbar)
        report.record('eq_2_10_ring_probability', ring)
        report.record('eq_2_10_ring_bound', ring_bound)
        report.record('far_field_interval_probability', analytic)
        report.record('wide_slit', cfg.wide_slit)

        screen = states.get('screen')
        if screen is None:
            report.record('grid_points', None)
            report.record('paraxial_interval_probability', None)
            report.record('paraxial_relative_difference', None)
            report.record('post_reduction_delta_p', None)
            report.record('post_reduction_product', None)
            report.notes.append("paraxial grid comparison skipped")
        else:
            interval = detector_interval(cfg)
            paraxial = sector_probability(screen, interval)
            reduced, _ = reduce(screen, interval)
            _, reduced_dp = momentum_stats(reduced)
            report.record('grid_points', screen.grid.n_points)
            report.record('paraxial_interval_probability', paraxial)
            report.record('paraxial_relative_difference',
                          abs(paraxial - analytic) / analytic if analytic > 0 else None)
            report.record('post_reduction_delta_p', reduced_dp)
            report.record('post_reduction_product', reduced_dp * cfg.detector_size)

        evades = product < 0.5 * hbar * (1 - TOLERANCES['evasion_margin'])
        report.set_evasion(evades, analytic, product, channel="delta_y * delta_p_y")
        report.notes.append(f"aperture={cfg.aperture}, angular_profile={cfg.angular_profile}")
        return report


def run_diffraction(cfg: Union[DiffractionConfig, Dict[str, Any], None] = None) -> ExperimentReport:
    return DiffractionExperiment(cfg).run()
